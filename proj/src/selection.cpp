#include "ecborrow/selection.hpp"

#include <cmath>
#include <limits>

#include "ecborrow/parallel.hpp"

namespace ecborrow {

namespace {

struct GridRun {
  KGrid grid;
  std::vector<std::optional<EstimateReport>> reports;
};

GridRun run_grid(const RctDataset& rct, const EcDataset& ec, const InfluenceScores& influences,
                 double reference, const std::vector<Index>& ks, const SelectionOptions& options) {
  GridRun run;
  run.grid.rows.resize(ks.size());
  run.reports.resize(ks.size());
  parallel_for(static_cast<Index>(ks.size()), options.threads, [&](Index i) {
    const auto slot = static_cast<std::size_t>(i);
    auto& row = run.grid.rows[slot];
    row.top_k = ks[slot];
    try {
      auto report = evaluate_k(rct, ec, influences, row.top_k, reference, options.nuisance);
      row.estimate = report.estimate;
      row.bias = *report.bias;
      row.variance = report.variance();
      row.mse = *report.mse;
      run.reports[slot] = std::move(report);
    } catch (const Error& e) {
      const double nan = std::numeric_limits<double>::quiet_NaN();
      row.estimate = row.bias = row.variance = row.mse = nan;
      row.error = e.what();
    }
  });
  return run;
}

void check_inputs(const EcDataset& ec, const InfluenceScores& influences, double reference) {
  if (influences.size() != ec.rows()) {
    throw Error(ErrorCode::ShapeMismatch, "influence scores do not match the EC row count");
  }
  if (!std::isfinite(reference)) {
    throw Error(ErrorCode::InvalidArgument, "reference value must be finite");
  }
}

}  // namespace

CsvTable KGrid::table() const {
  CsvTable t;
  t.header = {"top_k", "estimate", "bias", "variance", "mse"};
  for (const auto& r : rows) {
    t.rows.push_back({std::to_string(r.top_k), format_number(r.estimate), format_number(r.bias),
                      format_number(r.variance), format_number(r.mse)});
  }
  return t;
}

EcDataset nested_subset(const EcDataset& ec, const InfluenceScores& influences, Index k) {
  if (k < 0 || k > ec.rows()) {
    throw Error(ErrorCode::KOutOfRange,
                "k = " + std::to_string(k) + " outside [0, " + std::to_string(ec.rows()) + "]");
  }
  if (influences.size() != ec.rows()) {
    throw Error(ErrorCode::ShapeMismatch, "influence scores do not match the EC row count");
  }
  std::vector<Index> rows(influences.ranking.begin(), influences.ranking.begin() + k);
  return take_rows(ec, rows);
}

std::vector<Index> default_k_vector(Index n_ec) {
  const Index step = std::max<Index>(1, std::llround(static_cast<double>(n_ec) / 40.0));
  std::vector<Index> ks;
  for (Index k = 0; k <= n_ec; k += step) ks.push_back(k);
  if (ks.back() != n_ec) ks.push_back(n_ec);
  return ks;
}

EstimateReport evaluate_k(const RctDataset& rct, const EcDataset& ec,
                          const InfluenceScores& influences, Index k, double reference,
                          const NuisanceOptions& nuisance) {
  auto options = nuisance;
  options.known_ps.reset();
  const auto data = combine(rct, nested_subset(ec, influences, k));
  return estimate_aipw(data, fit_nuisances(data, options), reference);
}

std::size_t argmin_mse(const KGrid& grid) {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < grid.rows.size(); ++i) {
    const auto& row = grid.rows[i];
    if (!row.ok()) continue;
    if (!best || row.mse < grid.rows[*best].mse) best = i;
  }
  if (!best) throw Error(ErrorCode::SelectionFailed, "every candidate k failed");
  return *best;
}

OptimalSelection find_optimal_k(const RctDataset& rct, const EcDataset& ec,
                                const InfluenceScores& influences, double reference,
                                const std::vector<Index>& k_vector,
                                const SelectionOptions& options) {
  check_inputs(ec, influences, reference);
  if (k_vector.empty()) throw Error(ErrorCode::InvalidArgument, "empty k vector");
  for (std::size_t i = 0; i < k_vector.size(); ++i) {
    if (k_vector[i] < 0 || k_vector[i] > ec.rows()) {
      throw Error(ErrorCode::KOutOfRange, "k = " + std::to_string(k_vector[i]) +
                                              " outside [0, " + std::to_string(ec.rows()) + "]");
    }
    if (i > 0 && k_vector[i] <= k_vector[i - 1]) {
      throw Error(ErrorCode::InvalidArgument, "k vector must be strictly increasing");
    }
  }
  auto run = run_grid(rct, ec, influences, reference, k_vector, options);
  const std::size_t best = argmin_mse(run.grid);

  OptimalSelection out;
  out.k_star = run.grid.rows[best].top_k;
  out.report = std::move(*run.reports[best]);
  out.grid = std::move(run.grid);
  out.selected_ec_indices.assign(influences.ranking.begin(),
                                 influences.ranking.begin() + out.k_star);
  return out;
}

KGrid sensitivity_sweep(const RctDataset& rct, const EcDataset& ec,
                        const InfluenceScores& influences, double reference, Index k_star,
                        Index delta, const SelectionOptions& options) {
  check_inputs(ec, influences, reference);
  if (delta < 1) throw Error(ErrorCode::InvalidArgument, "sensitivity delta must be >= 1");
  if (k_star < 0 || k_star > ec.rows()) {
    throw Error(ErrorCode::KOutOfRange, "k* outside [0, n_ec]");
  }
  std::vector<Index> ks;
  for (Index k = std::max<Index>(0, k_star - delta); k <= std::min(ec.rows(), k_star + delta); ++k) {
    ks.push_back(k);
  }
  return run_grid(rct, ec, influences, reference, ks, options).grid;
}

}  // namespace ecborrow
