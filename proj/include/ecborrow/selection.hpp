#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ecborrow/csv.hpp"
#include "ecborrow/data.hpp"
#include "ecborrow/estimators.hpp"
#include "ecborrow/influence.hpp"

namespace ecborrow {

struct KGridRow {
  Index top_k = 0;
  double estimate = 0.0;
  double bias = 0.0;
  double variance = 0.0;
  double mse = 0.0;
  std::optional<std::string> error;  // set when this k could not be evaluated

  bool ok() const { return !error.has_value(); }
};

struct KGrid {
  std::vector<KGridRow> rows;

  // Columns top_k,estimate,bias,variance,mse; failed rows hold NA.
  CsvTable table() const;
};

struct OptimalSelection {
  Index k_star = 0;
  EstimateReport report;
  KGrid grid;
  std::vector<Index> selected_ec_indices;  // first k_star entries of the ranking
};

struct SelectionOptions {
  // Outcome family, trim and regressor for the per-k nuisance fits. The
  // propensity is always fitted on the combined sample.
  NuisanceOptions nuisance;
  unsigned threads = 1;
};

// The k ECs with the smallest influence scores, in ranking order.
EcDataset nested_subset(const EcDataset& ec, const InfluenceScores& influences, Index k);

// 0, s, 2s, ... with s = max(1, round(n_ec / 40)); n_ec is always appended.
std::vector<Index> default_k_vector(Index n_ec);

// AIPW on the RCT plus the top-k ECs, with freshly fitted nuisances.
EstimateReport evaluate_k(const RctDataset& rct, const EcDataset& ec,
                          const InfluenceScores& influences, Index k, double reference,
                          const NuisanceOptions& nuisance);

// Position of the smallest mse among non-failed rows; ties go to the first
// (smallest k). Throws SelectionFailed when every row failed.
std::size_t argmin_mse(const KGrid& grid);

OptimalSelection find_optimal_k(const RctDataset& rct, const EcDataset& ec,
                                const InfluenceScores& influences, double reference,
                                const std::vector<Index>& k_vector,
                                const SelectionOptions& options);

// Grid over [max(0, k_star - delta), min(n_ec, k_star + delta)] in steps of 1.
KGrid sensitivity_sweep(const RctDataset& rct, const EcDataset& ec,
                        const InfluenceScores& influences, double reference, Index k_star,
                        Index delta, const SelectionOptions& options);

}  // namespace ecborrow
