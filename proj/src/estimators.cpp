#include "ecborrow/estimators.hpp"

#include <cmath>
#include <vector>

#include "ecborrow/kernel_ridge.hpp"

namespace ecborrow {

namespace {

struct ArmSplit {
  std::vector<Index> treated;
  std::vector<Index> control;
};

ArmSplit split_arms(const Eigen::VectorXd& a) {
  ArmSplit s;
  for (Index i = 0; i < a.size(); ++i) (a(i) == 1.0 ? s.treated : s.control).push_back(i);
  if (s.treated.empty() || s.control.empty()) {
    throw Error(ErrorCode::ArmMissing, s.treated.empty() ? "no treated units" : "no control units");
  }
  return s;
}

Eigen::MatrixXd rows_of(const Eigen::MatrixXd& x, const std::vector<Index>& idx) {
  return x(idx, Eigen::all);
}

Eigen::VectorXd rows_of(const Eigen::VectorXd& v, const std::vector<Index>& idx) {
  return v(idx);
}

// Fit on the arm's rows, predict on every row.
Eigen::VectorXd fit_arm(const CombinedDataset& data, const std::vector<Index>& rows,
                        const NuisanceOptions& options) {
  const Eigen::MatrixXd x = rows_of(data.x, rows);
  const Eigen::VectorXd y = rows_of(data.y, rows);
  if (options.regressor == Regressor::kernel_ridge) {
    return predict_kernel_ridge(fit_kernel_ridge(x, y), data.x);
  }
  return predict_mean(fit_glm(x, y, options.family), data.x);
}

double sample_variance(const Eigen::VectorXd& v) {
  if (v.size() < 2) return 0.0;
  return (v.array() - v.mean()).square().sum() / static_cast<double>(v.size() - 1);
}

}  // namespace

void attach_reference(EstimateReport& report, double reference) {
  report.bias = report.estimate - reference;
  report.mse = *report.bias * *report.bias + report.variance();
}

EstimateReport estimate_direct(const RctDataset& rct) {
  const auto arms = split_arms(rct.a);
  const Eigen::VectorXd y1 = rows_of(rct.y, arms.treated);
  const Eigen::VectorXd y0 = rows_of(rct.y, arms.control);
  EstimateReport out;
  out.estimate = y1.mean() - y0.mean();
  out.se = std::sqrt(sample_variance(y1) / static_cast<double>(y1.size()) +
                     sample_variance(y0) / static_cast<double>(y0.size()));
  out.n_used = rct.rows();
  return out;
}

NuisanceEstimates fit_nuisances(const CombinedDataset& data, const NuisanceOptions& options) {
  if (!(options.trim > 0.0 && options.trim < 0.5)) {
    throw Error(ErrorCode::InvalidArgument, "trim must lie in (0, 0.5)");
  }
  const auto arms = split_arms(data.a);
  const Index n = data.rows();
  NuisanceEstimates out;
  out.trim = options.trim;

  if (options.known_ps) {
    if (const auto* constant = std::get_if<double>(&*options.known_ps)) {
      out.ps_hat = Eigen::VectorXd::Constant(n, *constant);
    } else {
      out.ps_hat = std::get<Eigen::VectorXd>(*options.known_ps);
      if (out.ps_hat.size() != n) {
        throw Error(ErrorCode::ShapeMismatch, "known propensity vector length != rows");
      }
    }
    if (!((out.ps_hat.array() > 0.0) && (out.ps_hat.array() < 1.0)).all()) {
      throw Error(ErrorCode::InvalidArgument, "known propensity must lie in (0, 1)");
    }
  } else {
    out.ps_hat = predict_mean(fit_glm(data.x, data.a, Family::binomial), data.x);
  }
  out.ps_hat = out.ps_hat.cwiseMax(options.trim).cwiseMin(1.0 - options.trim);

  out.mu1_hat = fit_arm(data, arms.treated, options);
  out.mu0_hat = fit_arm(data, arms.control, options);
  return out;
}

EstimateReport estimate_aipw(const CombinedDataset& data, const NuisanceEstimates& nuisances,
                             std::optional<double> reference) {
  const Index n = data.rows();
  if (nuisances.ps_hat.size() != n || nuisances.mu1_hat.size() != n ||
      nuisances.mu0_hat.size() != n) {
    throw Error(ErrorCode::ShapeMismatch, "nuisance vectors not aligned with dataset rows");
  }
  if (n < 2) throw Error(ErrorCode::TooFewRows, "AIPW needs at least 2 rows");
  const auto& a = data.a.array();
  const auto& y = data.y.array();
  const auto& e = nuisances.ps_hat.array();
  const auto& m1 = nuisances.mu1_hat.array();
  const auto& m0 = nuisances.mu0_hat.array();

  EstimateReport out;
  out.phi = (a * (y - m1) / e - (1.0 - a) * (y - m0) / (1.0 - e) + m1 - m0).matrix();
  out.estimate = out.phi.mean();
  out.se = std::sqrt(sample_variance(out.phi) / static_cast<double>(n));
  out.n_used = n;
  if (reference) attach_reference(out, *reference);
  return out;
}

RctEstimates estimate_rct(const RctDataset& rct, const NuisanceOptions& options) {
  RctEstimates out;
  out.direct = estimate_direct(rct);
  const auto data = combine(rct);
  out.aipw = estimate_aipw(data, fit_nuisances(data, options));
  return out;
}

EstimateReport estimate_full(const RctDataset& rct, const EcDataset& ec,
                             const NuisanceOptions& options, std::optional<double> reference) {
  auto pooled_options = options;
  pooled_options.known_ps.reset();
  const auto data = combine(rct, ec);
  return estimate_aipw(data, fit_nuisances(data, pooled_options), reference);
}

}  // namespace ecborrow
