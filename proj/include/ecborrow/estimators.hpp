#pragma once

#include <Eigen/Dense>

#include <optional>
#include <variant>

#include "ecborrow/data.hpp"
#include "ecborrow/glm.hpp"

namespace ecborrow {

enum class Regressor { glm, kernel_ridge };

// A single propensity for every row, or one per row.
using KnownPropensity = std::variant<double, Eigen::VectorXd>;

struct NuisanceOptions {
  Family family = Family::gaussian;  // outcome-regression family
  double trim = 0.01;                // propensities clamped to [trim, 1 - trim]
  std::optional<KnownPropensity> known_ps;
  Regressor regressor = Regressor::glm;
};

struct NuisanceEstimates {
  Eigen::VectorXd ps_hat;
  Eigen::VectorXd mu1_hat;
  Eigen::VectorXd mu0_hat;
  double trim = 0.01;
};

struct EstimateReport {
  double estimate = 0.0;
  double se = 0.0;
  Eigen::VectorXd phi;  // per-unit influence values; empty for the direct estimator
  std::optional<double> bias;
  std::optional<double> mse;
  Index n_used = 0;

  double variance() const { return se * se; }
};

struct RctEstimates {
  EstimateReport direct;
  EstimateReport aipw;
};

// Difference in arm means with the unpooled standard error.
EstimateReport estimate_direct(const RctDataset& rct);

// Propensity by logistic regression of A on X (unless known), outcome
// regressions on each arm's rows (all A = 0 rows for the control arm,
// including borrowed ECs). Predictions cover every row of `data`.
NuisanceEstimates fit_nuisances(const CombinedDataset& data, const NuisanceOptions& options);

// AIPW over all rows of `data`:
//   phi_i = A (Y - m1) / e - (1 - A)(Y - m0) / (1 - e) + m1 - m0
// estimate = mean(phi), se = sd(phi) / sqrt(n). With a reference value the
// report also carries bias = estimate - reference and mse = bias^2 + se^2.
EstimateReport estimate_aipw(const CombinedDataset& data, const NuisanceEstimates& nuisances,
                             std::optional<double> reference = std::nullopt);

RctEstimates estimate_rct(const RctDataset& rct, const NuisanceOptions& options);

// AIPW on the RCT pooled with every EC. A known propensity in `options`
// describes the RCT only and is ignored here.
EstimateReport estimate_full(const RctDataset& rct, const EcDataset& ec,
                             const NuisanceOptions& options, std::optional<double> reference);

void attach_reference(EstimateReport& report, double reference);

}  // namespace ecborrow
