#pragma once

#include <Eigen/Dense>

#include <optional>
#include <string_view>
#include <variant>

#include "ecborrow/data.hpp"
#include "ecborrow/glm.hpp"
#include "ecborrow/kernel_ridge.hpp"

namespace ecborrow {

enum class BiasKind { linear, kernel };

std::string_view to_string(BiasKind kind) noexcept;

// P(R = 1 | X, A = 0): probability that a pooled control comes from the RCT.
struct SamplingScoreModel {
  GlmFit fit;
  double epsilon = 1e-6;
};

struct BiasModel {
  BiasKind kind = BiasKind::linear;
  Eigen::VectorXd coefficients;         // linear kind: intercept first
  std::optional<KernelRidgeFit> kernel;  // kernel kind
  // Nuisances the bias fit was built on; absent for hand-built models.
  std::optional<SamplingScoreModel> sampling;
  std::optional<std::variant<GlmFit, KernelRidgeFit>> outcome;

  // b(x) = 0 for every x.
  static BiasModel zero(Index covariates);
};

// Logistic regression of R on X over the pooled controls; predictions are
// clamped to (epsilon, 1 - epsilon). Throws SourceMissing unless both sources
// are present.
SamplingScoreModel fit_sampling_score(const Eigen::MatrixXd& x_controls, const Eigen::VectorXd& r);
Eigen::VectorXd predict_sampling_score(const SamplingScoreModel& model, const Eigen::MatrixXd& x);

// R-learner estimate of the bias function b(x) = E_EC[Y | x] - E_RCT[Y | x]
// over pooled controls, minimizing
//
//   sum_i ( Y_i - m(X_i) - (pi0(X_i) - R_i) b(X_i) )^2
//
// where m is the pooled-control outcome regression and pi0 the sampling
// score. Linear kind: b(x) = [1, x] beta by least squares on the transformed
// regressors (pi0_i - R_i) [1, x_i]. Kernel kind: kernel ridge on the same
// weighted problem, with m fitted by kernel ridge too.
// Throws SingularDesign when max |pi0_i - R_i| < 1e-3 or the transformed
// design is rank deficient.
BiasModel fit_rlearner(const Eigen::MatrixXd& x_controls, const Eigen::VectorXd& r,
                       const Eigen::VectorXd& y, BiasKind kind);

// Pools the RCT controls and every EC and fits the bias function on them.
BiasModel fit_rlearner(const RctDataset& rct, const EcDataset& ec, BiasKind kind);

Eigen::VectorXd predict_bias(const BiasModel& model, const Eigen::MatrixXd& x);

// Y~ = Y - b(X). A binary outcome stays binary only if every calibrated value
// is still 0 or 1.
EcDataset calibrate_ec(const EcDataset& ec, const BiasModel& model);

}  // namespace ecborrow
