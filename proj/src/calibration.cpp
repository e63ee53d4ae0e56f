#include "ecborrow/calibration.hpp"

namespace ecborrow {

std::string_view to_string(BiasKind kind) noexcept {
  return kind == BiasKind::linear ? "linear" : "kernel";
}

BiasModel BiasModel::zero(Index covariates) {
  BiasModel model;
  model.kind = BiasKind::linear;
  model.coefficients = Eigen::VectorXd::Zero(covariates + 1);
  return model;
}

SamplingScoreModel fit_sampling_score(const Eigen::MatrixXd& x_controls, const Eigen::VectorXd& r) {
  const auto rct = (r.array() == 1.0).count();
  if (rct == 0 || rct == r.size()) {
    throw Error(ErrorCode::SourceMissing, rct == 0 ? "no RCT controls among pooled controls"
                                                   : "no external controls among pooled controls");
  }
  SamplingScoreModel model;
  model.fit = fit_glm(x_controls, r, Family::binomial);
  return model;
}

Eigen::VectorXd predict_sampling_score(const SamplingScoreModel& model, const Eigen::MatrixXd& x) {
  return predict_mean(model.fit, x).cwiseMax(model.epsilon).cwiseMin(1.0 - model.epsilon);
}

BiasModel fit_rlearner(const Eigen::MatrixXd& x_controls, const Eigen::VectorXd& r,
                       const Eigen::VectorXd& y, BiasKind kind) {
  if (r.size() != x_controls.rows() || y.size() != x_controls.rows()) {
    throw Error(ErrorCode::ShapeMismatch, "R-learner inputs have different lengths");
  }
  BiasModel model;
  model.kind = kind;
  model.sampling = fit_sampling_score(x_controls, r);
  const Eigen::VectorXd weight = predict_sampling_score(*model.sampling, x_controls) - r;
  if (weight.cwiseAbs().maxCoeff() < 1e-3) {
    throw Error(ErrorCode::SingularDesign, "sampling score matches the source indicator everywhere");
  }

  Eigen::VectorXd residual;
  if (kind == BiasKind::linear) {
    auto m = fit_glm(x_controls, y, Family::gaussian);
    residual = y - predict_mean(m, x_controls);
    model.outcome = std::move(m);

    const Eigen::MatrixXd design = weight.asDiagonal() * with_intercept(x_controls);
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    qr.setThreshold(1e-10);
    if (qr.rank() < design.cols()) {
      throw Error(ErrorCode::SingularDesign, "transformed R-learner design is rank deficient");
    }
    model.coefficients = qr.solve(residual);
  } else {
    auto m = fit_kernel_ridge(x_controls, y);
    residual = y - predict_kernel_ridge(m, x_controls);
    model.outcome = std::move(m);
    model.kernel = fit_weighted_kernel_ridge(x_controls, residual, weight);
  }
  return model;
}

BiasModel fit_rlearner(const RctDataset& rct, const EcDataset& ec, BiasKind kind) {
  const auto pooled = controls_only(combine(rct, ec));
  return fit_rlearner(pooled.x, pooled.r, pooled.y, kind);
}

Eigen::VectorXd predict_bias(const BiasModel& model, const Eigen::MatrixXd& x) {
  if (model.kind == BiasKind::kernel) {
    if (!model.kernel) throw Error(ErrorCode::InvalidArgument, "kernel bias model has no fit");
    return predict_kernel_ridge(*model.kernel, x);
  }
  if (x.cols() + 1 != model.coefficients.size()) {
    throw Error(ErrorCode::ShapeMismatch, "bias model covariate count mismatch");
  }
  Eigen::VectorXd out = x * model.coefficients.tail(x.cols());
  out.array() += model.coefficients(0);
  return out;
}

EcDataset calibrate_ec(const EcDataset& ec, const BiasModel& model) {
  EcDataset out = ec;
  out.y = ec.y - predict_bias(model, ec.x);
  if (out.outcome_kind == OutcomeKind::binary) out.outcome_kind = infer_outcome_kind(out.y);
  return out;
}

}  // namespace ecborrow
