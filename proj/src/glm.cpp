#include "ecborrow/glm.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace ecborrow {

namespace {

constexpr double kRankThreshold = 1e-10;
constexpr double kMinWeight = 1e-10;

struct WeightedSolve {
  Eigen::VectorXd theta;
  double condition = 0.0;
};

// Solves min ||sqrt(w) .* (z - X theta)||^2 with a rank-revealing QR.
WeightedSolve weighted_least_squares(const Eigen::MatrixXd& design, const Eigen::VectorXd& z,
                                     const Eigen::VectorXd& w) {
  const Eigen::VectorXd sw = w.array().sqrt();
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(sw.asDiagonal() * design);
  qr.setThreshold(kRankThreshold);
  if (qr.rank() < design.cols()) {
    throw Error(ErrorCode::SingularDesign, "design matrix has rank " + std::to_string(qr.rank()) +
                                               " < " + std::to_string(design.cols()) + " columns");
  }
  WeightedSolve out;
  out.theta = qr.solve((sw.array() * z.array()).matrix());
  const auto diag = qr.matrixR().diagonal().cwiseAbs();
  const double ratio = diag.maxCoeff() / diag.minCoeff();
  out.condition = ratio * ratio;
  return out;
}

double binomial_deviance(const Eigen::VectorXd& eta, const Eigen::VectorXd& y) {
  double total = 0.0;
  for (Index i = 0; i < y.size(); ++i) total += log1p_exp(eta(i)) - y(i) * eta(i);
  return 2.0 * total;
}

GlmFit fit_gaussian(const Eigen::MatrixXd& design, const Eigen::VectorXd& y) {
  auto solved = weighted_least_squares(design, y, Eigen::VectorXd::Ones(y.size()));
  GlmFit fit;
  fit.family = Family::gaussian;
  fit.coefficients = std::move(solved.theta);
  fit.condition_estimate = solved.condition;
  fit.deviance = (y - design * fit.coefficients).squaredNorm();
  fit.deviance_history = {fit.deviance};
  fit.converged = true;
  fit.iterations = 1;
  return fit;
}

GlmFit fit_binomial(const Eigen::MatrixXd& design, const Eigen::VectorXd& y,
                    const GlmOptions& options) {
  for (Index i = 0; i < y.size(); ++i) {
    if (y(i) != 0.0 && y(i) != 1.0) {
      throw Error(ErrorCode::NonBinaryOutcome,
                  "binomial fit needs y in {0,1}; row " + std::to_string(i));
    }
  }
  const Index n = y.size();
  // Same starting point as R's glm: mu = (y + 0.5) / 2.
  Eigen::VectorXd mu = (y.array() + 0.5) / 2.0;
  Eigen::VectorXd eta = (mu.array() / (1.0 - mu.array())).log();
  double dev = binomial_deviance(eta, y);

  GlmFit fit;
  fit.family = Family::binomial;
  Eigen::VectorXd theta;
  bool have_theta = false;

  for (int it = 1; it <= options.max_iterations; ++it) {
    Eigen::VectorXd w(n);
    Eigen::VectorXd z(n);
    for (Index i = 0; i < n; ++i) {
      w(i) = std::max(mu(i) * (1.0 - mu(i)), kMinWeight);
      z(i) = eta(i) + (y(i) - mu(i)) / w(i);
    }
    auto solved = weighted_least_squares(design, z, w);
    Eigen::VectorXd next = std::move(solved.theta);
    Eigen::VectorXd next_eta = design * next;
    double next_dev = binomial_deviance(next_eta, y);

    if (have_theta) {
      for (int halving = 0; halving < 30 && !(next_dev <= dev * (1.0 + 1e-12)); ++halving) {
        next = 0.5 * (next + theta);
        next_eta = design * next;
        next_dev = binomial_deviance(next_eta, y);
      }
    }

    const double change = std::abs(next_dev - dev) / (std::abs(next_dev) + 0.1);
    theta = std::move(next);
    have_theta = true;
    eta = std::move(next_eta);
    for (Index i = 0; i < n; ++i) mu(i) = expit(eta(i));
    dev = next_dev;
    fit.deviance_history.push_back(dev);
    fit.iterations = it;
    fit.condition_estimate = solved.condition;

    if (!theta.allFinite() || theta.cwiseAbs().maxCoeff() > options.separation_threshold) {
      throw Error(ErrorCode::PerfectSeparation,
                  "coefficients diverging (max |coef| > " +
                      std::to_string(options.separation_threshold) + ")");
    }
    if (change < options.tolerance) {
      fit.converged = true;
      break;
    }
  }
  if (!fit.converged) {
    throw Error(ErrorCode::Nonconvergence,
                "IRLS did not converge in " + std::to_string(options.max_iterations) + " iterations");
  }
  fit.coefficients = std::move(theta);
  fit.deviance = dev;
  return fit;
}

}  // namespace

std::string_view to_string(Family family) noexcept {
  return family == Family::gaussian ? "gaussian" : "binomial";
}

Family parse_family(std::string_view name) {
  if (name == "gaussian") return Family::gaussian;
  if (name == "binomial") return Family::binomial;
  throw Error(ErrorCode::InvalidArgument, "unknown family `" + std::string(name) + "`");
}

double expit(double eta) noexcept {
  if (eta >= 0) return 1.0 / (1.0 + std::exp(-eta));
  const double e = std::exp(eta);
  return e / (1.0 + e);
}

double log1p_exp(double eta) noexcept {
  return eta > 0 ? eta + std::log1p(std::exp(-eta)) : std::log1p(std::exp(eta));
}

Eigen::MatrixXd with_intercept(const Eigen::MatrixXd& x) {
  Eigen::MatrixXd design(x.rows(), x.cols() + 1);
  design.col(0).setOnes();
  design.rightCols(x.cols()) = x;
  return design;
}

GlmFit fit_glm(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, Family family,
               const GlmOptions& options) {
  if (y.size() != x.rows()) {
    throw Error(ErrorCode::ShapeMismatch, "outcome length differs from covariate rows");
  }
  if (x.rows() < x.cols() + 2) {
    throw Error(ErrorCode::TooFewRows, std::to_string(x.rows()) + " rows for " +
                                           std::to_string(x.cols()) + " covariates");
  }
  if (!x.allFinite() || !y.allFinite()) {
    throw Error(ErrorCode::NonFiniteValue, "non-finite value in GLM inputs");
  }
  const Eigen::MatrixXd design = with_intercept(x);
  return family == Family::gaussian ? fit_gaussian(design, y) : fit_binomial(design, y, options);
}

Eigen::VectorXd predict_link(const GlmFit& fit, const Eigen::MatrixXd& x) {
  if (x.cols() != fit.covariates()) {
    throw Error(ErrorCode::ShapeMismatch, "model has " + std::to_string(fit.covariates()) +
                                              " covariates, input has " + std::to_string(x.cols()));
  }
  Eigen::VectorXd eta = x * fit.coefficients.tail(x.cols());
  eta.array() += fit.coefficients(0);
  return eta;
}

Eigen::VectorXd predict_mean(const GlmFit& fit, const Eigen::MatrixXd& x) {
  Eigen::VectorXd eta = predict_link(fit, x);
  if (fit.family == Family::binomial) eta = eta.unaryExpr([](double v) { return expit(v); });
  return eta;
}

namespace {

double linear_predictor(const Eigen::VectorXd& theta, const Eigen::VectorXd& x) {
  return theta(0) + theta.tail(x.size()).dot(x);
}

Eigen::VectorXd augmented(const Eigen::VectorXd& x) {
  Eigen::VectorXd xt(x.size() + 1);
  xt << 1.0, x;
  return xt;
}

}  // namespace

double unit_loss(Family family, const Eigen::VectorXd& theta, const Eigen::VectorXd& x, double y) {
  const double eta = linear_predictor(theta, x);
  if (family == Family::gaussian) return 0.5 * (y - eta) * (y - eta);
  return log1p_exp(eta) - y * eta;
}

Eigen::VectorXd unit_gradient(Family family, const Eigen::VectorXd& theta,
                              const Eigen::VectorXd& x, double y) {
  const double eta = linear_predictor(theta, x);
  const double mean = family == Family::gaussian ? eta : expit(eta);
  return (mean - y) * augmented(x);
}

Eigen::MatrixXd unit_hessian(Family family, const Eigen::VectorXd& theta,
                             const Eigen::VectorXd& x) {
  const Eigen::VectorXd xt = augmented(x);
  double w = 1.0;
  if (family == Family::binomial) {
    const double mu = expit(linear_predictor(theta, x));
    w = mu * (1.0 - mu);
  }
  return w * xt * xt.transpose();
}

double unit_loss(const GlmFit& fit, const Eigen::VectorXd& x, double y) {
  return unit_loss(fit.family, fit.coefficients, x, y);
}

Eigen::VectorXd unit_gradient(const GlmFit& fit, const Eigen::VectorXd& x, double y) {
  return unit_gradient(fit.family, fit.coefficients, x, y);
}

Eigen::MatrixXd gradient_matrix(const GlmFit& fit, const Eigen::MatrixXd& x,
                                const Eigen::VectorXd& y) {
  const Eigen::VectorXd residual = predict_mean(fit, x) - y;
  return residual.asDiagonal() * with_intercept(x);
}

Eigen::VectorXd unit_losses(Family family, const Eigen::VectorXd& theta, const Eigen::MatrixXd& x,
                            const Eigen::VectorXd& y) {
  Eigen::VectorXd eta = x * theta.tail(x.cols());
  eta.array() += theta(0);
  Eigen::VectorXd out(y.size());
  for (Index i = 0; i < y.size(); ++i) {
    out(i) = family == Family::gaussian ? 0.5 * (y(i) - eta(i)) * (y(i) - eta(i))
                                        : log1p_exp(eta(i)) - y(i) * eta(i);
  }
  return out;
}

Eigen::MatrixXd avg_hessian(const GlmFit& fit, const Eigen::MatrixXd& x) {
  const Eigen::MatrixXd design = with_intercept(x);
  Eigen::VectorXd w = Eigen::VectorXd::Ones(x.rows());
  if (fit.family == Family::binomial) {
    const Eigen::VectorXd mu = predict_mean(fit, x);
    w = (mu.array() * (1.0 - mu.array())).matrix();
  }
  Eigen::MatrixXd h = design.transpose() * w.asDiagonal() * design;
  h /= static_cast<double>(x.rows());
  return 0.5 * (h + h.transpose());
}

double minus_two_log_likelihood(const GlmFit& fit, Index n) {
  if (fit.family == Family::binomial) return fit.deviance;
  const double nd = static_cast<double>(n);
  const double rss = std::max(fit.deviance, 1e-300);
  return nd * (std::log(2.0 * std::numbers::pi * rss / nd) + 1.0);
}

double aic(const GlmFit& fit, Index n) {
  // Gaussian models also estimate the residual variance.
  const double params = static_cast<double>(fit.coefficients.size()) +
                        (fit.family == Family::gaussian ? 1.0 : 0.0);
  return minus_two_log_likelihood(fit, n) + 2.0 * params;
}

}  // namespace ecborrow
