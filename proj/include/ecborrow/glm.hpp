#pragma once

#include <Eigen/Dense>

#include <string_view>
#include <vector>

#include "ecborrow/data.hpp"

namespace ecborrow {

enum class Family { gaussian, binomial };

std::string_view to_string(Family family) noexcept;
Family parse_family(std::string_view name);

struct GlmOptions {
  double tolerance = 1e-8;  // relative deviance change
  int max_iterations = 100;
  double separation_threshold = 30.0;  // max |coefficient| before declaring separation
};

struct GlmFit {
  Eigen::VectorXd coefficients;  // intercept first
  Family family = Family::gaussian;
  bool converged = false;
  int iterations = 0;
  double deviance = 0.0;            // 2 * sum of unit losses
  double condition_estimate = 0.0;  // of the (weighted) normal matrix
  std::vector<double> deviance_history;  // deviance after each iteration

  Index covariates() const { return coefficients.size() - 1; }
};

double expit(double eta) noexcept;
// log(1 + exp(eta)) without overflow.
double log1p_exp(double eta) noexcept;

Eigen::MatrixXd with_intercept(const Eigen::MatrixXd& x);

// Gaussian-identity: least squares via column-pivoted QR.
// Binomial-logit: IRLS with step halving on deviance increase.
// Throws TooFewRows (rows < p + 2), SingularDesign, Nonconvergence,
// PerfectSeparation, NonBinaryOutcome.
GlmFit fit_glm(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, Family family,
               const GlmOptions& options = {});

Eigen::VectorXd predict_link(const GlmFit& fit, const Eigen::MatrixXd& x);
Eigen::VectorXd predict_mean(const GlmFit& fit, const Eigen::MatrixXd& x);

// Per-unit negative log-likelihood and its derivatives in the coefficients.
// `x` excludes the intercept. Gaussian loss is half the squared residual.
double unit_loss(Family family, const Eigen::VectorXd& theta, const Eigen::VectorXd& x, double y);
Eigen::VectorXd unit_gradient(Family family, const Eigen::VectorXd& theta,
                              const Eigen::VectorXd& x, double y);
Eigen::MatrixXd unit_hessian(Family family, const Eigen::VectorXd& theta,
                             const Eigen::VectorXd& x);

double unit_loss(const GlmFit& fit, const Eigen::VectorXd& x, double y);
Eigen::VectorXd unit_gradient(const GlmFit& fit, const Eigen::VectorXd& x, double y);

// Row i holds the loss gradient of unit i.
Eigen::MatrixXd gradient_matrix(const GlmFit& fit, const Eigen::MatrixXd& x,
                                const Eigen::VectorXd& y);
Eigen::VectorXd unit_losses(Family family, const Eigen::VectorXd& theta, const Eigen::MatrixXd& x,
                            const Eigen::VectorXd& y);

// Mean of the per-unit Hessians over the rows of `x`.
Eigen::MatrixXd avg_hessian(const GlmFit& fit, const Eigen::MatrixXd& x);

// -2 log-likelihood of the fitted model on its training data.
double minus_two_log_likelihood(const GlmFit& fit, Index n);
double aic(const GlmFit& fit, Index n);

}  // namespace ecborrow
