#pragma once

#include <Eigen/Dense>

#include <optional>
#include <vector>

#include "ecborrow/data.hpp"

namespace ecborrow {

struct KernelRidgeOptions {
  // Bandwidth in k(u, v) = exp(-||u - v||^2 / sigma2), on standardized inputs.
  // Defaults to the covariate count.
  std::optional<double> sigma2;
  // Candidate ridge penalties. Empty means 10^{-6, -5.5, ..., 2} * n.
  std::vector<double> lambda_grid;
};

struct KernelRidgeFit {
  Eigen::MatrixXd train_x;  // standardized
  Eigen::RowVectorXd center;
  Eigen::RowVectorXd scale;
  Eigen::VectorXd alpha;
  double sigma2 = 1.0;
  double lambda = 0.0;
  double y_offset = 0.0;
  double loo_error = 0.0;  // mean squared leave-one-out residual at the chosen lambda
};

Eigen::MatrixXd gaussian_kernel(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double sigma2);

std::vector<double> default_lambda_grid(Index n);

// Kernel ridge regression on centered y, lambda picked by exact
// leave-one-out error. Throws DegenerateKernel when every input row is equal.
KernelRidgeFit fit_kernel_ridge(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                const KernelRidgeOptions& options = {});

// Fits f in the kernel space minimizing sum (y_i - w_i f(x_i))^2 + lambda ||f||^2.
// No centering is applied to y. Used for the weighted residual problems of the
// R-learner.
KernelRidgeFit fit_weighted_kernel_ridge(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                         const Eigen::VectorXd& w,
                                         const KernelRidgeOptions& options = {});

Eigen::VectorXd predict_kernel_ridge(const KernelRidgeFit& fit, const Eigen::MatrixXd& x);

}  // namespace ecborrow
