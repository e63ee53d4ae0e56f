#include "ecborrow/kernel_ridge.hpp"

#include <cmath>
#include <limits>

namespace ecborrow {

namespace {

struct Standardized {
  Eigen::MatrixXd x;
  Eigen::RowVectorXd center;
  Eigen::RowVectorXd scale;
};

Standardized standardize(const Eigen::MatrixXd& x) {
  Standardized s;
  const double n = static_cast<double>(x.rows());
  s.center = x.colwise().mean();
  Eigen::MatrixXd centered = x.rowwise() - s.center;
  s.scale = (centered.colwise().squaredNorm() / std::max(n - 1.0, 1.0)).cwiseSqrt();
  for (Index j = 0; j < s.scale.size(); ++j) {
    if (!(s.scale(j) > 0.0)) s.scale(j) = 1.0;
  }
  s.x = centered.array().rowwise() / s.scale.array();
  return s;
}

void check_not_degenerate(const Eigen::MatrixXd& x) {
  if (x.rows() < 2) throw Error(ErrorCode::TooFewRows, "kernel ridge needs at least 2 rows");
  for (Index i = 1; i < x.rows(); ++i) {
    if (x.row(i) != x.row(0)) return;
  }
  throw Error(ErrorCode::DegenerateKernel, "all kernel inputs are identical");
}

struct RidgeSolution {
  Eigen::VectorXd coef;  // (M + lambda I)^{-1} t
  double lambda = 0.0;
  double loo_error = 0.0;
};

// One eigendecomposition of the symmetric PSD matrix M serves every lambda:
// the hat matrix is M (M + lambda I)^{-1} and leave-one-out residuals are
// (t_i - fitted_i) / (1 - hat_ii).
RidgeSolution solve_ridge_loo(const Eigen::MatrixXd& m, const Eigen::VectorXd& t,
                              const std::vector<double>& grid) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
  const Eigen::MatrixXd& q = eig.eigenvectors();
  const Eigen::VectorXd values = eig.eigenvalues().cwiseMax(0.0);
  const Eigen::VectorXd qt = q.transpose() * t;
  const Eigen::MatrixXd q2 = q.array().square();

  RidgeSolution best;
  best.loo_error = std::numeric_limits<double>::infinity();
  for (double lambda : grid) {
    const Eigen::VectorXd shrink = values.array() / (values.array() + lambda);
    const Eigen::VectorXd fitted = q * (shrink.array() * qt.array()).matrix();
    const Eigen::VectorXd hat_diag = q2 * shrink;
    double err = 0.0;
    for (Index i = 0; i < t.size(); ++i) {
      const double denom = std::max(1.0 - hat_diag(i), 1e-12);
      const double r = (t(i) - fitted(i)) / denom;
      err += r * r;
    }
    err /= static_cast<double>(t.size());
    if (err < best.loo_error) {
      best.loo_error = err;
      best.lambda = lambda;
    }
  }
  const Eigen::VectorXd inv = (values.array() + best.lambda).inverse();
  best.coef = q * (inv.array() * qt.array()).matrix();
  return best;
}

}  // namespace

Eigen::MatrixXd gaussian_kernel(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double sigma2) {
  const Eigen::VectorXd an = a.rowwise().squaredNorm();
  const Eigen::VectorXd bn = b.rowwise().squaredNorm();
  Eigen::MatrixXd d2 = -2.0 * a * b.transpose();
  d2.colwise() += an;
  d2.rowwise() += bn.transpose();
  return (-d2.cwiseMax(0.0) / sigma2).array().exp();
}

std::vector<double> default_lambda_grid(Index n) {
  std::vector<double> grid;
  for (int i = 0; i <= 16; ++i) {
    grid.push_back(std::pow(10.0, -6.0 + 0.5 * i) * static_cast<double>(n));
  }
  return grid;
}

KernelRidgeFit fit_kernel_ridge(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                const KernelRidgeOptions& options) {
  if (y.size() != x.rows()) throw Error(ErrorCode::ShapeMismatch, "kernel ridge: y length mismatch");
  check_not_degenerate(x);
  auto s = standardize(x);
  KernelRidgeFit fit;
  fit.sigma2 = options.sigma2.value_or(static_cast<double>(std::max<Index>(x.cols(), 1)));
  fit.y_offset = y.mean();
  const Eigen::VectorXd centered = y.array() - fit.y_offset;
  const Eigen::MatrixXd k = gaussian_kernel(s.x, s.x, fit.sigma2);
  const auto grid = options.lambda_grid.empty() ? default_lambda_grid(x.rows()) : options.lambda_grid;
  auto sol = solve_ridge_loo(k, centered, grid);
  fit.alpha = std::move(sol.coef);
  fit.lambda = sol.lambda;
  fit.loo_error = sol.loo_error;
  fit.train_x = std::move(s.x);
  fit.center = std::move(s.center);
  fit.scale = std::move(s.scale);
  return fit;
}

KernelRidgeFit fit_weighted_kernel_ridge(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                         const Eigen::VectorXd& w,
                                         const KernelRidgeOptions& options) {
  if (y.size() != x.rows() || w.size() != x.rows()) {
    throw Error(ErrorCode::ShapeMismatch, "weighted kernel ridge: length mismatch");
  }
  check_not_degenerate(x);
  auto s = standardize(x);
  KernelRidgeFit fit;
  fit.sigma2 = options.sigma2.value_or(static_cast<double>(std::max<Index>(x.cols(), 1)));
  const Eigen::MatrixXd k = gaussian_kernel(s.x, s.x, fit.sigma2);
  // With f = K alpha the fitted values are W K alpha; substituting
  // alpha = W beta turns the problem into ordinary ridge on M = W K W.
  const Eigen::MatrixXd m = w.asDiagonal() * k * w.asDiagonal();
  const auto grid = options.lambda_grid.empty() ? default_lambda_grid(x.rows()) : options.lambda_grid;
  auto sol = solve_ridge_loo(m, y, grid);
  fit.alpha = w.asDiagonal() * sol.coef;
  fit.lambda = sol.lambda;
  fit.loo_error = sol.loo_error;
  fit.train_x = std::move(s.x);
  fit.center = std::move(s.center);
  fit.scale = std::move(s.scale);
  return fit;
}

Eigen::VectorXd predict_kernel_ridge(const KernelRidgeFit& fit, const Eigen::MatrixXd& x) {
  if (x.cols() != fit.train_x.cols()) {
    throw Error(ErrorCode::ShapeMismatch, "kernel ridge: covariate count mismatch");
  }
  const Eigen::MatrixXd z = (x.rowwise() - fit.center).array().rowwise() / fit.scale.array();
  Eigen::VectorXd out = gaussian_kernel(z, fit.train_x, fit.sigma2) * fit.alpha;
  out.array() += fit.y_offset;
  return out;
}

}  // namespace ecborrow
