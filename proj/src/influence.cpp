#include "ecborrow/influence.hpp"

#include <algorithm>
#include <numeric>

namespace ecborrow {

namespace {

Eigen::LLT<Eigen::MatrixXd> factorize_hessian(Eigen::MatrixXd h) {
  const double dim = static_cast<double>(h.rows());
  const double scale = h.trace() / dim;
  if (!h.allFinite() || !(scale > 0.0)) {
    throw Error(ErrorCode::SingularHessian, "Hessian has non-positive or non-finite trace");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(h, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < 1e-10 * scale) {
    h.diagonal().array() += 1e-8 * scale;
  }
  Eigen::LLT<Eigen::MatrixXd> llt(h);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::SingularHessian, "Hessian not positive definite after jitter");
  }
  return llt;
}

}  // namespace

std::vector<Index> rank_ascending(const Eigen::VectorXd& scores) {
  std::vector<Index> order(static_cast<std::size_t>(scores.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return scores(a) < scores(b); });
  return order;
}

InfluenceScores compute_influences(const GlmFit& fit, const EcDataset& rct_controls,
                                   const EcDataset& ec) {
  if (rct_controls.cols() != fit.covariates() || ec.cols() != fit.covariates()) {
    throw Error(ErrorCode::ShapeMismatch, "influence inputs do not match the model covariates");
  }
  const Eigen::MatrixXd control_grad = gradient_matrix(fit, rct_controls.x, rct_controls.y);
  const auto llt = factorize_hessian(avg_hessian(fit, rct_controls.x));
  const Eigen::MatrixXd ec_grad = gradient_matrix(fit, ec.x, ec.y);
  // Column j of `solved` is H^{-1} grad L(z_j).
  const Eigen::MatrixXd solved = llt.solve(ec_grad.transpose());

  InfluenceScores out;
  out.scores = (control_grad * solved).cwiseAbs().colwise().sum().transpose();
  out.ranking = rank_ascending(out.scores);
  return out;
}

double exact_influence(const GlmFit& fit, const EcDataset& rct_controls, const Eigen::VectorXd& z_x,
                       double z_y) {
  const Index n = rct_controls.rows();
  Eigen::MatrixXd x(n + 1, rct_controls.cols());
  x << rct_controls.x, z_x.transpose();
  Eigen::VectorXd y(n + 1);
  y << rct_controls.y, z_y;
  const GlmFit refit = fit_glm(x, y, fit.family);
  const Eigen::VectorXd before = unit_losses(fit.family, fit.coefficients, rct_controls.x, rct_controls.y);
  const Eigen::VectorXd after = unit_losses(fit.family, refit.coefficients, rct_controls.x, rct_controls.y);
  return (after - before).cwiseAbs().sum();
}

CsvTable influence_table(const InfluenceScores& influences) {
  CsvTable table;
  table.header = {"ec_index", "score", "rank"};
  std::vector<Index> rank_of(influences.ranking.size());
  for (std::size_t r = 0; r < influences.ranking.size(); ++r) {
    rank_of[static_cast<std::size_t>(influences.ranking[r])] = static_cast<Index>(r);
  }
  for (Index i = 0; i < influences.size(); ++i) {
    table.rows.push_back({std::to_string(i), format_number(influences.scores(i)),
                          std::to_string(rank_of[static_cast<std::size_t>(i)])});
  }
  return table;
}

}  // namespace ecborrow
