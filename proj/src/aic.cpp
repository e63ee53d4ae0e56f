#include "ecborrow/aic.hpp"

#include <algorithm>
#include <limits>

namespace ecborrow {

namespace {

Eigen::MatrixXd columns(const Eigen::MatrixXd& x, const std::vector<Index>& cols) {
  Eigen::MatrixXd out(x.rows(), static_cast<Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) out.col(static_cast<Index>(j)) = x.col(cols[j]);
  return out;
}

double model_aic(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, Family family,
                 const std::vector<Index>& cols) {
  return aic(fit_glm(columns(x, cols), y, family), y.size());
}

}  // namespace

std::vector<Index> select_covariates_aic(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                         Family family) {
  std::vector<Index> selected;
  double current = model_aic(x, y, family, selected);
  while (true) {
    Index best_col = -1;
    double best_aic = current;
    for (Index j = 0; j < x.cols(); ++j) {
      if (std::find(selected.begin(), selected.end(), j) != selected.end()) continue;
      auto trial = selected;
      trial.push_back(j);
      double value = std::numeric_limits<double>::infinity();
      try {
        value = model_aic(x, y, family, trial);
      } catch (const Error&) {
        continue;  // singular or separated candidate: never selected
      }
      if (value < best_aic) {
        best_aic = value;
        best_col = j;
      }
    }
    if (best_col < 0) break;
    selected.push_back(best_col);
    current = best_aic;
  }
  return selected;
}

}  // namespace ecborrow
