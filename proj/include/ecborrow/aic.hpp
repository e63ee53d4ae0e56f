#pragma once

#include <Eigen/Dense>

#include <vector>

#include "ecborrow/glm.hpp"

namespace ecborrow {

// Forward stepwise covariate selection by AIC (-2 log-likelihood + 2 * params).
// Starts from the intercept-only model and greedily adds the column with the
// lowest AIC until no addition lowers it. Ties go to the earlier column.
// Returns selected column indices in the order they were added.
std::vector<Index> select_covariates_aic(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                                         Family family);

}  // namespace ecborrow
