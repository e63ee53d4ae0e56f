#pragma once

#include <Eigen/Dense>

#include <vector>

#include "ecborrow/csv.hpp"
#include "ecborrow/data.hpp"
#include "ecborrow/glm.hpp"

namespace ecborrow {

struct InfluenceScores {
  Eigen::VectorXd scores;      // one per EC row, in input order
  std::vector<Index> ranking;  // EC rows by ascending score, ties by row index

  Index size() const { return scores.size(); }
};

// Stable ascending argsort.
std::vector<Index> rank_ascending(const Eigen::VectorXd& scores);

// First-order influence of each EC unit z on the outcome model fitted to the
// RCT controls:
//
//   score(z) = sum_{i in controls} | grad L(Z_i)^T H^{-1} grad L(z) |
//
// with H the mean per-unit Hessian over the controls. H is factorized once
// and reused for every EC. If its smallest eigenvalue is below
// 1e-10 * trace / dim, a ridge of 1e-8 * trace / dim is added; SingularHessian
// is thrown if the matrix is still not positive definite.
InfluenceScores compute_influences(const GlmFit& fit, const EcDataset& rct_controls,
                                   const EcDataset& ec);

// Brute-force counterpart: refit on controls plus z and sum the absolute
// changes of the control losses.
double exact_influence(const GlmFit& fit, const EcDataset& rct_controls, const Eigen::VectorXd& z_x,
                       double z_y);

// Columns ec_index,score,rank (rank 0 = most comparable).
CsvTable influence_table(const InfluenceScores& influences);

}  // namespace ecborrow
