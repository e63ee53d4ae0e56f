#pragma once

#include <Eigen/Dense>

#include "ecborrow/data.hpp"
#include "ecborrow/glm.hpp"
#include "oracles.hpp"

namespace fixture {

using ecborrow::EcDataset;
using ecborrow::Index;
using ecborrow::RctDataset;

// Linear-gaussian RCT: Y = 1 + X b - A + N(0, noise^2), A alternating 0/1.
inline RctDataset linear_rct(Index n, Index p, std::uint64_t seed, double noise = 0.5) {
  oracle::Draws d(seed);
  RctDataset rct;
  rct.x = d.normal_matrix(n, p);
  rct.a.resize(n);
  rct.y.resize(n);
  for (Index i = 0; i < n; ++i) {
    rct.a(i) = static_cast<double>(i % 2);
    rct.y(i) = 1.0 + rct.x.row(i).sum() - rct.a(i) + d.normal(0.0, noise);
  }
  return rct;
}

inline EcDataset linear_ec(Index n, Index p, std::uint64_t seed, double shift = 0.0, double noise = 0.5) {
  oracle::Draws d(seed);
  EcDataset ec;
  ec.x = d.normal_matrix(n, p);
  ec.y.resize(n);
  for (Index i = 0; i < n; ++i) ec.y(i) = 1.0 + ec.x.row(i).sum() + shift + d.normal(0.0, noise);
  return ec;
}

// Controls follow the working model; 20 ECs carry shifts of varying size so
// the influence ranking is not dominated by noise.
struct Instance {
  EcDataset controls;
  EcDataset ec;
  ecborrow::GlmFit fit;
};

inline Instance influence_instance(ecborrow::Family family, std::uint64_t seed, Index n, Index p) {
  using ecborrow::Family;
  oracle::Draws d(seed);
  Instance in;
  in.controls.x = d.normal_matrix(n, p);
  in.controls.y.resize(n);
  in.ec.x = d.normal_matrix(20, p);
  in.ec.y.resize(20);
  for (Index i = 0; i < n; ++i) {
    const double eta = 0.3 + 0.8 * in.controls.x.row(i).sum();
    in.controls.y(i) = family == Family::gaussian ? eta + d.normal() : d.bernoulli(oracle::expit(eta));
  }
  for (Index i = 0; i < 20; ++i) {
    const double eta = 0.3 + 0.8 * in.ec.x.row(i).sum() + d.uniform(-3.0, 3.0);
    in.ec.y(i) = family == Family::gaussian ? eta + d.normal() : d.bernoulli(oracle::expit(eta));
  }
  in.fit = ecborrow::fit_glm(in.controls.x, in.controls.y, family);
  return in;
}

// Pooled controls for the bias learner. RCT controls: X ~ N(0, 1),
// Y = 1 + X + e. ECs: X ~ N(0.3, 1) with the additive bias 1 + 0.5 X, so
// b(x) = 1 + 0.5 x and the logistic sampling score is correctly specified.
struct Pooled {
  Eigen::MatrixXd x;
  Eigen::VectorXd r;
  Eigen::VectorXd y;
};

inline Pooled calibration_sample(Index n_each, std::uint64_t seed) {
  oracle::Draws d(seed);
  const Index n = 2 * n_each;
  Pooled p{Eigen::MatrixXd(n, 1), Eigen::VectorXd(n), Eigen::VectorXd(n)};
  for (Index i = 0; i < n; ++i) {
    const bool rct = i < n_each;
    const double x = d.normal(rct ? 0.0 : 0.3, 1.0);
    p.x(i, 0) = x;
    p.r(i) = rct ? 1.0 : 0.0;
    p.y(i) = 1.0 + x + (rct ? 0.0 : 1.0 + 0.5 * x) + d.normal(0.0, 0.5);
  }
  return p;
}

}  // namespace fixture
