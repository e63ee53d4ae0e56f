#pragma once

// Reference computations written independently of the library code paths.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <vector>

namespace oracle {

// Ranks 1..n with ties sharing their average rank.
inline std::vector<double> average_ranks(const std::vector<double>& v) {
  std::vector<std::size_t> idx(v.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
  std::vector<double> ranks(v.size());
  for (std::size_t i = 0; i < idx.size();) {
    std::size_t j = i;
    while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t t = i; t <= j; ++t) ranks[idx[t]] = avg;
    i = j + 1;
  }
  return ranks;
}

inline double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  return sab / std::sqrt(saa * sbb);
}

inline double spearman(const std::vector<double>& a, const std::vector<double>& b) {
  return pearson(average_ranks(a), average_ranks(b));
}

// Least squares with intercept through the normal equations.
inline Eigen::VectorXd ols(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  Eigen::MatrixXd d(x.rows(), x.cols() + 1);
  d.col(0).setOnes();
  d.rightCols(x.cols()) = x;
  return (d.transpose() * d).ldlt().solve(d.transpose() * y);
}

inline Eigen::VectorXd central_difference(const std::function<double(const Eigen::VectorXd&)>& f,
                                          const Eigen::VectorXd& at, double h = 1e-5) {
  Eigen::VectorXd g(at.size());
  for (Eigen::Index j = 0; j < at.size(); ++j) {
    Eigen::VectorXd up = at, down = at;
    up(j) += h;
    down(j) -= h;
    g(j) = (f(up) - f(down)) / (2.0 * h);
  }
  return g;
}

// (1/2) * int_0^2 [expit(x + 1) - expit(x - 1)] dx via the antiderivative log(1 + e^x).
inline double mech1_true_ate() {
  auto softplus = [](double t) { return std::log1p(std::exp(t)); };
  return 0.5 * ((softplus(3.0) - softplus(1.0)) - (softplus(1.0) - softplus(-1.0)));
}

inline double mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

inline double sd(const std::vector<double>& v) {
  const double m = mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

inline double mc_se(const std::vector<double>& v) { return sd(v) / std::sqrt(static_cast<double>(v.size())); }

// Test-side randomness, independent of the library generator.
struct Draws {
  std::mt19937_64 engine;
  explicit Draws(std::uint64_t seed) : engine(seed) {}
  double normal(double m = 0.0, double s = 1.0) { return std::normal_distribution<double>(m, s)(engine); }
  double uniform(double lo = 0.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(engine);
  }
  double bernoulli(double p) { return std::bernoulli_distribution(p)(engine) ? 1.0 : 0.0; }
  Eigen::MatrixXd normal_matrix(Eigen::Index r, Eigen::Index c) {
    Eigen::MatrixXd m(r, c);
    for (Eigen::Index j = 0; j < c; ++j)
      for (Eigen::Index i = 0; i < r; ++i) m(i, j) = normal();
    return m;
  }
};

inline double expit(double t) { return 1.0 / (1.0 + std::exp(-t)); }

}  // namespace oracle
