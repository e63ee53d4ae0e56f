#pragma once

#include <cstdint>
#include <random>
#include <string_view>

#include "ecborrow/data.hpp"

namespace ecborrow {

// Seedable generator built on std::mt19937_64, whose output sequence is fixed
// by the C++ standard. Uniforms take the top 53 bits; normals use the
// Marsaglia polar method. Draws are therefore identical across standard
// libraries, unlike the std:: distributions.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform();  // [0, 1)
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double normal(double mean = 0.0, double sd = 1.0);
  double bernoulli(double p) { return uniform() < p ? 1.0 : 0.0; }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

// splitmix64 finalizer; used to derive independent per-replicate seeds.
std::uint64_t mix_seed(std::uint64_t master, std::uint64_t stream) noexcept;

enum class Mechanism { demo, mech1, mech2, exchangeable };

std::string_view to_string(Mechanism mechanism) noexcept;
Mechanism parse_mechanism(std::string_view name);

struct MechanismSpec {
  Mechanism kind = Mechanism::demo;
  Index n_rct = 100;
  Index n_ec = 200;
  std::uint64_t seed = 1;
};

struct GeneratedData {
  RctDataset rct;
  EcDataset ec;
  double true_ate = 0.0;
};

// Binary outcome, one covariate. X ~ U(0,2) over the pooled sample with the
// last 20 draws in [1.8, 2.0] (they fall in the EC tail). RCT:
// P(Y(a) = 1) = expit(x - 1 + 2a), A ~ Bern(0.5). EC:
// P(Y = 1) = expit(x - 1 + 2.5 (x - 1)^2), last 20 EC outcomes forced to 1.
GeneratedData gen_mech1(Index n_rct, Index n_ec, std::uint64_t seed);

// Continuous outcome, two covariates on U(0,2)^2 with 20 corner points in
// [1.8, 2]^2 at the EC tail. RCT: Y(0) = 2 X1 + 2 X2 + e, Y(1) = Y(0) + 3,
// e ~ N(0, 0.5^2). EC: Y = -2 + 4 X1 + 2 X2 + 2 (X1 - 1)^3 + e, last 20
// outcomes forced to -5.
GeneratedData gen_mech2(Index n_rct, Index n_ec, std::uint64_t seed);

// X ~ N(0,1). RCT: Y = 1 + X - A + e, e ~ N(0, 0.5^2), A ~ Bern(0.5).
// EC: the first round(0.1 n_ec) rows follow the RCT control law; the rest
// carry an additive bias 2 + 0.5 X.
GeneratedData gen_demo(Index n_rct, Index n_ec, std::uint64_t seed);

// Demo RCT law with every EC drawn from the RCT control law.
GeneratedData gen_exchangeable(Index n_rct, Index n_ec, std::uint64_t seed);

GeneratedData generate(const MechanismSpec& spec);

// mech1 by adaptive Simpson quadrature of (1/2) int_0^2 expit(x+1) - expit(x-1) dx.
double true_ate(Mechanism mechanism);

// Adaptive Simpson on [a, b] to absolute tolerance `tol`.
template <class F>
double adaptive_simpson(F&& f, double a, double b, double tol);

}  // namespace ecborrow

#include "ecborrow/detail/quadrature.ipp"
