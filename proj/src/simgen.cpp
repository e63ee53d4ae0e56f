#include "ecborrow/simgen.hpp"

#include <cmath>
#include <string>

#include "ecborrow/glm.hpp"

namespace ecborrow {

double Rng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double Rng::normal(double mean, double sd) {
  if (has_spare_) {
    has_spare_ = false;
    return mean + sd * spare_;
  }
  double u = 0.0;
  double v = 0.0;
  double s = 0.0;
  do {
    u = 2.0 * uniform() - 1.0;
    v = 2.0 * uniform() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double factor = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * factor;
  has_spare_ = true;
  return mean + sd * u * factor;
}

std::uint64_t mix_seed(std::uint64_t master, std::uint64_t stream) noexcept {
  std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::string_view to_string(Mechanism mechanism) noexcept {
  switch (mechanism) {
    case Mechanism::demo: return "demo";
    case Mechanism::mech1: return "mech1";
    case Mechanism::mech2: return "mech2";
    case Mechanism::exchangeable: return "exchangeable";
  }
  return "unknown";
}

Mechanism parse_mechanism(std::string_view name) {
  if (name == "demo") return Mechanism::demo;
  if (name == "mech1") return Mechanism::mech1;
  if (name == "mech2") return Mechanism::mech2;
  if (name == "exchangeable") return Mechanism::exchangeable;
  throw Error(ErrorCode::UnknownMechanism, "unknown mechanism `" + std::string(name) + "`");
}

namespace {

constexpr Index kOutliers = 20;

void require_outlier_block(Index n_rct, Index n_ec) {
  if (n_ec < kOutliers) {
    throw Error(ErrorCode::TooFewEcs, "mechanism needs at least 20 ECs, got " + std::to_string(n_ec));
  }
  if (n_rct < 4) throw Error(ErrorCode::InvalidArgument, "need at least 4 RCT units");
}

// Pooled covariate draws: n - 20 on [0, 2], then 20 on [1.8, 2].
Eigen::VectorXd pooled_uniform(Rng& rng, Index n) {
  Eigen::VectorXd x(n);
  for (Index i = 0; i < n - kOutliers; ++i) x(i) = rng.uniform(0.0, 2.0);
  for (Index i = n - kOutliers; i < n; ++i) x(i) = rng.uniform(1.8, 2.0);
  return x;
}

Eigen::VectorXd bernoulli_vector(Rng& rng, Index n, double p) {
  Eigen::VectorXd out(n);
  for (Index i = 0; i < n; ++i) out(i) = rng.bernoulli(p);
  return out;
}

// Both potential outcomes are drawn for every unit; the observed one is kept.
Eigen::VectorXd observed(const Eigen::VectorXd& a, const Eigen::VectorXd& y1,
                         const Eigen::VectorXd& y0) {
  return (a.array() * y1.array() + (1.0 - a.array()) * y0.array()).matrix();
}

std::vector<std::string> names(Index p) {
  std::vector<std::string> out;
  for (Index j = 0; j < p; ++j) out.push_back("x" + std::to_string(j + 1));
  return out;
}

}  // namespace

GeneratedData gen_mech1(Index n_rct, Index n_ec, std::uint64_t seed) {
  require_outlier_block(n_rct, n_ec);
  Rng rng(seed);
  const Index n = n_rct + n_ec;
  const Eigen::VectorXd x = pooled_uniform(rng, n);

  GeneratedData out;
  out.rct.x = x.head(n_rct);
  out.rct.a = bernoulli_vector(rng, n_rct, 0.5);
  Eigen::VectorXd y1(n_rct);
  Eigen::VectorXd y0(n_rct);
  for (Index i = 0; i < n_rct; ++i) y1(i) = rng.bernoulli(expit(x(i) + 1.0));
  for (Index i = 0; i < n_rct; ++i) y0(i) = rng.bernoulli(expit(x(i) - 1.0));
  out.rct.y = observed(out.rct.a, y1, y0);
  out.rct.outcome_kind = OutcomeKind::binary;
  out.rct.covariate_names = names(1);

  out.ec.x = x.tail(n_ec);
  out.ec.y.resize(n_ec);
  for (Index i = 0; i < n_ec; ++i) {
    const double xi = out.ec.x(i, 0);
    out.ec.y(i) = rng.bernoulli(expit(xi - 1.0 + 2.5 * (xi - 1.0) * (xi - 1.0)));
  }
  out.ec.y.tail(kOutliers).setOnes();
  out.ec.outcome_kind = OutcomeKind::binary;
  out.ec.covariate_names = names(1);
  out.true_ate = true_ate(Mechanism::mech1);
  return out;
}

GeneratedData gen_mech2(Index n_rct, Index n_ec, std::uint64_t seed) {
  require_outlier_block(n_rct, n_ec);
  Rng rng(seed);
  const Index n = n_rct + n_ec;
  const Eigen::VectorXd x1 = pooled_uniform(rng, n);
  const Eigen::VectorXd x2 = pooled_uniform(rng, n);

  GeneratedData out;
  out.rct.x.resize(n_rct, 2);
  out.rct.x << x1.head(n_rct), x2.head(n_rct);
  out.rct.a = bernoulli_vector(rng, n_rct, 0.5);
  Eigen::VectorXd y0(n_rct);
  for (Index i = 0; i < n_rct; ++i) y0(i) = 2.0 * x1(i) + 2.0 * x2(i) + rng.normal(0.0, 0.5);
  const Eigen::VectorXd y1 = y0.array() + 3.0;
  out.rct.y = observed(out.rct.a, y1, y0);
  out.rct.outcome_kind = OutcomeKind::continuous;
  out.rct.covariate_names = names(2);

  out.ec.x.resize(n_ec, 2);
  out.ec.x << x1.tail(n_ec), x2.tail(n_ec);
  out.ec.y.resize(n_ec);
  for (Index i = 0; i < n_ec; ++i) {
    const double a = out.ec.x(i, 0);
    const double b = out.ec.x(i, 1);
    out.ec.y(i) = -2.0 + 4.0 * a + 2.0 * b + 2.0 * std::pow(a - 1.0, 3) + rng.normal(0.0, 0.5);
  }
  out.ec.y.tail(kOutliers).setConstant(-5.0);
  out.ec.outcome_kind = OutcomeKind::continuous;
  out.ec.covariate_names = names(2);
  out.true_ate = 3.0;
  return out;
}

namespace {

GeneratedData gen_normal_linear(Index n_rct, Index n_ec, std::uint64_t seed, Index exchangeable) {
  if (n_rct < 10 || n_ec < 10) {
    throw Error(ErrorCode::InvalidArgument, "demo mechanisms need at least 10 RCT and 10 EC units");
  }
  Rng rng(seed);
  GeneratedData out;
  out.rct.x.resize(n_rct, 1);
  for (Index i = 0; i < n_rct; ++i) out.rct.x(i, 0) = rng.normal();
  out.rct.a = bernoulli_vector(rng, n_rct, 0.5);
  out.rct.y.resize(n_rct);
  for (Index i = 0; i < n_rct; ++i) {
    out.rct.y(i) = 1.0 + out.rct.x(i, 0) - out.rct.a(i) + rng.normal(0.0, 0.5);
  }
  out.rct.outcome_kind = OutcomeKind::continuous;
  out.rct.covariate_names = names(1);

  out.ec.x.resize(n_ec, 1);
  for (Index i = 0; i < n_ec; ++i) out.ec.x(i, 0) = rng.normal();
  out.ec.y.resize(n_ec);
  for (Index i = 0; i < n_ec; ++i) {
    const double x = out.ec.x(i, 0);
    const double bias = i < exchangeable ? 0.0 : 2.0 + 0.5 * x;
    out.ec.y(i) = 1.0 + x + bias + rng.normal(0.0, 0.5);
  }
  out.ec.outcome_kind = OutcomeKind::continuous;
  out.ec.covariate_names = names(1);
  out.true_ate = -1.0;
  return out;
}

}  // namespace

GeneratedData gen_demo(Index n_rct, Index n_ec, std::uint64_t seed) {
  return gen_normal_linear(n_rct, n_ec, seed, std::llround(0.1 * static_cast<double>(n_ec)));
}

GeneratedData gen_exchangeable(Index n_rct, Index n_ec, std::uint64_t seed) {
  return gen_normal_linear(n_rct, n_ec, seed, n_ec);
}

GeneratedData generate(const MechanismSpec& spec) {
  switch (spec.kind) {
    case Mechanism::demo: return gen_demo(spec.n_rct, spec.n_ec, spec.seed);
    case Mechanism::mech1: return gen_mech1(spec.n_rct, spec.n_ec, spec.seed);
    case Mechanism::mech2: return gen_mech2(spec.n_rct, spec.n_ec, spec.seed);
    case Mechanism::exchangeable: return gen_exchangeable(spec.n_rct, spec.n_ec, spec.seed);
  }
  throw Error(ErrorCode::UnknownMechanism, "unrecognized mechanism");
}

double true_ate(Mechanism mechanism) {
  switch (mechanism) {
    case Mechanism::mech1:
      return 0.5 * adaptive_simpson([](double x) { return expit(x + 1.0) - expit(x - 1.0); }, 0.0,
                                    2.0, 1e-10);
    case Mechanism::mech2: return 3.0;
    case Mechanism::demo:
    case Mechanism::exchangeable: return -1.0;
  }
  throw Error(ErrorCode::UnknownMechanism, "unrecognized mechanism");
}

}  // namespace ecborrow
