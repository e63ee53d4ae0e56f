#include "doctest.h"

#include <vector>

#include "ecborrow/estimators.hpp"
#include "ecborrow/simgen.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace ecborrow;

namespace {

template <class Fn>
ErrorCode code_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an Error");
  return ErrorCode::InvalidArgument;
}

// Confounded RCT-like sample: P(A = 1 | x) = expit(0.5 x), Y = x^2 + A + noise.
// A linear outcome model is wrong here while the logistic propensity is right.
RctDataset confounded(Index n, std::uint64_t seed) {
  oracle::Draws d(seed);
  RctDataset rct;
  rct.x = d.normal_matrix(n, 1);
  rct.a.resize(n);
  rct.y.resize(n);
  for (Index i = 0; i < n; ++i) {
    const double x = rct.x(i, 0);
    rct.a(i) = d.bernoulli(oracle::expit(0.5 * x));
    rct.y(i) = x * x + rct.a(i) + d.normal(0.0, 0.5);
  }
  return rct;
}

}  // namespace

TEST_CASE("direct estimator") {
  RctDataset rct;
  rct.x = Eigen::MatrixXd::Zero(4, 1);
  rct.a = Eigen::Vector4d(1, 1, 0, 0);
  rct.y = Eigen::Vector4d(1, 1, 0, 0);
  const auto r = estimate_direct(rct);
  CHECK(r.estimate == 1.0);
  CHECK(r.se == 0.0);
  CHECK(r.n_used == 4);

  rct.y = Eigen::Vector4d(3, 1, 2, 0);
  const auto s = estimate_direct(rct);
  CHECK(s.estimate == doctest::Approx(1.0));
  CHECK(s.se == doctest::Approx(std::sqrt(2.0 / 2 + 2.0 / 2)));

  rct.a.setZero();
  CHECK(code_of([&] { estimate_direct(rct); }) == ErrorCode::ArmMissing);
}

TEST_CASE("propensity handling") {
  const auto rct = fixture::linear_rct(60, 2, 1);
  const auto data = combine(rct);
  NuisanceOptions opt;
  opt.known_ps = 0.5;
  CHECK((fit_nuisances(data, opt).ps_hat.array() == 0.5).all());

  opt.known_ps = 0.001;
  CHECK((fit_nuisances(data, opt).ps_hat.array() == 0.01).all());

  opt.known_ps = Eigen::VectorXd::Constant(3, 0.5);
  CHECK(code_of([&] { fit_nuisances(data, opt); }) == ErrorCode::ShapeMismatch);
  opt.known_ps = 1.0;
  CHECK(code_of([&] { fit_nuisances(data, opt); }) == ErrorCode::InvalidArgument);
  opt.known_ps.reset();
  opt.trim = 0.5;
  CHECK(code_of([&] { fit_nuisances(data, opt); }) == ErrorCode::InvalidArgument);

  // Fitted logistic propensity converges to the truth.
  const auto big = confounded(4000, 2);
  const auto fitted = fit_nuisances(combine(big), {}).ps_hat;
  double err = 0.0;
  for (Index i = 0; i < big.rows(); ++i) err += std::abs(fitted(i) - oracle::expit(0.5 * big.x(i, 0)));
  CHECK(err / static_cast<double>(big.rows()) < 0.03);
}

TEST_CASE("AIPW is exact on a noiseless linear model") {
  auto rct = fixture::linear_rct(40, 2, 3, 0.0);
  const auto r = estimate_rct(rct, {});
  CHECK(r.aipw.estimate == doctest::Approx(-1.0).epsilon(1e-10));
  CHECK(r.aipw.se < 1e-10);
}

TEST_CASE("AIPW identities") {
  const auto rct = fixture::linear_rct(80, 2, 4);
  const auto data = combine(rct);
  NuisanceOptions opt;
  opt.known_ps = 0.5;
  const auto nu = fit_nuisances(data, opt);
  const auto r = estimate_aipw(data, nu, -1.0);
  const std::vector<double> phi(r.phi.data(), r.phi.data() + r.phi.size());
  CHECK(r.estimate == doctest::Approx(oracle::mean(phi)).epsilon(1e-12));
  const double var = oracle::sd(phi) * oracle::sd(phi);
  CHECK(r.se * r.se * static_cast<double>(phi.size()) == doctest::Approx(var).epsilon(1e-12));
  CHECK(*r.bias == doctest::Approx(r.estimate + 1.0));
  CHECK(*r.mse == doctest::Approx(*r.bias * *r.bias + r.se * r.se));

  // Formula check against the nuisances.
  for (Index i = 0; i < data.rows(); ++i) {
    const double a = data.a(i), y = data.y(i);
    const double want = a * (y - nu.mu1_hat(i)) / 0.5 - (1 - a) * (y - nu.mu0_hat(i)) / 0.5 +
                        nu.mu1_hat(i) - nu.mu0_hat(i);
    CHECK(r.phi(i) == doctest::Approx(want).epsilon(1e-12));
  }

  NuisanceEstimates bad = nu;
  bad.mu0_hat.conservativeResize(3);
  CHECK(code_of([&] { estimate_aipw(data, bad); }) == ErrorCode::ShapeMismatch);
}

TEST_CASE("empty EC reduces to the RCT-only AIPW") {
  const auto rct = fixture::linear_rct(80, 2, 5);
  EcDataset none;
  none.x.resize(0, 2);
  none.y.resize(0);
  const auto pooled = estimate_aipw(combine(rct, none), fit_nuisances(combine(rct, none), {}));
  const auto alone = estimate_rct(rct, {}).aipw;
  CHECK(pooled.estimate == doctest::Approx(alone.estimate).epsilon(1e-12));
  CHECK(pooled.se == doctest::Approx(alone.se).epsilon(1e-12));
}

TEST_CASE("translation equivariance") {
  auto rct = fixture::linear_rct(80, 2, 6);
  const auto base = estimate_rct(rct, {});
  rct.y.array() += 7.5;
  const auto moved = estimate_rct(rct, {});
  CHECK(moved.aipw.estimate == doctest::Approx(base.aipw.estimate).epsilon(1e-9));
  CHECK(moved.aipw.se == doctest::Approx(base.aipw.se).epsilon(1e-9));
  CHECK(moved.direct.estimate == doctest::Approx(base.direct.estimate).epsilon(1e-9));
}

TEST_CASE("full borrowing is AIPW on the pooled sample") {
  const auto rct = fixture::linear_rct(80, 2, 7);
  const auto ec = fixture::linear_ec(50, 2, 8, 0.4);
  NuisanceOptions opt;
  opt.known_ps = 0.5;  // must be ignored on the pooled sample
  const auto full = estimate_full(rct, ec, opt, -1.0);
  const auto data = combine(rct, ec);
  const auto want = estimate_aipw(data, fit_nuisances(data, {}), -1.0);
  CHECK(full.estimate == doctest::Approx(want.estimate).epsilon(1e-12));
  CHECK(full.se == doctest::Approx(want.se).epsilon(1e-12));
  CHECK(full.n_used == 130);
  CHECK(*full.mse == doctest::Approx(*full.bias * *full.bias + full.se * full.se));
}

TEST_CASE("double robustness with a misspecified outcome model") {
  std::vector<double> est;
  for (std::uint64_t s = 0; s < 200; ++s) {
    est.push_back(estimate_rct(confounded(500, 100 + s), {}).aipw.estimate);
  }
  CHECK(std::abs(oracle::mean(est) - 1.0) < 3.0 * oracle::mc_se(est));
}

TEST_CASE("direct estimator is unbiased on mech2") {
  std::vector<double> est;
  for (std::uint64_t s = 0; s < 200; ++s) {
    est.push_back(estimate_direct(generate({Mechanism::mech2, 100, 100, s}).rct).estimate);
  }
  CHECK(std::abs(oracle::mean(est) - 3.0) < 3.0 * oracle::mc_se(est));
}

TEST_CASE("full borrowing is unbiased with exchangeable ECs") {
  std::vector<double> est;
  for (std::uint64_t s = 0; s < 200; ++s) {
    const auto d = generate({Mechanism::exchangeable, 100, 200, s});
    est.push_back(estimate_full(d.rct, d.ec, {}, std::nullopt).estimate);
  }
  CHECK(std::abs(oracle::mean(est) + 1.0) < 3.0 * oracle::mc_se(est));
}

TEST_CASE("kernel ridge outcome regressor") {
  const auto rct = fixture::linear_rct(200, 1, 9);
  NuisanceOptions opt;
  opt.regressor = Regressor::kernel_ridge;
  const auto r = estimate_rct(rct, opt).aipw;
  CHECK(std::abs(r.estimate + 1.0) < 4.0 * r.se);
  CHECK(r.se > 0.0);
}
