#include "doctest.h"

#include <cmath>
#include <vector>

#include "ecborrow/calibration.hpp"
#include "ecborrow/simgen.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace ecborrow;

namespace {

using fixture::Pooled;

Pooled recovery_sample(Index n_each, std::uint64_t seed) { return fixture::calibration_sample(n_each, seed); }

}  // namespace

TEST_CASE("sampling score") {
  oracle::Draws d(1);
  const Index n = 2000;
  Eigen::MatrixXd x = d.normal_matrix(n, 1);
  Eigen::VectorXd r = Eigen::VectorXd::Zero(n);
  r.head(500).setOnes();
  const auto model = fit_sampling_score(x, r);
  CHECK(std::abs(model.fit.coefficients(1)) < 0.2);
  CHECK(model.fit.coefficients(0) == doctest::Approx(std::log(1.0 / 3.0)).epsilon(0.1));

  Eigen::MatrixXd extreme(3, 1);
  extreme << -1e6, 0.0, 1e6;
  const auto p = predict_sampling_score(model, extreme);
  CHECK((p.array() > 0.0).all());
  CHECK((p.array() < 1.0).all());

  try {
    fit_sampling_score(x, Eigen::VectorXd::Ones(n));
    FAIL("expected SourceMissing");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::SourceMissing);
  }
}

TEST_CASE("zero bias model leaves outcomes unchanged") {
  const auto data = generate({Mechanism::demo, 50, 40, 1});
  const auto cal = calibrate_ec(data.ec, BiasModel::zero(1));
  CHECK(cal.y == data.ec.y);
  CHECK(predict_bias(BiasModel::zero(1), data.ec.x).cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(predict_bias(BiasModel::zero(2), data.ec.x), Error);
}

TEST_CASE("linear fit solves the transformed normal equations") {
  const auto p = recovery_sample(300, 2);
  const auto model = fit_rlearner(p.x, p.r, p.y, BiasKind::linear);
  REQUIRE(model.sampling);
  REQUIRE(model.outcome);
  const auto& m = std::get<GlmFit>(*model.outcome);
  const Eigen::VectorXd w = predict_sampling_score(*model.sampling, p.x) - p.r;
  const Eigen::VectorXd resid = p.y - predict_mean(m, p.x);
  const Eigen::MatrixXd design = w.asDiagonal() * with_intercept(p.x);
  const Eigen::VectorXd normal = design.transpose() * (resid - design * model.coefficients);
  CHECK(normal.cwiseAbs().maxCoeff() < 1e-8 * static_cast<double>(p.x.rows()));
}

TEST_CASE("linear bias coefficients are recovered") {
  std::vector<double> b0, b1;
  for (std::uint64_t s = 0; s < 100; ++s) {
    const auto p = recovery_sample(250, 100 + s);
    const auto model = fit_rlearner(p.x, p.r, p.y, BiasKind::linear);
    b0.push_back(model.coefficients(0));
    b1.push_back(model.coefficients(1));
  }
  CHECK(std::abs(oracle::mean(b0) - 1.0) < 3.0 * oracle::mc_se(b0));
  CHECK(std::abs(oracle::mean(b1) - 0.5) < 3.0 * oracle::mc_se(b1));
}

TEST_CASE("linear bias estimate is consistent") {
  auto error = [](Index n_each) {
    double total = 0.0;
    for (std::uint64_t s = 0; s < 10; ++s) {
      const auto p = recovery_sample(n_each, 500 + s);
      const auto c = fit_rlearner(p.x, p.r, p.y, BiasKind::linear).coefficients;
      total += std::hypot(c(0) - 1.0, c(1) - 0.5);
    }
    return total / 10.0;
  };
  CHECK(error(2000) < error(250));
}

TEST_CASE("shifting every outcome leaves the bias unchanged") {
  auto p = recovery_sample(200, 3);
  const auto base = fit_rlearner(p.x, p.r, p.y, BiasKind::linear);
  p.y.array() += 4.0;
  const auto moved = fit_rlearner(p.x, p.r, p.y, BiasKind::linear);
  CHECK((moved.coefficients - base.coefficients).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("demo calibration aligns biased ECs with the RCT control law") {
  const auto data = generate({Mechanism::demo, 100, 200, 4});
  const auto model = fit_rlearner(data.rct, data.ec, BiasKind::linear);
  const auto cal = calibrate_ec(data.ec, model);
  double before = 0.0, after = 0.0;
  for (Index i = 20; i < data.ec.rows(); ++i) {
    const double truth = 1.0 + data.ec.x(i, 0);
    before += std::abs(data.ec.y(i) - truth);
    after += std::abs(cal.y(i) - truth);
  }
  CHECK(after < 0.4 * before);

  const auto rct_controls = controls_only(data.rct);
  const double target = rct_controls.y.mean();
  CHECK(std::abs(cal.y.mean() - target) < std::abs(data.ec.y.mean() - target));
}

TEST_CASE("bias estimate vanishes for exchangeable ECs") {
  auto norm = [](Index n_ec) {
    double total = 0.0;
    for (std::uint64_t s = 0; s < 20; ++s) {
      const auto d = generate({Mechanism::exchangeable, n_ec / 2, n_ec, 900 + s});
      total += fit_rlearner(d.rct, d.ec, BiasKind::linear).coefficients.norm();
    }
    return total / 20.0;
  };
  CHECK(norm(4000) < 0.5 * norm(500));
}

TEST_CASE("kernel bias model") {
  const auto data = generate({Mechanism::demo, 100, 400, 5});
  const auto model = fit_rlearner(data.rct, data.ec, BiasKind::kernel);
  CHECK(model.kind == BiasKind::kernel);
  REQUIRE(model.kernel);
  Eigen::MatrixXd grid(3, 1);
  grid << -1.0, 0.0, 1.0;
  const auto b = predict_bias(model, grid);
  for (Index i = 0; i < 3; ++i) {
    // 10% of the ECs are unbiased.
    CHECK(std::abs(b(i) - 0.9 * (2.0 + 0.5 * grid(i, 0))) < 0.5);
  }
}

TEST_CASE("binary EC outcomes become continuous after calibration") {
  const auto data = generate({Mechanism::mech1, 100, 200, 6});
  const auto cal = calibrate_ec(data.ec, fit_rlearner(data.rct, data.ec, BiasKind::linear));
  CHECK(cal.outcome_kind == OutcomeKind::continuous);
  CHECK(calibrate_ec(data.ec, BiasModel::zero(1)).outcome_kind == OutcomeKind::binary);
}
