// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "ecborrow/monte_carlo.hpp"
#include "ecborrow/parallel.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace ecborrow;

namespace {

struct Outcome {
  bool passed = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      passed = false;
      detail += (detail.empty() ? "" : "; ") + std::string("failed: ") + what;
    }
  }
  void note(const std::string& what) { detail += (detail.empty() ? "" : "; ") + what; }
};

std::string fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

// 1. Influence approximation fidelity.
Outcome influence_fidelity() {
  Outcome out;
  double worst = 1.0;
  for (int i = 0; i < 20; ++i) {
    const bool gaussian = i < 10;
    const auto family = gaussian ? Family::gaussian : Family::binomial;
    const Index p = 1 + i % 3;
    const auto in = fixture::influence_instance(family, 1000 + static_cast<std::uint64_t>(i),
                                                gaussian ? 50 : 80, p);
    const auto approx = compute_influences(in.fit, in.controls, in.ec);
    std::vector<double> a(approx.scores.data(), approx.scores.data() + approx.size());
    std::vector<double> e;
    for (Index j = 0; j < in.ec.rows(); ++j) {
      e.push_back(exact_influence(in.fit, in.controls, in.ec.x.row(j).transpose(), in.ec.y(j)));
    }
    const double rho = oracle::spearman(a, e);
    worst = std::min(worst, rho);
    out.require(rho >= 0.95, "instance " + std::to_string(i) + " spearman " + fmt(rho));
  }
  out.note("min spearman " + fmt(worst));
  return out;
}

// 2. GLM correctness.
Outcome glm_correctness() {
  Outcome out;
  oracle::Draws d(2);
  const Eigen::MatrixXd x = d.normal_matrix(200, 3);
  Eigen::VectorXd y(200);
  for (Index i = 0; i < 200; ++i) y(i) = 0.5 + x.row(i).sum() + d.normal();
  const auto fit = fit_glm(x, y, Family::gaussian);
  const double ols_err = (fit.coefficients - oracle::ols(x, y)).cwiseAbs().maxCoeff();
  out.require(ols_err < 1e-10, "OLS gap " + fmt(ols_err));

  double worst = 0.0;
  for (auto family : {Family::gaussian, Family::binomial}) {
    for (int k = 0; k < 100; ++k) {
      const Eigen::VectorXd theta = d.normal_matrix(4, 1).col(0);
      const Eigen::VectorXd xi = d.normal_matrix(3, 1).col(0);
      const double yi = family == Family::gaussian ? d.normal() : d.bernoulli(0.5);
      const auto g = unit_gradient(family, theta, xi, yi);
      const auto fd = oracle::central_difference(
          [&](const Eigen::VectorXd& t) { return unit_loss(family, t, xi, yi); }, theta);
      const double rel = (g - fd).norm() / std::max(1.0, fd.norm());
      worst = std::max(worst, rel);
    }
  }
  out.require(worst < 1e-6, "gradient relative error " + fmt(worst));
  out.note("OLS gap " + fmt(ols_err) + ", max gradient error " + fmt(worst));
  return out;
}

// 3. AIPW identities and double robustness.
Outcome aipw_identities() {
  Outcome out;
  const auto rct = fixture::linear_rct(200, 2, 3);
  EcDataset none;
  none.x.resize(0, 2);
  none.y.resize(0);
  const auto pooled = combine(rct, none);
  const auto a = estimate_aipw(pooled, fit_nuisances(pooled, {}));
  const auto b = estimate_rct(rct, {}).aipw;
  out.require(a.estimate == b.estimate && a.se == b.se, "combine(rct, empty) differs from RCT-only");

  // Mechanism-2 RCT law (linear in X, effect 3) with known propensity 0.5 and
  // an intercept-only outcome model.
  const Index reps = 2000;
  const Index n = 500;
  std::vector<double> bias(static_cast<std::size_t>(reps));
  parallel_for(reps, default_thread_count(), [&](Index r) {
    const auto g = generate({Mechanism::mech2, n, 20, 50000 + static_cast<std::uint64_t>(r)});
    CombinedDataset data = combine(g.rct);
    data.x.resize(n, 0);
    NuisanceOptions opt;
    opt.known_ps = 0.5;
    bias[static_cast<std::size_t>(r)] = estimate_aipw(data, fit_nuisances(data, opt)).estimate - g.true_ate;
  });
  const double mb = oracle::mean(bias);
  out.require(std::abs(mb) < 0.02, "mean bias " + fmt(mb));
  out.note("mean bias " + fmt(mb) + " (MC-SE " + fmt(oracle::mc_se(bias)) + ")");
  return out;
}

Outcome mechanism(Mechanism m) {
  auto config = default_mc_config(m);
  config.reps = 200;
  config.threads = default_thread_count();
  const auto summary = monte_carlo(config);
  Outcome out;
  for (const auto& check : evaluate_acceptance(summary)) {
    out.require(check.passed, check.name + " (" + check.detail + ")");
    if (check.passed) out.note(check.name + " (" + check.detail + ")");
  }
  return out;
}

// 6. Calibration recovery.
Outcome calibration_recovery() {
  Outcome out;
  const Index reps = 200;
  std::vector<double> b0(static_cast<std::size_t>(reps)), b1(static_cast<std::size_t>(reps));
  parallel_for(reps, default_thread_count(), [&](Index r) {
    const auto p = fixture::calibration_sample(500, 70000 + static_cast<std::uint64_t>(r));
    const auto model = fit_rlearner(p.x, p.r, p.y, BiasKind::linear);
    b0[static_cast<std::size_t>(r)] = model.coefficients(0);
    b1[static_cast<std::size_t>(r)] = model.coefficients(1);
  });
  const double m0 = oracle::mean(b0), m1 = oracle::mean(b1);
  const double s0 = oracle::mc_se(b0), s1 = oracle::mc_se(b1);
  out.require(std::abs(m0 - 1.0) < 3.0 * s0, "intercept " + fmt(m0));
  out.require(std::abs(m1 - 0.5) < 3.0 * s1, "slope " + fmt(m1));
  out.note("beta (" + fmt(m0) + ", " + fmt(m1) + "), MC-SE (" + fmt(s0) + ", " + fmt(s1) + ")");
  return out;
}

// 8. Selection identities.
Outcome selection_identities() {
  Outcome out;
  const auto d = generate({Mechanism::demo, 100, 200, 8});
  PipelineConfig cfg;
  cfg.k_vector = std::vector<Index>{0};
  cfg.sensitivity_delta = -1;
  const auto only0 = run_pipeline(d.rct, d.ec, cfg);
  out.require(only0.aib.k_star == 0, "k* != 0 for k_vector {0}");
  out.require(only0.aib.report.estimate == only0.rct.aipw.estimate &&
                  only0.aib.report.se == only0.rct.aipw.se,
              "k = 0 report differs from the RCT-only AIPW");

  cfg.k_vector.reset();
  const auto full = run_pipeline(d.rct, d.ec, cfg);
  double worst = 0.0;
  for (const auto& row : full.aib.grid.rows) {
    worst = std::max(worst, std::abs(row.mse - (row.bias * row.bias + row.variance)));
  }
  out.require(worst <= 1e-12, "grid identity gap " + fmt(worst));

  KGrid tie;
  tie.rows = {{0, 0, 0, 0, 3.0, std::nullopt},
              {10, 0, 0, 0, 1.0, std::nullopt},
              {20, 0, 0, 0, 1.0, std::nullopt},
              {30, 0, 0, 0, 1.0, std::nullopt}};
  out.require(tie.rows[argmin_mse(tie)].top_k == 10, "tie not resolved to the smallest k");
  out.note("grid identity gap " + fmt(worst));
  return out;
}

struct Criterion {
  int id;
  std::string name;
  std::function<Outcome()> run;
  std::optional<double> limit_seconds;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "influence approximation fidelity", influence_fidelity, 5.0},
      {2, "GLM correctness", glm_correctness, std::nullopt},
      {3, "AIPW identities and double robustness", aipw_identities, 60.0},
      {4, "mechanism 1 reproduction", [] { return mechanism(Mechanism::mech1); }, 600.0},
      {5, "mechanism 2 reproduction", [] { return mechanism(Mechanism::mech2); }, 900.0},
      {6, "calibration recovery", calibration_recovery, std::nullopt},
      {7, "exchangeable-EC sanity", [] { return mechanism(Mechanism::exchangeable); }, std::nullopt},
      {8, "selection identities", selection_identities, std::nullopt},
      {9, "demo ordering", [] { return mechanism(Mechanism::demo); }, std::nullopt},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out.passed = false;
      out.detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.limit_seconds && secs >= *c.limit_seconds) {
      out.passed = false;
      out.note("runtime " + fmt(secs) + " s exceeds " + fmt(*c.limit_seconds) + " s");
    }
    if (!out.passed) ++failed;
    std::printf("%s criterion %d: %s [%.2f s] %s\n", out.passed ? "PASS" : "FAIL", c.id,
                c.name.c_str(), secs, out.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
