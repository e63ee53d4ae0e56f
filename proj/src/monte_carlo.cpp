#include "ecborrow/monte_carlo.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "ecborrow/parallel.hpp"

namespace ecborrow {

namespace {

// Neumaier-compensated running sum.
class StableSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    comp_ += std::abs(sum_) >= std::abs(v) ? (sum_ - t) + v : (v - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

std::string fmt(double v) {
  std::ostringstream out;
  out.precision(4);
  out << v;
  return out.str();
}

}  // namespace

McConfig default_mc_config(Mechanism mechanism) {
  McConfig config;
  config.mechanism = mechanism;
  config.pipeline.calibration = CalibrationMode::linear;
  config.pipeline.sensitivity_delta = -1;
  switch (mechanism) {
    case Mechanism::mech1:
      config.n_rct = 100;
      config.n_ec = 400;
      config.pipeline.family = Family::binomial;
      break;
    case Mechanism::mech2:
      config.n_rct = 100;
      config.n_ec = 400;
      break;
    case Mechanism::demo:
      config.reference_true_ate = true;
      break;
    case Mechanism::exchangeable:
      break;
  }
  return config;
}

const McRow& McSummary::row(const std::string& estimator) const {
  for (const auto& r : rows) {
    if (r.estimator == estimator) return r;
  }
  throw Error(ErrorCode::InvalidArgument, "no Monte Carlo row for `" + estimator + "`");
}

CsvTable McSummary::table() const {
  CsvTable t;
  t.header = {"estimator", "estimate", "bias", "sd", "mse", "k_star"};
  for (const auto& r : rows) {
    t.rows.push_back({r.estimator, format_number(r.estimate), format_number(r.bias),
                      format_number(r.sd), format_number(r.mse), format_number(r.k_star)});
  }
  return t;
}

McSummary monte_carlo(const McConfig& config) {
  if (config.reps < 2) throw Error(ErrorCode::InvalidArgument, "Monte Carlo needs reps >= 2");
  McSummary summary;
  summary.mechanism = config.mechanism;
  summary.true_ate = true_ate(config.mechanism);
  summary.reps = config.reps;
  summary.estimators = {"direct", "aipw", "full", "aib"};
  if (config.pipeline.calibration != CalibrationMode::off) summary.estimators.push_back("caib");
  summary.replicates.resize(static_cast<std::size_t>(config.reps));

  auto pipeline = config.pipeline;
  pipeline.threads = 1;
  if (config.reference_true_ate) pipeline.reference = summary.true_ate;

  parallel_for(config.reps, config.threads, [&](Index r) {
    auto& rep = summary.replicates[static_cast<std::size_t>(r)];
    rep.seed = mix_seed(config.seed, static_cast<std::uint64_t>(r));
    try {
      const auto data = generate({config.mechanism, config.n_rct, config.n_ec, rep.seed});
      const auto result = run_pipeline(data.rct, data.ec, pipeline);
      for (const auto& row : result.rows()) {
        McDraw d;
        d.estimate = row.estimate;
        d.se = row.se;
        d.bias = row.estimate - summary.true_ate;
        d.mse = d.bias * d.bias + row.se * row.se;
        d.k_star = row.k_star;
        rep.draws.push_back(d);
      }
      rep.ok = true;
    } catch (const Error& e) {
      rep.error = e.what();
    }
  });

  std::vector<const McReplicate*> good;
  for (const auto& rep : summary.replicates) {
    if (rep.ok) good.push_back(&rep);
  }
  summary.failures = config.reps - static_cast<Index>(good.size());
  if (good.empty()) throw Error(ErrorCode::SelectionFailed, "every Monte Carlo replicate failed");

  const double m = static_cast<double>(good.size());
  for (std::size_t e = 0; e < summary.estimators.size(); ++e) {
    StableSum est, bias, mse, emp, se, k;
    for (const auto* rep : good) {
      const auto& d = rep->draws[e];
      est.add(d.estimate);
      bias.add(d.bias);
      mse.add(d.mse);
      emp.add(d.bias * d.bias);
      se.add(d.se);
      k.add(static_cast<double>(d.k_star));
    }
    McRow row;
    row.estimator = summary.estimators[e];
    row.estimate = est.value() / m;
    row.bias = bias.value() / m;
    row.mse = mse.value() / m;
    row.empirical_mse = emp.value() / m;
    row.mean_se = se.value() / m;
    row.k_star = k.value() / m;
    StableSum ss;
    for (const auto* rep : good) {
      const double dev = rep->draws[e].estimate - row.estimate;
      ss.add(dev * dev);
    }
    row.sd = good.size() > 1 ? std::sqrt(ss.value() / (m - 1.0)) : 0.0;
    row.mc_se = row.sd / std::sqrt(m);
    summary.rows.push_back(row);
  }
  return summary;
}

std::vector<AcceptanceCheck> evaluate_acceptance(const McSummary& s) {
  std::vector<AcceptanceCheck> checks;
  auto add = [&](std::string name, bool passed, std::string detail) {
    checks.push_back({std::move(name), passed, std::move(detail)});
  };
  auto has = [&](const char* name) {
    return std::find(s.estimators.begin(), s.estimators.end(), name) != s.estimators.end();
  };
  auto mse = [&](const char* name) { return s.row(name).mse; };

  const double success = 1.0 - static_cast<double>(s.failures) / static_cast<double>(s.reps);
  add("replicates succeed (>= 95%)", success >= 0.95,
      std::to_string(s.reps - s.failures) + "/" + std::to_string(s.reps));

  switch (s.mechanism) {
    case Mechanism::mech1: {
      const double fb = s.row("full").bias;
      add("full-borrow mean bias < -0.06", fb < -0.06, "bias " + fmt(fb));
      add("mse(aib) < mse(aipw)", mse("aib") < mse("aipw"),
          fmt(mse("aib")) + " vs " + fmt(mse("aipw")));
      add("mse(aib) < mse(full)", mse("aib") < mse("full"),
          fmt(mse("aib")) + " vs " + fmt(mse("full")));
      break;
    }
    case Mechanism::mech2: {
      const double fb = s.row("full").bias;
      add("full-borrow mean bias in [0.5, 1.0]", fb >= 0.5 && fb <= 1.0, "bias " + fmt(fb));
      add("mse(aib) < mse(aipw)", mse("aib") < mse("aipw"),
          fmt(mse("aib")) + " vs " + fmt(mse("aipw")));
      add("mse(aib) < mse(full)", mse("aib") < mse("full"),
          fmt(mse("aib")) + " vs " + fmt(mse("full")));
      if (has("caib")) {
        add("mse(caib) <= 1.1 * mse(aib)", mse("caib") <= 1.1 * mse("aib"),
            fmt(mse("caib")) + " vs " + fmt(1.1 * mse("aib")));
      } else {
        add("mse(caib) <= 1.1 * mse(aib)", false, "calibration disabled");
      }
      break;
    }
    case Mechanism::exchangeable: {
      for (const auto& row : s.rows) {
        add("|mean bias| < 3 MC-SE (" + row.estimator + ")",
            std::abs(row.bias) < 3.0 * row.mc_se,
            "bias " + fmt(row.bias) + ", 3 MC-SE " + fmt(3.0 * row.mc_se));
      }
      add("mean se(aib) <= mean se(aipw)", s.row("aib").mean_se <= s.row("aipw").mean_se,
          fmt(s.row("aib").mean_se) + " vs " + fmt(s.row("aipw").mean_se));
      break;
    }
    case Mechanism::demo: {
      if (!has("caib")) {
        add("demo ordering", false, "calibration disabled");
        break;
      }
      const auto idx = [&](const char* name) {
        return static_cast<std::size_t>(
            std::find(s.estimators.begin(), s.estimators.end(), name) - s.estimators.begin());
      };
      Index ordered = 0;
      Index counted = 0;
      for (const auto& rep : s.replicates) {
        if (!rep.ok) continue;
        ++counted;
        const double caib = rep.draws[idx("caib")].mse;
        const double aib = rep.draws[idx("aib")].mse;
        const double floor = std::min(rep.draws[idx("full")].mse, rep.draws[idx("aipw")].mse);
        const double direct = rep.draws[idx("direct")].mse;
        if (caib < aib && aib < floor && floor < direct) ++ordered;
      }
      const double frac = static_cast<double>(ordered) / static_cast<double>(std::max<Index>(counted, 1));
      add("per-replicate ordering caib < aib < min(full, aipw) < direct in >= 70%", frac >= 0.70,
          fmt(100.0 * frac) + "%");
      add("mean mse(caib) < mean mse(aib)", mse("caib") < mse("aib"),
          fmt(mse("caib")) + " vs " + fmt(mse("aib")));
      add("mean mse(aib) < mean mse(full)", mse("aib") < mse("full"),
          fmt(mse("aib")) + " vs " + fmt(mse("full")));
      add("mean mse(aib) < mean mse(aipw)", mse("aib") < mse("aipw"),
          fmt(mse("aib")) + " vs " + fmt(mse("aipw")));
      const double floor = std::min(mse("full"), mse("aipw"));
      add("min(mean mse(full), mean mse(aipw)) < mean mse(direct)", floor < mse("direct"),
          fmt(floor) + " vs " + fmt(mse("direct")));
      break;
    }
  }
  return checks;
}

}  // namespace ecborrow
