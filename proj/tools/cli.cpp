#include "cli.hpp"

#include <charconv>
#include <cmath>
#include <iostream>

#include "CLI11.hpp"
#include "ecborrow/csv.hpp"
#include "ecborrow/parallel.hpp"

namespace ecborrow::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

Index parse_index(std::string_view text, const std::string& spec) {
  Index value = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || value < 0) {
    throw Error(ErrorCode::InvalidArgument, "bad k-vector `" + spec + "`");
  }
  return value;
}

std::vector<std::string_view> split(std::string_view text, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= text.size(); ++i) {
    if (i == text.size() || text[i] == sep) {
      out.push_back(text.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create `" + dir.string() + "`: " + ec.message());
}

void write_json(const fs::path& path, const json& doc) { write_text(path, doc.dump(2) + "\n"); }

json names_of(const std::vector<Index>& columns, const std::vector<std::string>& names) {
  json out = json::array();
  for (Index c : columns) {
    out.push_back(names.empty() ? "x" + std::to_string(c + 1) : names[static_cast<std::size_t>(c)]);
  }
  return out;
}

json selection_json(const OptimalSelection& sel) {
  return {{"k_star", sel.k_star},
          {"estimate", sel.report.estimate},
          {"se", sel.report.se},
          {"selected_ec_indices", sel.selected_ec_indices}};
}

std::vector<double> to_vector(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

}  // namespace

std::optional<std::vector<Index>> parse_k_vector(const std::string& spec) {
  if (spec == "auto") return std::nullopt;
  std::vector<Index> out;
  if (spec.find(':') != std::string::npos) {
    const auto parts = split(spec, ':');
    if (parts.size() < 2 || parts.size() > 3) {
      throw Error(ErrorCode::InvalidArgument, "bad k-vector range `" + spec + "`");
    }
    const Index start = parse_index(parts[0], spec);
    const Index stop = parse_index(parts[1], spec);
    const Index step = parts.size() == 3 ? parse_index(parts[2], spec) : 1;
    if (step == 0 || stop < start) {
      throw Error(ErrorCode::InvalidArgument, "bad k-vector range `" + spec + "`");
    }
    for (Index k = start; k <= stop; k += step) out.push_back(k);
    return out;
  }
  for (auto part : split(spec, ',')) out.push_back(parse_index(part, spec));
  return out;
}

std::optional<double> parse_reference(const std::string& spec) {
  if (spec == "aipw") return std::nullopt;
  double value = 0.0;
  const auto* end = spec.data() + spec.size();
  const auto [ptr, ec] = std::from_chars(spec.data(), end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
    throw Error(ErrorCode::InvalidArgument, "reference must be `aipw` or a finite number, got `" + spec + "`");
  }
  return value;
}

Regressor parse_regressor(const std::string& name) {
  if (name == "glm") return Regressor::glm;
  if (name == "kernel") return Regressor::kernel_ridge;
  throw Error(ErrorCode::InvalidArgument, "unknown regressor `" + name + "`");
}

GeneratedData cmd_generate(const GenerateRequest& request) {
  auto data = generate({request.mechanism, request.n_rct, request.n_ec, request.seed});
  ensure_dir(request.out_dir);
  write_rct_csv(request.out_dir / "rct.csv", data.rct);
  write_ec_csv(request.out_dir / "ec.csv", data.ec);
  write_json(request.out_dir / "meta.json", {{"mechanism", to_string(request.mechanism)},
                                             {"n_rct", request.n_rct},
                                             {"n_ec", request.n_ec},
                                             {"seed", request.seed},
                                             {"true_ate", data.true_ate}});
  return data;
}

json report_json(const PipelineResult& result, const AnalysisConfig& config, const RctDataset& rct,
                 const EcDataset& ec) {
  json rows = json::array();
  for (const auto& row : result.rows()) {
    rows.push_back({{"estimator", row.name},
                    {"estimate", row.estimate},
                    {"bias", row.bias},
                    {"sd", row.se},
                    {"mse", row.mse},
                    {"k_star", row.k_star},
                    {"n_used", row.n_used}});
  }
  json doc = {
      {"schema_version", 1},
      {"config",
       {{"rct", config.rct_csv.string()},
        {"ec", config.ec_csv.string()},
        {"family", to_string(result.outcome_model.family)},
        {"trim", config.trim},
        {"k_vector", config.k_vector},
        {"reference", config.reference},
        {"calibration", to_string(config.calibration)},
        {"known_ps", config.known_ps ? json(*config.known_ps) : json(nullptr)},
        {"regressor", config.regressor == Regressor::glm ? "glm" : "kernel"},
        {"aic", config.aic_select},
        {"seed", config.seed}}},
      {"n_rct", rct.rows()},
      {"n_ec", ec.rows()},
      {"reference", {{"value", result.reference}, {"source", result.reference_is_aipw ? "aipw" : "user"}}},
      {"covariates", names_of(result.covariates, rct.covariate_names)},
      {"estimators", rows},
      {"outcome_model",
       {{"family", to_string(result.outcome_model.family)},
        {"coefficients", to_vector(result.outcome_model.coefficients)},
        {"converged", result.outcome_model.converged},
        {"iterations", result.outcome_model.iterations}}},
      {"aib", selection_json(result.aib)},
  };
  if (config.aic_select) {
    doc["aic"] = {{"treated", names_of(result.aic_treated, rct.covariate_names)},
                  {"control", names_of(result.aic_control, rct.covariate_names)}};
  }
  if (result.caib) doc["caib"] = selection_json(*result.caib);
  if (result.bias_model) {
    json bias = {{"kind", to_string(result.bias_model->kind)}};
    if (result.bias_model->kind == BiasKind::linear) {
      bias["coefficients"] = to_vector(result.bias_model->coefficients);
    } else if (result.bias_model->kernel) {
      bias["lambda"] = result.bias_model->kernel->lambda;
      bias["sigma2"] = result.bias_model->kernel->sigma2;
    }
    doc["bias_model"] = bias;
  }
  return doc;
}

PipelineResult cmd_analyze(const AnalysisConfig& config) {
  const RctDataset rct = read_rct_csv(config.rct_csv);
  const EcDataset ec = read_ec_csv(config.ec_csv);

  PipelineConfig pipeline;
  pipeline.family = config.family.value_or(
      rct.outcome_kind == OutcomeKind::binary ? Family::binomial : Family::gaussian);
  if (!(config.trim > 0.0 && config.trim < 0.5)) {
    throw Error(ErrorCode::InvalidArgument, "trim must lie in (0, 0.5)");
  }
  pipeline.trim = config.trim;
  pipeline.k_vector = parse_k_vector(config.k_vector);
  pipeline.reference = parse_reference(config.reference);
  pipeline.calibration = config.calibration;
  pipeline.known_ps = config.known_ps;
  pipeline.regressor = config.regressor;
  pipeline.aic_select = config.aic_select;
  pipeline.threads = config.threads;

  auto result = run_pipeline(rct, ec, pipeline);

  ensure_dir(config.out_dir);
  write_json(config.out_dir / "report.json", report_json(result, config, rct, ec));
  write_text(config.out_dir / "mse_curve.csv", format_csv(result.aib.grid.table()));
  write_text(config.out_dir / "influences.csv", format_csv(influence_table(result.influences)));
  write_text(config.out_dir / "sensitivity.csv",
             format_csv(result.sensitivity ? result.sensitivity->table() : KGrid{}.table()));
  if (result.calibrated_ec) {
    write_ec_csv(config.out_dir / "calibrated_ec.csv", *result.calibrated_ec);
    write_text(config.out_dir / "mse_curve_calibrated.csv", format_csv(result.caib->grid.table()));
  }
  return result;
}

json acceptance_json(const McSummary& summary) {
  json checks = json::array();
  bool all = true;
  for (const auto& check : evaluate_acceptance(summary)) {
    checks.push_back({{"name", check.name}, {"passed", check.passed}, {"detail", check.detail}});
    all = all && check.passed;
  }
  return {{"mechanism", to_string(summary.mechanism)},
          {"reps", summary.reps},
          {"failures", summary.failures},
          {"true_ate", summary.true_ate},
          {"passed", all},
          {"checks", checks}};
}

McSummary cmd_mc(const McRequest& request) {
  McConfig config = default_mc_config(request.mechanism);
  config.reps = request.reps;
  config.seed = request.seed;
  config.threads = request.threads;
  if (request.n_rct) config.n_rct = *request.n_rct;
  if (request.n_ec) config.n_ec = *request.n_ec;
  if (request.calibration) config.pipeline.calibration = *request.calibration;
  if (request.reference) {
    if (*request.reference == "truth") {
      config.reference_true_ate = true;
    } else if (*request.reference == "aipw") {
      config.reference_true_ate = false;
    } else {
      throw Error(ErrorCode::InvalidArgument, "mc reference must be `aipw` or `truth`");
    }
  }
  auto summary = monte_carlo(config);
  ensure_dir(request.out_dir);
  write_text(request.out_dir / "mc_summary.csv", format_csv(summary.table()));
  write_json(request.out_dir / "acceptance.json", acceptance_json(summary));
  return summary;
}

json cmd_aic(const fs::path& rct_csv, std::optional<Family> family) {
  const RctDataset rct = read_rct_csv(rct_csv);
  validate(rct);
  const Family f =
      family.value_or(rct.outcome_kind == OutcomeKind::binary ? Family::binomial : Family::gaussian);
  const auto sel = select_covariates_by_arm(rct, f);
  return {{"family", to_string(f)},
          {"treated", names_of(sel.treated, rct.covariate_names)},
          {"control", names_of(sel.control, rct.covariate_names)},
          {"union", names_of(sel.united, rct.covariate_names)},
          {"union_indices", sel.united}};
}

int run(int argc, char** argv) {
  CLI::App app{"Influence-based borrowing of external controls for RCT treatment effects"};
  app.require_subcommand(1);
  app.set_config("--config", "", "TOML or INI file with option values; command-line flags win");

  const std::vector<std::string> families{"gaussian", "binomial"};
  const std::vector<std::string> mechanisms{"demo", "mech1", "mech2", "exchangeable"};
  const std::vector<std::string> calibrations{"off", "linear", "kernel"};

  auto* gen = app.add_subcommand("generate", "Simulate an RCT and an EC sample");
  std::string gen_mech = "demo";
  GenerateRequest gen_req;
  gen->add_option("--mech", gen_mech, "Mechanism")->check(CLI::IsMember(mechanisms))->capture_default_str();
  gen->add_option("--n-rct", gen_req.n_rct, "RCT size")->capture_default_str();
  gen->add_option("--n-ec", gen_req.n_ec, "EC size")->capture_default_str();
  gen->add_option("--seed", gen_req.seed, "Seed")->capture_default_str();
  gen->add_option("--out", gen_req.out_dir, "Output directory")->capture_default_str();

  auto* analyze = app.add_subcommand("analyze", "Run AIB (and CAIB) on an RCT and EC file");
  AnalysisConfig an;
  std::string an_family;
  std::string an_calibration = "off";
  std::string an_regressor = "glm";
  analyze->add_option("--rct", an.rct_csv, "RCT CSV (covariates, a, y)")->required();
  analyze->add_option("--ec", an.ec_csv, "EC CSV (covariates, y)")->required();
  analyze->add_option("--family", an_family, "Outcome family (default: from the RCT outcome)")
      ->check(CLI::IsMember(families));
  analyze->add_option("--trim", an.trim, "Propensity trimming")->capture_default_str();
  analyze->add_option("--k-vector", an.k_vector, "k grid: auto | 0,5,10 | start:stop[:step]")
      ->capture_default_str();
  analyze->add_option("--reference", an.reference, "aipw or a numeric reference value")
      ->capture_default_str();
  analyze->add_option("--calibration", an_calibration, "Outcome calibration")
      ->check(CLI::IsMember(calibrations))
      ->capture_default_str();
  analyze->add_option("--known-ps", an.known_ps, "Known RCT propensity score");
  analyze->add_option("--regressor", an_regressor, "Outcome regressions: glm or kernel")
      ->check(CLI::IsMember({"glm", "kernel"}))
      ->capture_default_str();
  analyze->add_flag("--aic", an.aic_select, "Per-arm forward AIC covariate selection");
  analyze->add_option("--seed", an.seed, "Seed (recorded in the report)")->capture_default_str();
  analyze->add_option("--out", an.out_dir, "Output directory")->capture_default_str();

  auto* mc = app.add_subcommand("mc", "Monte Carlo study of a simulation mechanism");
  std::string mc_mech = "demo";
  std::string mc_calibration;
  std::string mc_reference;
  Index mc_n_rct = 0;
  Index mc_n_ec = 0;
  McRequest mc_req;
  mc->add_option("--mech", mc_mech, "Mechanism")->check(CLI::IsMember(mechanisms))->capture_default_str();
  mc->add_option("--reps", mc_req.reps, "Replicates")->capture_default_str();
  mc->add_option("--n-rct", mc_n_rct, "RCT size (mechanism default when omitted)");
  mc->add_option("--n-ec", mc_n_ec, "EC size (mechanism default when omitted)");
  mc->add_option("--seed", mc_req.seed, "Master seed")->capture_default_str();
  mc->add_option("--calibration", mc_calibration, "Outcome calibration")->check(CLI::IsMember(calibrations));
  mc->add_option("--reference", mc_reference, "Selection reference: aipw or truth")
      ->check(CLI::IsMember({"aipw", "truth"}));
  mc->add_option("--out", mc_req.out_dir, "Output directory")->capture_default_str();

  auto* aic_cmd = app.add_subcommand("aic", "Per-arm forward AIC covariate selection");
  fs::path aic_rct;
  std::string aic_family;
  fs::path aic_out;
  aic_cmd->add_option("--rct", aic_rct, "RCT CSV")->required();
  aic_cmd->add_option("--family", aic_family, "Outcome family")->check(CLI::IsMember(families));
  aic_cmd->add_option("--out", aic_out, "Write the JSON here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  const unsigned threads = default_thread_count();
  try {
    if (*gen) {
      gen_req.mechanism = parse_mechanism(gen_mech);
      const auto data = cmd_generate(gen_req);
      std::cout << "wrote " << (gen_req.out_dir / "rct.csv").string() << ", "
                << (gen_req.out_dir / "ec.csv").string() << " (true ATE " << data.true_ate << ")\n";
    } else if (*analyze) {
      if (!an_family.empty()) an.family = parse_family(an_family);
      an.calibration = parse_calibration(an_calibration);
      an.regressor = parse_regressor(an_regressor);
      an.threads = threads;
      const auto result = cmd_analyze(an);
      for (const auto& row : result.rows()) {
        std::cout << row.name << ": estimate " << row.estimate << ", sd " << row.se << ", mse "
                  << row.mse << ", k* " << row.k_star << "\n";
      }
    } else if (*mc) {
      mc_req.mechanism = parse_mechanism(mc_mech);
      if (mc_n_rct > 0) mc_req.n_rct = mc_n_rct;
      if (mc_n_ec > 0) mc_req.n_ec = mc_n_ec;
      if (!mc_calibration.empty()) mc_req.calibration = parse_calibration(mc_calibration);
      if (!mc_reference.empty()) mc_req.reference = mc_reference;
      mc_req.threads = threads;
      const auto summary = cmd_mc(mc_req);
      std::cout << format_csv(summary.table());
      for (const auto& check : evaluate_acceptance(summary)) {
        std::cout << (check.passed ? "PASS " : "FAIL ") << check.name << " (" << check.detail << ")\n";
      }
    } else if (*aic_cmd) {
      const auto doc = cmd_aic(aic_rct, aic_family.empty() ? std::nullopt
                                                           : std::optional(parse_family(aic_family)));
      if (aic_out.empty()) {
        std::cout << doc.dump(2) << "\n";
      } else {
        write_json(aic_out, doc);
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace ecborrow::cli
