#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "ecborrow/monte_carlo.hpp"
#include "ecborrow/pipeline.hpp"
#include "ecborrow/simgen.hpp"

namespace ecborrow::cli {

struct AnalysisConfig {
  std::filesystem::path rct_csv;
  std::filesystem::path ec_csv;
  std::filesystem::path out_dir = ".";
  std::optional<Family> family;  // inferred from the RCT outcome when absent
  double trim = 0.01;
  std::string k_vector = "auto";   // list "0,5,10", range "start:stop[:step]", or "auto"
  std::string reference = "aipw";  // "aipw" or a finite number
  CalibrationMode calibration = CalibrationMode::off;
  std::optional<double> known_ps;
  Regressor regressor = Regressor::glm;
  bool aic_select = false;
  std::uint64_t seed = 1;
  unsigned threads = 1;
};

// nullopt for "auto". Values are checked against n_ec by the selection stage.
std::optional<std::vector<Index>> parse_k_vector(const std::string& spec);
// nullopt for "aipw".
std::optional<double> parse_reference(const std::string& spec);
Regressor parse_regressor(const std::string& name);

struct GenerateRequest {
  Mechanism mechanism = Mechanism::demo;
  Index n_rct = 100;
  Index n_ec = 200;
  std::uint64_t seed = 1;
  std::filesystem::path out_dir = ".";
};

// Writes rct.csv, ec.csv and meta.json.
GeneratedData cmd_generate(const GenerateRequest& request);

// Writes report.json, mse_curve.csv, influences.csv, sensitivity.csv and,
// with calibration, calibrated_ec.csv and mse_curve_calibrated.csv.
PipelineResult cmd_analyze(const AnalysisConfig& config);

nlohmann::ordered_json report_json(const PipelineResult& result, const AnalysisConfig& config,
                           const RctDataset& rct, const EcDataset& ec);

struct McRequest {
  Mechanism mechanism = Mechanism::demo;
  Index reps = 200;
  std::optional<Index> n_rct;
  std::optional<Index> n_ec;
  std::uint64_t seed = 2026;
  std::optional<CalibrationMode> calibration;
  std::optional<std::string> reference;  // "aipw" or "truth"
  std::filesystem::path out_dir = ".";
  unsigned threads = 1;
};

// Writes mc_summary.csv and acceptance.json.
McSummary cmd_mc(const McRequest& request);

nlohmann::ordered_json acceptance_json(const McSummary& summary);

// Per-arm forward AIC on the RCT and the union, as JSON with column names.
nlohmann::ordered_json cmd_aic(const std::filesystem::path& rct_csv, std::optional<Family> family);

// Entry point behind main(); returns the process exit code.
int run(int argc, char** argv);

}  // namespace ecborrow::cli
