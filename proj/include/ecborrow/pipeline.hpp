#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ecborrow/calibration.hpp"
#include "ecborrow/data.hpp"
#include "ecborrow/estimators.hpp"
#include "ecborrow/glm.hpp"
#include "ecborrow/influence.hpp"
#include "ecborrow/selection.hpp"

namespace ecborrow {

enum class CalibrationMode { off, linear, kernel };

std::string_view to_string(CalibrationMode mode) noexcept;
CalibrationMode parse_calibration(std::string_view name);

struct PipelineConfig {
  Family family = Family::gaussian;
  double trim = 0.01;
  std::optional<std::vector<Index>> k_vector;  // default_k_vector(n_ec) when absent
  std::optional<double> reference;             // RCT-only AIPW when absent
  CalibrationMode calibration = CalibrationMode::off;
  std::optional<double> known_ps;  // RCT propensity, used by the RCT-only AIPW
  Regressor regressor = Regressor::glm;
  bool aic_select = false;
  // Half-width of the sensitivity sweep around k*; 0 means max(1, round(n_ec / 10)),
  // negative disables the sweep.
  Index sensitivity_delta = 0;
  unsigned threads = 1;
};

struct EstimatorRow {
  std::string name;  // direct, aipw, full, aib, caib
  double estimate = 0.0;
  double se = 0.0;
  double bias = 0.0;  // estimate - reference
  double mse = 0.0;   // bias^2 + se^2
  Index k_star = 0;
  Index n_used = 0;
};

struct PipelineResult {
  double reference = 0.0;
  bool reference_is_aipw = true;
  std::vector<Index> covariates;  // columns used (all unless AIC selection ran)
  std::vector<Index> aic_treated;
  std::vector<Index> aic_control;
  GlmFit outcome_model;  // fitted on RCT controls
  RctEstimates rct;
  EstimateReport full;
  InfluenceScores influences;
  OptimalSelection aib;
  std::optional<KGrid> sensitivity;
  std::optional<BiasModel> bias_model;
  std::optional<EcDataset> calibrated_ec;
  std::optional<InfluenceScores> calibrated_influences;
  std::optional<OptimalSelection> caib;

  std::vector<EstimatorRow> rows() const;
};

// Runs: optional AIC covariate selection, optional outcome calibration,
// outcome model on RCT controls, influence scores, MSE-optimal subset
// selection, the RCT-only and full-borrowing comparators and the sensitivity
// sweep. Failures are rethrown with the failing stage named in the message.
//
// After calibration the outcome is continuous, so the calibrated selection
// always uses the gaussian family; its influence scores are computed against
// the original RCT-control model.
PipelineResult run_pipeline(const RctDataset& rct, const EcDataset& ec, const PipelineConfig& config);

// Per-arm AIC selection on the RCT; returns {treated, control, union}.
struct AicSelection {
  std::vector<Index> treated;
  std::vector<Index> control;
  std::vector<Index> united;  // sorted
};
AicSelection select_covariates_by_arm(const RctDataset& rct, Family family);

RctDataset select_columns(const RctDataset& rct, const std::vector<Index>& columns);
EcDataset select_columns(const EcDataset& ec, const std::vector<Index>& columns);

}  // namespace ecborrow
