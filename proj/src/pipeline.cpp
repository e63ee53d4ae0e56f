#include "ecborrow/pipeline.hpp"

#include <algorithm>
#include <cmath>

#include "ecborrow/aic.hpp"

namespace ecborrow {

namespace {

template <class Fn>
auto stage(const char* name, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Error& e) {
    throw Error(e.code(), std::string("stage `") + name + "` failed: " + e.what());
  }
}

EstimatorRow make_row(std::string name, const EstimateReport& report, double reference, Index k) {
  EstimatorRow row;
  row.name = std::move(name);
  row.estimate = report.estimate;
  row.se = report.se;
  row.bias = report.estimate - reference;
  row.mse = row.bias * row.bias + row.se * row.se;
  row.k_star = k;
  row.n_used = report.n_used;
  return row;
}

std::vector<std::string> pick_names(const std::vector<std::string>& names,
                                    const std::vector<Index>& columns) {
  std::vector<std::string> out;
  if (names.empty()) return out;
  for (Index c : columns) out.push_back(names[static_cast<std::size_t>(c)]);
  return out;
}

}  // namespace

std::string_view to_string(CalibrationMode mode) noexcept {
  switch (mode) {
    case CalibrationMode::off: return "off";
    case CalibrationMode::linear: return "linear";
    case CalibrationMode::kernel: return "kernel";
  }
  return "off";
}

CalibrationMode parse_calibration(std::string_view name) {
  if (name == "off") return CalibrationMode::off;
  if (name == "linear") return CalibrationMode::linear;
  if (name == "kernel") return CalibrationMode::kernel;
  throw Error(ErrorCode::InvalidArgument, "unknown calibration `" + std::string(name) + "`");
}

RctDataset select_columns(const RctDataset& rct, const std::vector<Index>& columns) {
  RctDataset out = rct;
  out.x = rct.x(Eigen::all, columns);
  out.covariate_names = pick_names(rct.covariate_names, columns);
  return out;
}

EcDataset select_columns(const EcDataset& ec, const std::vector<Index>& columns) {
  EcDataset out = ec;
  out.x = ec.x(Eigen::all, columns);
  out.covariate_names = pick_names(ec.covariate_names, columns);
  return out;
}

AicSelection select_covariates_by_arm(const RctDataset& rct, Family family) {
  std::vector<Index> treated_rows;
  std::vector<Index> control_rows;
  for (Index i = 0; i < rct.rows(); ++i) (rct.a(i) == 1.0 ? treated_rows : control_rows).push_back(i);
  if (treated_rows.empty() || control_rows.empty()) {
    throw Error(ErrorCode::ArmMissing, "AIC selection needs both arms");
  }
  AicSelection out;
  out.treated = select_covariates_aic(rct.x(treated_rows, Eigen::all), rct.y(treated_rows), family);
  out.control = select_covariates_aic(rct.x(control_rows, Eigen::all), rct.y(control_rows), family);
  out.united = out.treated;
  out.united.insert(out.united.end(), out.control.begin(), out.control.end());
  std::sort(out.united.begin(), out.united.end());
  out.united.erase(std::unique(out.united.begin(), out.united.end()), out.united.end());
  return out;
}

std::vector<EstimatorRow> PipelineResult::rows() const {
  std::vector<EstimatorRow> out;
  out.push_back(make_row("direct", rct.direct, reference, 0));
  out.push_back(make_row("aipw", rct.aipw, reference, 0));
  out.push_back(make_row("full", full, reference, influences.size()));
  out.push_back(make_row("aib", aib.report, reference, aib.k_star));
  if (caib) out.push_back(make_row("caib", caib->report, reference, caib->k_star));
  return out;
}

PipelineResult run_pipeline(const RctDataset& rct_in, const EcDataset& ec_in,
                            const PipelineConfig& config) {
  stage("validate", [&] { validate(rct_in, ec_in); });
  PipelineResult result;

  RctDataset rct = rct_in;
  EcDataset ec = ec_in;
  if (config.aic_select) {
    auto aic = stage("aic", [&] { return select_covariates_by_arm(rct_in, config.family); });
    result.aic_treated = aic.treated;
    result.aic_control = aic.control;
    result.covariates = aic.united;
    rct = select_columns(rct_in, result.covariates);
    ec = select_columns(ec_in, result.covariates);
  } else {
    for (Index j = 0; j < rct_in.cols(); ++j) result.covariates.push_back(j);
  }

  NuisanceOptions nuisance;
  nuisance.family = config.family;
  nuisance.trim = config.trim;
  nuisance.regressor = config.regressor;
  if (config.known_ps) nuisance.known_ps = *config.known_ps;

  result.rct = stage("rct-estimators", [&] { return estimate_rct(rct, nuisance); });
  result.reference_is_aipw = !config.reference.has_value();
  result.reference = config.reference.value_or(result.rct.aipw.estimate);
  if (!std::isfinite(result.reference)) {
    throw Error(ErrorCode::InvalidArgument, "reference value must be finite");
  }
  attach_reference(result.rct.direct, result.reference);
  attach_reference(result.rct.aipw, result.reference);

  const EcDataset controls = controls_only(rct);
  result.outcome_model =
      stage("outcome-model", [&] { return fit_glm(controls.x, controls.y, config.family); });
  result.influences =
      stage("influence", [&] { return compute_influences(result.outcome_model, controls, ec); });
  result.full = stage("full-borrowing",
                      [&] { return estimate_full(rct, ec, nuisance, result.reference); });

  SelectionOptions selection;
  selection.nuisance = nuisance;
  selection.threads = config.threads;
  const auto ks = config.k_vector.value_or(default_k_vector(ec.rows()));
  result.aib = stage("selection", [&] {
    return find_optimal_k(rct, ec, result.influences, result.reference, ks, selection);
  });

  if (config.sensitivity_delta >= 0) {
    const Index delta =
        config.sensitivity_delta > 0
            ? config.sensitivity_delta
            : std::max<Index>(1, std::llround(static_cast<double>(ec.rows()) / 10.0));
    result.sensitivity = stage("sensitivity", [&] {
      return sensitivity_sweep(rct, ec, result.influences, result.reference, result.aib.k_star,
                               delta, selection);
    });
  }

  if (config.calibration != CalibrationMode::off) {
    const BiasKind kind =
        config.calibration == CalibrationMode::linear ? BiasKind::linear : BiasKind::kernel;
    result.bias_model = stage("calibration", [&] { return fit_rlearner(rct, ec, kind); });
    result.calibrated_ec = calibrate_ec(ec, *result.bias_model);
    result.calibrated_influences = stage("calibrated-influence", [&] {
      return compute_influences(result.outcome_model, controls, *result.calibrated_ec);
    });
    auto calibrated_selection = selection;
    calibrated_selection.nuisance.family = Family::gaussian;
    result.caib = stage("calibrated-selection", [&] {
      return find_optimal_k(rct, *result.calibrated_ec, *result.calibrated_influences,
                            result.reference, ks, calibrated_selection);
    });
  }
  return result;
}

}  // namespace ecborrow
