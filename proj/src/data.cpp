#include "ecborrow/data.hpp"

#include <cmath>
#include <sstream>

namespace ecborrow {

namespace {

std::string summarize(const std::vector<Violation>& violations) {
  std::ostringstream out;
  out << violations.size() << " violation(s)";
  if (!violations.empty()) {
    const auto& v = violations.front();
    out << "; first: " << v.reason;
    if (v.row >= 0) out << " (row " << v.row;
    if (v.row >= 0 && v.column >= 0) out << ", column " << v.column;
    if (v.row >= 0) out << ")";
  }
  return out.str();
}

ErrorCode first_code(const std::vector<Violation>& violations) {
  return violations.empty() ? ErrorCode::InvalidArgument : violations.front().code;
}

void check_finite(const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                  std::vector<Violation>& out) {
  for (Index i = 0; i < x.rows(); ++i) {
    for (Index j = 0; j < x.cols(); ++j) {
      if (!std::isfinite(x(i, j))) {
        out.push_back({i, j, ErrorCode::NonFiniteValue, "non-finite covariate"});
      }
    }
    if (i < y.size() && !std::isfinite(y(i))) {
      out.push_back({i, x.cols(), ErrorCode::NonFiniteValue, "non-finite outcome"});
    }
  }
}

void check_binary_outcome(const Eigen::VectorXd& y, OutcomeKind kind, Index column,
                          std::vector<Violation>& out) {
  if (kind != OutcomeKind::binary) return;
  for (Index i = 0; i < y.size(); ++i) {
    if (std::isfinite(y(i)) && y(i) != 0.0 && y(i) != 1.0) {
      out.push_back({i, column, ErrorCode::NonBinaryOutcome, "binary outcome not in {0,1}"});
    }
  }
}

}  // namespace

Index CombinedDataset::rct_rows() const {
  return static_cast<Index>((r.array() == 1.0).count());
}

ValidationError::ValidationError(std::vector<Violation> violations)
    : Error(first_code(violations), summarize(violations)), violations_(std::move(violations)) {}

std::vector<Violation> find_violations(const RctDataset& rct) {
  std::vector<Violation> out;
  const Index n = rct.x.rows();
  if (rct.a.size() != n || rct.y.size() != n) {
    out.push_back({-1, -1, ErrorCode::ShapeMismatch,
                   "treatment/outcome length differs from covariate rows"});
    return out;
  }
  check_finite(rct.x, rct.y, out);
  Index treated = 0;
  Index controls = 0;
  for (Index i = 0; i < n; ++i) {
    if (rct.a(i) == 1.0) {
      ++treated;
    } else if (rct.a(i) == 0.0) {
      ++controls;
    } else {
      out.push_back({i, rct.x.cols(), ErrorCode::NonBinaryTreatment, "treatment not in {0,1}"});
    }
  }
  if (treated == 0 || controls == 0) {
    out.push_back({-1, -1, ErrorCode::ArmMissing,
                   treated == 0 ? "no treated units" : "no control units"});
  }
  check_binary_outcome(rct.y, rct.outcome_kind, rct.x.cols() + 1, out);
  return out;
}

std::vector<Violation> find_violations(const EcDataset& ec) {
  std::vector<Violation> out;
  if (ec.y.size() != ec.x.rows()) {
    out.push_back({-1, -1, ErrorCode::ShapeMismatch, "outcome length differs from covariate rows"});
    return out;
  }
  check_finite(ec.x, ec.y, out);
  check_binary_outcome(ec.y, ec.outcome_kind, ec.x.cols(), out);
  return out;
}

std::vector<Violation> find_violations(const RctDataset& rct, const EcDataset& ec) {
  auto out = find_violations(rct);
  auto ec_out = find_violations(ec);
  out.insert(out.end(), ec_out.begin(), ec_out.end());
  if (ec.x.cols() != rct.x.cols()) {
    out.push_back({-1, -1, ErrorCode::ShapeMismatch,
                   "EC has " + std::to_string(ec.x.cols()) + " covariates, RCT has " +
                       std::to_string(rct.x.cols())});
  }
  if (ec.outcome_kind != rct.outcome_kind) {
    out.push_back({-1, -1, ErrorCode::ShapeMismatch, "EC and RCT outcome kinds differ"});
  }
  return out;
}

const RctDataset& validate(const RctDataset& rct) {
  if (auto v = find_violations(rct); !v.empty()) throw ValidationError(std::move(v));
  return rct;
}

const EcDataset& validate(const EcDataset& ec) {
  if (auto v = find_violations(ec); !v.empty()) throw ValidationError(std::move(v));
  return ec;
}

void validate(const RctDataset& rct, const EcDataset& ec) {
  if (auto v = find_violations(rct, ec); !v.empty()) throw ValidationError(std::move(v));
}

CombinedDataset combine(const RctDataset& rct) {
  CombinedDataset out;
  out.x = rct.x;
  out.a = rct.a;
  out.y = rct.y;
  out.r = Eigen::VectorXd::Ones(rct.rows());
  out.outcome_kind = rct.outcome_kind;
  out.covariate_names = rct.covariate_names;
  return out;
}

CombinedDataset combine(const RctDataset& rct, const EcDataset& ec_subset) {
  if (ec_subset.rows() == 0) return combine(rct);
  if (ec_subset.cols() != rct.cols()) {
    throw Error(ErrorCode::ShapeMismatch, "EC covariate count " + std::to_string(ec_subset.cols()) +
                                              " != RCT covariate count " +
                                              std::to_string(rct.cols()));
  }
  const Index n1 = rct.rows();
  const Index k = ec_subset.rows();
  CombinedDataset out;
  out.x.resize(n1 + k, rct.cols());
  out.x << rct.x, ec_subset.x;
  out.a.resize(n1 + k);
  out.a << rct.a, Eigen::VectorXd::Zero(k);
  out.y.resize(n1 + k);
  out.y << rct.y, ec_subset.y;
  out.r.resize(n1 + k);
  out.r << Eigen::VectorXd::Ones(n1), Eigen::VectorXd::Zero(k);
  out.outcome_kind = rct.outcome_kind;
  out.covariate_names = rct.covariate_names;
  return out;
}

namespace {

std::vector<Index> control_rows(const Eigen::VectorXd& a) {
  std::vector<Index> rows;
  for (Index i = 0; i < a.size(); ++i) {
    if (a(i) == 0.0) rows.push_back(i);
  }
  return rows;
}

Eigen::MatrixXd gather_rows(const Eigen::MatrixXd& m, const std::vector<Index>& rows) {
  Eigen::MatrixXd out(static_cast<Index>(rows.size()), m.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) out.row(static_cast<Index>(i)) = m.row(rows[i]);
  return out;
}

Eigen::VectorXd gather(const Eigen::VectorXd& v, const std::vector<Index>& rows) {
  Eigen::VectorXd out(static_cast<Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) out(static_cast<Index>(i)) = v(rows[i]);
  return out;
}

}  // namespace

EcDataset controls_only(const RctDataset& rct) {
  const auto rows = control_rows(rct.a);
  EcDataset out;
  out.x = gather_rows(rct.x, rows);
  out.y = gather(rct.y, rows);
  out.outcome_kind = rct.outcome_kind;
  out.covariate_names = rct.covariate_names;
  return out;
}

EcDataset controls_only(const EcDataset& ec) { return ec; }

CombinedDataset controls_only(const CombinedDataset& combined) {
  const auto rows = control_rows(combined.a);
  CombinedDataset out;
  out.x = gather_rows(combined.x, rows);
  out.a = Eigen::VectorXd::Zero(static_cast<Index>(rows.size()));
  out.y = gather(combined.y, rows);
  out.r = gather(combined.r, rows);
  out.outcome_kind = combined.outcome_kind;
  out.covariate_names = combined.covariate_names;
  return out;
}

EcDataset take_rows(const EcDataset& ec, const std::vector<Index>& rows) {
  EcDataset out;
  out.x = gather_rows(ec.x, rows);
  out.y = gather(ec.y, rows);
  out.outcome_kind = ec.outcome_kind;
  out.covariate_names = ec.covariate_names;
  return out;
}

OutcomeKind infer_outcome_kind(const Eigen::VectorXd& y) {
  for (Index i = 0; i < y.size(); ++i) {
    if (y(i) != 0.0 && y(i) != 1.0) return OutcomeKind::continuous;
  }
  return OutcomeKind::binary;
}

}  // namespace ecborrow
