#pragma once

#include <Eigen/Dense>

#include <string>
#include <vector>

#include "ecborrow/error.hpp"

namespace ecborrow {

using Index = Eigen::Index;

enum class OutcomeKind { continuous, binary };

// Covariates never carry an intercept column; model code prepends it.
// Binary outcomes are stored as 0.0 / 1.0.
struct RctDataset {
  Eigen::MatrixXd x;
  Eigen::VectorXd a;
  Eigen::VectorXd y;
  OutcomeKind outcome_kind = OutcomeKind::continuous;
  std::vector<std::string> covariate_names;

  Index rows() const { return x.rows(); }
  Index cols() const { return x.cols(); }
};

// Control-only sample (treatment implicitly 0). Used for EC files and for
// the RCT control arm after controls_only().
struct EcDataset {
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
  OutcomeKind outcome_kind = OutcomeKind::continuous;
  std::vector<std::string> covariate_names;

  Index rows() const { return x.rows(); }
  Index cols() const { return x.cols(); }
};

// RCT rows first, then EC rows. r = 1 marks RCT rows.
struct CombinedDataset {
  Eigen::MatrixXd x;
  Eigen::VectorXd a;
  Eigen::VectorXd y;
  Eigen::VectorXd r;
  OutcomeKind outcome_kind = OutcomeKind::continuous;
  std::vector<std::string> covariate_names;

  Index rows() const { return x.rows(); }
  Index cols() const { return x.cols(); }
  Index rct_rows() const;
};

struct Violation {
  Index row = -1;     // -1 when the violation is not tied to a row
  Index column = -1;  // -1 for whole-row / shape problems
  ErrorCode code;
  std::string reason;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<Violation> violations);
  const std::vector<Violation>& violations() const noexcept { return violations_; }

 private:
  std::vector<Violation> violations_;
};

std::vector<Violation> find_violations(const RctDataset& rct);
std::vector<Violation> find_violations(const EcDataset& ec);
// Also checks the EC against the RCT it will be paired with.
std::vector<Violation> find_violations(const RctDataset& rct, const EcDataset& ec);

// Return the dataset unchanged, or throw ValidationError listing every violation.
const RctDataset& validate(const RctDataset& rct);
const EcDataset& validate(const EcDataset& ec);
void validate(const RctDataset& rct, const EcDataset& ec);

CombinedDataset combine(const RctDataset& rct);
CombinedDataset combine(const RctDataset& rct, const EcDataset& ec_subset);

EcDataset controls_only(const RctDataset& rct);
EcDataset controls_only(const EcDataset& ec);
CombinedDataset controls_only(const CombinedDataset& combined);

// Rows of `ec` in the given order.
EcDataset take_rows(const EcDataset& ec, const std::vector<Index>& rows);

OutcomeKind infer_outcome_kind(const Eigen::VectorXd& y);

}  // namespace ecborrow
