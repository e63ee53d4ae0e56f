#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ecborrow/data.hpp"

namespace ecborrow {

// File layout: header row, covariate columns, then `a` (RCT files only), then
// `y`. Column names `a`/`y` are matched case-insensitively. Missing or
// unparsable cells are rejected with ErrorCode::Parse. When `kind` is not
// given the outcome kind is inferred from the values.
RctDataset read_rct_csv(const std::filesystem::path& path,
                        std::optional<OutcomeKind> kind = std::nullopt);
EcDataset read_ec_csv(const std::filesystem::path& path,
                      std::optional<OutcomeKind> kind = std::nullopt);

RctDataset parse_rct_csv(const std::string& text, std::optional<OutcomeKind> kind = std::nullopt);
EcDataset parse_ec_csv(const std::string& text, std::optional<OutcomeKind> kind = std::nullopt);

std::string format_rct_csv(const RctDataset& rct);
std::string format_ec_csv(const EcDataset& ec);

void write_rct_csv(const std::filesystem::path& path, const RctDataset& rct);
void write_ec_csv(const std::filesystem::path& path, const EcDataset& ec);

// Shortest decimal form that parses back to the same double; "NA" for NaN.
std::string format_number(double value);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

std::string format_csv(const CsvTable& table);
void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

}  // namespace ecborrow
