#include "ecborrow/csv.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace ecborrow {

namespace {

std::string trim(std::string_view s) {
  auto begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string_view::npos) return {};
  auto end = s.find_last_not_of(" \t\r\n");
  s = s.substr(begin, end - begin + 1);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return std::string(s);
}

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string_view rest(line);
  while (true) {
    auto comma = rest.find(',');
    cells.push_back(trim(rest.substr(0, comma)));
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  return cells;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

double parse_cell(const std::string& cell, std::size_t line_no, std::size_t column) {
  auto fail = [&](const char* why) {
    return Error(ErrorCode::Parse, std::string(why) + " at line " + std::to_string(line_no) +
                                       ", column " + std::to_string(column + 1));
  };
  if (cell.empty() || cell == "NA" || cell == "NaN" || cell == "nan") throw fail("missing value");
  double value = 0.0;
  const char* first = cell.data();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, cell.data() + cell.size(), value);
  if (ec != std::errc() || ptr != cell.data() + cell.size()) throw fail("unparsable number");
  return value;
}

struct RawTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

RawTable parse_table(const std::string& text) {
  RawTable table;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    auto cells = split_line(line);
    if (table.header.empty()) {
      table.header = std::move(cells);
      continue;
    }
    if (cells.size() != table.header.size()) {
      throw Error(ErrorCode::Parse, "line " + std::to_string(line_no) + " has " +
                                        std::to_string(cells.size()) + " cells, header has " +
                                        std::to_string(table.header.size()));
    }
    std::vector<double> row(cells.size());
    for (std::size_t j = 0; j < cells.size(); ++j) row[j] = parse_cell(cells[j], line_no, j);
    table.rows.push_back(std::move(row));
  }
  if (table.header.empty()) throw Error(ErrorCode::Parse, "empty CSV (no header)");
  return table;
}

void expect_column(const RawTable& t, std::size_t pos, const char* name) {
  if (pos >= t.header.size() || lower(t.header[pos]) != name) {
    throw Error(ErrorCode::Parse, std::string("expected column `") + name + "` at position " +
                                      std::to_string(pos + 1));
  }
}

std::string join_header(const std::vector<std::string>& names, std::initializer_list<const char*> tail) {
  std::string out;
  for (const auto& n : names) {
    out += n;
    out += ',';
  }
  for (const char* t : tail) {
    out += t;
    out += ',';
  }
  out.pop_back();
  return out;
}

std::vector<std::string> default_names(const std::vector<std::string>& names, Index p) {
  if (static_cast<Index>(names.size()) == p) return names;
  std::vector<std::string> out;
  for (Index j = 0; j < p; ++j) out.push_back("x" + std::to_string(j + 1));
  return out;
}

}  // namespace

std::string format_number(double value) {
  if (std::isnan(value)) return "NA";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

RctDataset parse_rct_csv(const std::string& text, std::optional<OutcomeKind> kind) {
  auto t = parse_table(text);
  if (t.header.size() < 3) throw Error(ErrorCode::Parse, "RCT CSV needs covariates, `a` and `y`");
  const std::size_t p = t.header.size() - 2;
  expect_column(t, p, "a");
  expect_column(t, p + 1, "y");
  const auto n = static_cast<Index>(t.rows.size());
  RctDataset out;
  out.covariate_names.assign(t.header.begin(), t.header.begin() + static_cast<long>(p));
  out.x.resize(n, static_cast<Index>(p));
  out.a.resize(n);
  out.y.resize(n);
  for (Index i = 0; i < n; ++i) {
    const auto& row = t.rows[static_cast<std::size_t>(i)];
    for (std::size_t j = 0; j < p; ++j) out.x(i, static_cast<Index>(j)) = row[j];
    out.a(i) = row[p];
    out.y(i) = row[p + 1];
  }
  out.outcome_kind = kind.value_or(infer_outcome_kind(out.y));
  return out;
}

EcDataset parse_ec_csv(const std::string& text, std::optional<OutcomeKind> kind) {
  auto t = parse_table(text);
  if (t.header.size() < 2) throw Error(ErrorCode::Parse, "EC CSV needs covariates and `y`");
  const std::size_t p = t.header.size() - 1;
  expect_column(t, p, "y");
  const auto n = static_cast<Index>(t.rows.size());
  EcDataset out;
  out.covariate_names.assign(t.header.begin(), t.header.begin() + static_cast<long>(p));
  out.x.resize(n, static_cast<Index>(p));
  out.y.resize(n);
  for (Index i = 0; i < n; ++i) {
    const auto& row = t.rows[static_cast<std::size_t>(i)];
    for (std::size_t j = 0; j < p; ++j) out.x(i, static_cast<Index>(j)) = row[j];
    out.y(i) = row[p];
  }
  out.outcome_kind = kind.value_or(infer_outcome_kind(out.y));
  return out;
}

std::string format_rct_csv(const RctDataset& rct) {
  std::string out = join_header(default_names(rct.covariate_names, rct.cols()), {"a", "y"});
  out += '\n';
  for (Index i = 0; i < rct.rows(); ++i) {
    for (Index j = 0; j < rct.cols(); ++j) {
      out += format_number(rct.x(i, j));
      out += ',';
    }
    out += format_number(rct.a(i));
    out += ',';
    out += format_number(rct.y(i));
    out += '\n';
  }
  return out;
}

std::string format_ec_csv(const EcDataset& ec) {
  std::string out = join_header(default_names(ec.covariate_names, ec.cols()), {"y"});
  out += '\n';
  for (Index i = 0; i < ec.rows(); ++i) {
    for (Index j = 0; j < ec.cols(); ++j) {
      out += format_number(ec.x(i, j));
      out += ',';
    }
    out += format_number(ec.y(i));
    out += '\n';
  }
  return out;
}

std::string format_csv(const CsvTable& table) {
  std::string out;
  auto append_row = [&](const std::vector<std::string>& cells) {
    for (std::size_t j = 0; j < cells.size(); ++j) {
      if (j) out += ',';
      out += cells[j];
    }
    out += '\n';
  };
  append_row(table.header);
  for (const auto& row : table.rows) append_row(row);
  return out;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::Io, "cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw Error(ErrorCode::Io, "write failed for " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

RctDataset read_rct_csv(const std::filesystem::path& path, std::optional<OutcomeKind> kind) {
  return parse_rct_csv(read_text(path), kind);
}

EcDataset read_ec_csv(const std::filesystem::path& path, std::optional<OutcomeKind> kind) {
  return parse_ec_csv(read_text(path), kind);
}

void write_rct_csv(const std::filesystem::path& path, const RctDataset& rct) {
  write_text(path, format_rct_csv(rct));
}

void write_ec_csv(const std::filesystem::path& path, const EcDataset& ec) {
  write_text(path, format_ec_csv(ec));
}

}  // namespace ecborrow
