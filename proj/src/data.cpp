#include "carate/data.hpp"

#include <fnmatch.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "carate/error.hpp"

namespace carate {

namespace {

// Splits one CSV record. Handles double-quoted fields with "" escapes; a
// quoted field may not span lines.
std::vector<std::string> split_record(const std::string& line,
                                      std::size_t line_no) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else {
      field.push_back(c);
    }
  }
  if (quoted) {
    throw DataError("line " + std::to_string(line_no) + ": unterminated quote");
  }
  fields.push_back(std::move(field));
  return fields;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

double parse_number(const std::string& raw, const std::string& column,
                    std::size_t line_no) {
  const std::string cell = trim(raw);
  double value = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  if (!cell.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (cell.empty() || ec != std::errc() || ptr != last || !std::isfinite(value)) {
    throw DataError("line " + std::to_string(line_no) + ", column '" + column +
                    "': non-numeric or missing cell '" + cell + "'");
  }
  return value;
}

std::size_t find_column(const std::vector<std::string>& header,
                        const std::string& name) {
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (header[j] == name) return j;
  }
  throw DataError("missing column '" + name + "'");
}

Dataset parse_stream(std::istream& in, const ColumnSpec& spec) {
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw DataError("empty CSV input");
  ++line_no;
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) {
    line.erase(0, 3);
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> header = split_record(line, line_no);
  for (auto& h : header) h = trim(h);

  const std::size_t y_col = find_column(header, spec.outcome);
  const std::size_t a_col = find_column(header, spec.treatment);
  const std::size_t s_col = find_column(header, spec.stratum);

  std::vector<std::size_t> x_cols;
  std::set<std::size_t> taken;
  for (const auto& pattern : spec.covariates) {
    bool matched = false;
    for (std::size_t j = 0; j < header.size(); ++j) {
      if (j == y_col || j == a_col || j == s_col) continue;
      if (fnmatch(pattern.c_str(), header[j].c_str(), 0) == 0) {
        matched = true;
        if (taken.insert(j).second) x_cols.push_back(j);
      }
    }
    if (!matched) throw DataError("missing column '" + pattern + "'");
  }

  std::vector<double> y;
  std::vector<int> a;
  std::vector<std::string> s;
  std::vector<double> x_flat;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    const auto fields = split_record(line, line_no);
    if (fields.size() != header.size()) {
      throw DataError("line " + std::to_string(line_no) + ": expected " +
                      std::to_string(header.size()) + " fields, found " +
                      std::to_string(fields.size()));
    }
    y.push_back(parse_number(fields[y_col], spec.outcome, line_no));
    const double t = parse_number(fields[a_col], spec.treatment, line_no);
    if (t != 0.0 && t != 1.0) {
      throw DataError("line " + std::to_string(line_no) +
                      ": treatment not binary (value " + trim(fields[a_col]) +
                      ")");
    }
    a.push_back(static_cast<int>(t));
    const std::string label = trim(fields[s_col]);
    if (label.empty() || label == "NA") {
      throw DataError("line " + std::to_string(line_no) +
                      ": missing stratum label");
    }
    s.push_back(label);
    for (std::size_t j : x_cols) {
      x_flat.push_back(parse_number(fields[j], header[j], line_no));
    }
  }

  Dataset d;
  const auto n = static_cast<Eigen::Index>(y.size());
  const auto k = static_cast<Eigen::Index>(x_cols.size());
  d.y = Eigen::Map<Eigen::VectorXd>(y.data(), n);
  d.a = std::move(a);
  d.strata = std::move(s);
  d.x = Eigen::Map<Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                 Eigen::RowMajor>>(x_flat.data(), n, k);
  for (std::size_t j : x_cols) d.covariate_names.push_back(header[j]);
  d.check();
  return d;
}

}  // namespace

void Dataset::check() const {
  const std::size_t rows = a.size();
  if (rows == 0) throw DataError("dataset has no rows");
  if (static_cast<std::size_t>(y.size()) != rows || strata.size() != rows ||
      static_cast<std::size_t>(x.rows()) != rows) {
    throw DataError("dataset columns have different lengths");
  }
  for (std::size_t i = 0; i < rows; ++i) {
    if (a[i] != 0 && a[i] != 1) {
      throw DataError("treatment not binary at row " + std::to_string(i));
    }
  }
}

Dataset Dataset::subset(const std::vector<std::size_t>& rows) const {
  Dataset out;
  const auto m = static_cast<Eigen::Index>(rows.size());
  out.y.resize(m);
  out.x.resize(m, x.cols());
  out.a.reserve(rows.size());
  out.strata.reserve(rows.size());
  for (Eigen::Index r = 0; r < m; ++r) {
    const auto i = static_cast<Eigen::Index>(rows[static_cast<std::size_t>(r)]);
    out.y(r) = y(i);
    out.x.row(r) = x.row(i);
    out.a.push_back(a[static_cast<std::size_t>(i)]);
    out.strata.push_back(strata[static_cast<std::size_t>(i)]);
  }
  out.covariate_names = covariate_names;
  return out;
}

Dataset load_dataset(const std::filesystem::path& path, const ColumnSpec& spec) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  return parse_stream(in, spec);
}

Dataset parse_dataset(const std::string& csv_text, const ColumnSpec& spec) {
  std::istringstream in(csv_text);
  return parse_stream(in, spec);
}

double StrataIndex::share(std::size_t s) const {
  return static_cast<double>(strata[s].size()) / static_cast<double>(n);
}

double StrataIndex::propensity(std::size_t s) const {
  return static_cast<double>(strata[s].treated.size()) /
         static_cast<double>(strata[s].size());
}

StrataIndex build_index(const Dataset& d) {
  std::map<std::string, std::size_t> position;
  for (const auto& label : d.strata) position.emplace(label, 0);
  StrataIndex idx;
  idx.n = d.n();
  for (auto& [label, pos] : position) {
    pos = idx.strata.size();
    idx.strata.push_back(StratumCells{label, {}, {}, {}});
  }
  idx.stratum_of_row.resize(d.n());
  for (std::size_t i = 0; i < d.n(); ++i) {
    const std::size_t s = position.at(d.strata[i]);
    idx.stratum_of_row[i] = s;
    auto& cells = idx.strata[s];
    cells.members.push_back(i);
    (d.a[i] == 1 ? cells.treated : cells.control).push_back(i);
  }
  return idx;
}

ValidationReport validate(const Dataset& d, const StrataIndex& idx,
                          const ValidationPolicy& policy) {
  ValidationReport report;
  const std::size_t k = d.k();
  const std::size_t threshold =
      policy.min_arm_size > 0 ? policy.min_arm_size : k + 2;

  for (const auto& stratum : idx.strata) {
    bool stratum_ok = true;
    bool below_threshold = false;
    for (int arm : {1, 0}) {
      CellStatus cell;
      cell.stratum = stratum.label;
      cell.arm = arm;
      cell.size = stratum.arm_size(arm);
      if (cell.size == 0) {
        cell.reason = arm == 0 ? "no control units" : "no treated units";
      } else if (cell.size < k + 2) {
        cell.reason = "n_{a,s} < k+2 (" + std::to_string(cell.size) + " < " +
                      std::to_string(k + 2) + ")";
      }
      cell.estimable = cell.reason.empty();
      stratum_ok = stratum_ok && cell.estimable;
      below_threshold = below_threshold || cell.size < threshold;
      report.cells.push_back(std::move(cell));
    }
    const bool drop = policy.drop_small_strata && (below_threshold || !stratum_ok);
    if (drop) {
      report.dropped_strata.push_back(stratum.label);
      continue;
    }
    for (std::size_t c = report.cells.size() - 2; c < report.cells.size(); ++c) {
      const auto& cell = report.cells[c];
      if (!cell.estimable) {
        report.errors.push_back("stratum '" + cell.stratum + "', arm " +
                                std::to_string(cell.arm) + ": " + cell.reason);
        if (cell.size == 0) report.unadjusted_estimable = false;
      }
    }
  }
  if (!report.dropped_strata.empty() &&
      report.dropped_strata.size() == idx.num_strata()) {
    report.errors.push_back("every stratum was dropped by the small-stratum policy");
    report.unadjusted_estimable = false;
  }
  return report;
}

Dataset drop_strata(const Dataset& d, const std::vector<std::string>& labels) {
  const std::set<std::string> dropped(labels.begin(), labels.end());
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < d.n(); ++i) {
    if (!dropped.count(d.strata[i])) keep.push_back(i);
  }
  return d.subset(keep);
}

}  // namespace carate
