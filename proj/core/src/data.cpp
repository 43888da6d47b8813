#include "epc/data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "epc/errors.hpp"

namespace epc {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view line, char delimiter) {
  std::vector<std::string_view> cells;
  if (delimiter == ' ') {
    std::size_t i = 0;
    while (i < line.size()) {
      while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
      if (i >= line.size()) break;
      std::size_t j = i;
      while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
      cells.push_back(line.substr(i, j - i));
      i = j;
    }
    return cells;
  }
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(delimiter, start);
    if (pos == std::string_view::npos) {
      cells.push_back(trim(line.substr(start)));
      break;
    }
    cells.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
  return cells;
}

std::optional<double> parse_number(std::string_view s) {
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

}  // namespace

std::optional<ClassId> Dataset::class_id(std::string_view name) const {
  const auto it = std::lower_bound(classes.begin(), classes.end(), name);
  if (it == classes.end() || *it != name) return std::nullopt;
  return static_cast<ClassId>(it - classes.begin());
}

std::vector<std::size_t> Dataset::class_counts() const {
  std::vector<std::size_t> counts(classes.size(), 0);
  for (ClassId l : labels) ++counts.at(l);
  return counts;
}

Dataset make_dataset(std::vector<std::string> columns, std::vector<std::vector<double>> rows,
                     std::span<const std::string> labels) {
  if (labels.size() != rows.size()) {
    throw DataError("label count " + std::to_string(labels.size()) + " does not match row count " +
                    std::to_string(rows.size()));
  }
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (rows[r].size() != columns.size()) {
      throw DataError("row " + std::to_string(r) + " has " + std::to_string(rows[r].size()) +
                      " values, expected " + std::to_string(columns.size()));
    }
  }
  Dataset ds;
  ds.columns = std::move(columns);
  ds.rows = std::move(rows);
  ds.classes.assign(labels.begin(), labels.end());
  std::sort(ds.classes.begin(), ds.classes.end());
  ds.classes.erase(std::unique(ds.classes.begin(), ds.classes.end()), ds.classes.end());
  ds.labels.reserve(labels.size());
  for (const auto& l : labels) ds.labels.push_back(*ds.class_id(l));
  return ds;
}

CsvLoad load_csv(std::string_view text, const CsvOptions& options) {
  std::vector<std::pair<std::size_t, std::vector<std::string_view>>> lines;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    const std::string_view line = trim(text.substr(start, end - start));
    if (!line.empty()) lines.emplace_back(line_no, split(line, options.delimiter));
    start = end + 1;
  }
  if (lines.empty()) throw DataError("input is empty");

  std::vector<std::string> header;
  std::size_t first_data = 0;
  if (options.header) {
    for (auto c : lines.front().second) header.emplace_back(c);
    first_data = 1;
  }
  if (first_data >= lines.size()) throw DataError("input has a header but no data rows");

  const std::size_t width = options.header ? header.size() : lines[first_data].second.size();
  for (std::size_t i = first_data; i < lines.size(); ++i) {
    if (lines[i].second.size() != width) {
      throw DataError("line " + std::to_string(lines[i].first) + " has " +
                      std::to_string(lines[i].second.size()) + " cells, expected " +
                      std::to_string(width));
    }
  }

  std::size_t label_col = 0;
  if (options.label_name) {
    if (!options.header) throw DataError("a label column name needs a header row");
    const auto it = std::find(header.begin(), header.end(), *options.label_name);
    if (it == header.end()) throw DataError("no label column named '" + *options.label_name + "'");
    label_col = static_cast<std::size_t>(it - header.begin());
  } else {
    const long w = static_cast<long>(width);
    const long idx = options.label_index < 0 ? w + options.label_index : options.label_index;
    if (idx < 0 || idx >= w) {
      throw DataError("label column " + std::to_string(options.label_index) + " is out of range");
    }
    label_col = static_cast<std::size_t>(idx);
  }

  std::vector<std::size_t> features;
  for (std::size_t c = 0; c < width; ++c) {
    if (c == label_col) continue;
    if (std::find(options.ignore.begin(), options.ignore.end(), c) != options.ignore.end()) continue;
    features.push_back(c);
  }
  if (features.empty()) throw DataError("no feature columns left");

  std::vector<std::string> columns;
  for (std::size_t c : features) {
    columns.push_back(options.header ? header[c] : "X" + std::to_string(columns.size() + 1));
  }

  CsvLoad out;
  std::vector<std::vector<double>> rows;
  std::vector<std::string> labels;
  for (std::size_t i = first_data; i < lines.size(); ++i) {
    const auto& [no, cells] = lines[i];
    bool missing = false;
    std::vector<double> row;
    row.reserve(features.size());
    for (std::size_t f = 0; f < features.size(); ++f) {
      const std::string_view cell = cells[features[f]];
      if (cell.empty() || cell == options.missing) {
        missing = true;
        break;
      }
      const auto v = parse_number(cell);
      if (!v) {
        throw DataError("line " + std::to_string(no) + ", column '" + columns[f] +
                        "': non-numeric value '" + std::string(cell) + "'");
      }
      row.push_back(*v);
    }
    const std::string_view label = cells[label_col];
    if (!missing && (label.empty() || label == options.missing)) missing = true;
    if (missing) {
      out.skipped_lines.push_back(no);
      continue;
    }
    rows.push_back(std::move(row));
    labels.emplace_back(label);
  }
  if (rows.empty()) throw DataError("no complete data rows");
  out.dataset = make_dataset(std::move(columns), std::move(rows), labels);
  return out;
}

CsvLoad load_csv_file(const std::string& path, const CsvOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return load_csv(buf.str(), options);
}

std::vector<ColumnStats> column_stats(const Dataset& ds) {
  std::vector<ColumnStats> stats(ds.dims());
  if (ds.rows.empty()) return stats;
  for (std::size_t c = 0; c < ds.dims(); ++c) stats[c] = {ds.rows[0][c], ds.rows[0][c]};
  for (const auto& row : ds.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      stats[c].min = std::min(stats[c].min, row[c]);
      stats[c].max = std::max(stats[c].max, row[c]);
    }
  }
  return stats;
}

Dataset normalize(const Dataset& ds) {
  const auto stats = column_stats(ds);
  return normalize_with(ds, stats);
}

Dataset normalize_with(const Dataset& ds, std::span<const ColumnStats> stats,
                       std::size_t* clamped) {
  if (stats.size() != ds.dims()) {
    throw DataError("expected statistics for " + std::to_string(ds.dims()) + " columns, got " +
                    std::to_string(stats.size()));
  }
  Dataset out = ds;
  out.stats.assign(stats.begin(), stats.end());
  std::size_t count = 0;
  for (auto& row : out.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      const auto& s = stats[c];
      double v = s.max > s.min ? (row[c] - s.min) / (s.max - s.min) : 0.5;
      if (v < 0.0 || v > 1.0) {
        v = std::clamp(v, 0.0, 1.0);
        ++count;
      }
      row[c] = v;
    }
  }
  if (clamped) *clamped = count;
  return out;
}

PaddingPolicy padding_from_string(std::string_view s) {
  if (s == "dup" || s == "duplicate-last") return PaddingPolicy::duplicate_last();
  if (s == "none") return PaddingPolicy::none();
  if (s.substr(0, 6) == "const:") {
    const auto v = parse_number(s.substr(6));
    if (!v || *v < 0.0 || *v > 1.0) {
      throw ConfigurationError("padding constant must be a number in [0, 1]");
    }
    return PaddingPolicy::constant(*v);
  }
  throw ConfigurationError("unknown padding policy '" + std::string(s) + "'");
}

Dataset pad(const Dataset& ds, const PaddingPolicy& policy) {
  if (ds.dims() % 2 == 0 || policy.kind == PaddingPolicy::Kind::kNone) return ds;
  if (ds.dims() == 0) throw DataError("cannot pad a dataset without columns");
  Dataset out = ds;
  if (policy.kind == PaddingPolicy::Kind::kConstant) {
    if (!(policy.value >= 0.0 && policy.value <= 1.0)) {
      throw ConfigurationError("padding constant must lie in [0, 1]");
    }
    out.columns.push_back("pad");
    for (auto& row : out.rows) row.push_back(policy.value);
    if (!out.stats.empty()) out.stats.push_back({policy.value, policy.value});
  } else {
    out.columns.push_back(ds.columns.back() + "_copy");
    for (auto& row : out.rows) row.push_back(row.back());
    if (!out.stats.empty()) out.stats.push_back(out.stats.back());
  }
  return out;
}

std::optional<SyntheticFamily> synthetic_from_string(std::string_view s) {
  for (auto f : {SyntheticFamily::kA, SyntheticFamily::kB, SyntheticFamily::kC,
                 SyntheticFamily::kS4}) {
    if (to_string(f) == s) return f;
  }
  return std::nullopt;
}

std::string_view to_string(SyntheticFamily f) {
  switch (f) {
    case SyntheticFamily::kA: return "A";
    case SyntheticFamily::kB: return "B";
    case SyntheticFamily::kC: return "C";
    case SyntheticFamily::kS4: return "S4";
  }
  return "?";
}

Dataset generate_synthetic(SyntheticFamily family) {
  std::vector<std::vector<double>> rows;
  std::size_t dims = 4;
  switch (family) {
    case SyntheticFamily::kA:
      dims = 8;
      for (int k = 1; k <= 9; ++k) {
        std::vector<double> row(8);
        for (std::size_t j = 0; j < 8; ++j) row[j] = j % 2 == 0 ? (10 - k) / 10.0 : k / 10.0;
        rows.push_back(std::move(row));
      }
      break;
    case SyntheticFamily::kB:
      for (int k = 1; k <= 9; ++k) rows.push_back(std::vector<double>(4, k / 10.0));
      break;
    case SyntheticFamily::kC:
      for (int k = 1; k <= 9; ++k) {
        const double a = k / 10.0;
        const double b = (10 - k) / 10.0;
        rows.push_back({a, b, a, b});
      }
      break;
    case SyntheticFamily::kS4:
      for (int k = 1; k <= 7; ++k) {
        const double a = k / 8.0;
        const double b = (8 - k) / 8.0;
        rows.push_back({a, a, b, b});
      }
      break;
  }
  std::vector<std::string> columns;
  for (std::size_t j = 0; j < dims; ++j) columns.push_back("X" + std::to_string(j + 1));
  std::vector<std::string> labels;
  for (std::size_t k = 0; k < rows.size(); ++k) labels.push_back("x" + std::to_string(k + 1));
  Dataset ds = make_dataset(std::move(columns), std::move(rows), labels);
  ds.stats.assign(dims, ColumnStats{0.0, 1.0});
  return ds;
}

void write_csv(const Dataset& ds, std::ostream& out) {
  for (const auto& c : ds.columns) out << c << ',';
  out << "class\n";
  char buf[32];
  for (std::size_t r = 0; r < ds.size(); ++r) {
    for (double v : ds.rows[r]) {
      const auto res = std::to_chars(buf, buf + sizeof buf, v);
      out << std::string_view(buf, static_cast<std::size_t>(res.ptr - buf)) << ',';
    }
    out << ds.class_name(ds.labels[r]) << '\n';
  }
}

}  // namespace epc
