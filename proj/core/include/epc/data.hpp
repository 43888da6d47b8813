#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "epc/embedding.hpp"

namespace epc {

struct ColumnStats {
  double min = 0.0;
  double max = 0.0;
};

/// Numeric feature table with one categorical label per row. Labels index
/// `classes`, which is kept in lexical order.
struct Dataset {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
  std::vector<ClassId> labels;
  std::vector<std::string> classes;
  /// Raw-domain statistics the rows were scaled with; empty until normalized.
  std::vector<ColumnStats> stats;

  std::size_t size() const { return rows.size(); }
  std::size_t dims() const { return columns.size(); }
  const std::string& class_name(ClassId id) const { return classes.at(id); }
  std::optional<ClassId> class_id(std::string_view name) const;
  std::vector<std::size_t> class_counts() const;
};

/// Builds a dataset from rows and textual labels; class ids follow the lexical
/// order of the distinct labels. Throws DataError on ragged input.
Dataset make_dataset(std::vector<std::string> columns, std::vector<std::vector<double>> rows,
                     std::span<const std::string> labels);

struct CsvOptions {
  char delimiter = ',';
  bool header = true;
  /// Label column by header name; wins over `label_index` when set.
  std::optional<std::string> label_name;
  /// Label column by position; negative counts from the end (-1 = last).
  long label_index = -1;
  /// Positions of columns to drop (identifiers and the like).
  std::vector<std::size_t> ignore;
  /// Cells equal to this (or empty) mark a missing value; such rows are skipped.
  std::string missing = "?";
};

struct CsvLoad {
  Dataset dataset;
  /// 1-based line numbers of rows skipped for missing values.
  std::vector<std::size_t> skipped_lines;
};

/// Parses delimited text. Throws DataError naming line and column for a
/// non-numeric feature cell, for ragged rows, a missing label column or an
/// input without data rows.
CsvLoad load_csv(std::string_view text, const CsvOptions& options = {});
CsvLoad load_csv_file(const std::string& path, const CsvOptions& options = {});

std::vector<ColumnStats> column_stats(const Dataset& ds);

/// Min-max scaling to [0, 1] with the dataset's own statistics. Constant
/// columns map to 0.5. The statistics used are stored in the result.
Dataset normalize(const Dataset& ds);

/// Scales with externally supplied statistics (e.g. from a training split),
/// clamping into [0, 1]. `clamped`, when given, receives the number of values
/// that had to be clamped.
Dataset normalize_with(const Dataset& ds, std::span<const ColumnStats> stats,
                       std::size_t* clamped = nullptr);

struct PaddingPolicy {
  enum class Kind : std::uint8_t { kNone, kDuplicateLast, kConstant };
  Kind kind = Kind::kDuplicateLast;
  double value = 1.0;  // kConstant only, in [0, 1]

  static PaddingPolicy none() { return {Kind::kNone, 0.0}; }
  static PaddingPolicy duplicate_last() { return {Kind::kDuplicateLast, 0.0}; }
  static PaddingPolicy constant(double c) { return {Kind::kConstant, c}; }
};

/// Parses "dup", "none" or "const:<v>".
PaddingPolicy padding_from_string(std::string_view s);

/// Appends one column when the dimension is odd; even input is returned
/// unchanged, as is odd input under Kind::kNone.
Dataset pad(const Dataset& ds, const PaddingPolicy& policy);

enum class SyntheticFamily : std::uint8_t { kA, kB, kC, kS4 };

std::optional<SyntheticFamily> synthetic_from_string(std::string_view s);
std::string_view to_string(SyntheticFamily f);

/// The fixed synthetic point sets: A (9 points, 8-D), B and C (9 points, 4-D)
/// and S4 (7 points, 4-D). Every point gets its own class "x<k>".
Dataset generate_synthetic(SyntheticFamily family);

/// Writes the dataset as CSV with a header and the label in the last column.
void write_csv(const Dataset& ds, std::ostream& out);

}  // namespace epc
