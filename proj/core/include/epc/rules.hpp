#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "epc/embedding.hpp"

namespace epc {

/// Closed axis-aligned rectangle in scene coordinates.
struct Rect {
  double xmin = 0.0;
  double ymin = 0.0;
  double xmax = 0.0;
  double ymax = 0.0;

  /// Throws DomainError unless xmin < xmax and ymin < ymax.
  static Rect checked(double xmin, double ymin, double xmax, double ymax);

  bool contains(Point p) const { return p.x >= xmin && p.x <= xmax && p.y >= ymin && p.y <= ymax; }
  friend bool operator==(const Rect&, const Rect&) = default;
};

enum class MatchMode : std::uint8_t {
  /// Some node of the graph lies in the rectangle.
  kPoint,
  /// Some edge of the graph touches the rectangle; a lone node falls back to kPoint.
  kIntersect,
};

std::string_view to_string(MatchMode m);
std::optional<MatchMode> match_mode_from_string(std::string_view s);

/// x-extent of the part of segment a-b inside the horizontal band
/// y0 <= y <= y1, or nullopt when the segment misses the band.
std::optional<std::array<double, 2>> clip_to_band(Point a, Point b, double y0, double y1);

/// True when the closed segment a-b meets the closed rectangle.
bool segment_hits_rect(Point a, Point b, const Rect& rect);

bool graph_matches(const EpcGraph& graph, const Rect& rect, MatchMode mode);

/// Hit counts and ratios of one rectangle over a case set.
struct RectEvaluation {
  std::vector<std::size_t> class_hits;
  std::size_t hits = 0;
  std::optional<ClassId> dominant;
  /// The dominant class won a tie on hit count by name order.
  bool tie_broken = false;
  double precision = 0.0;
  double coverage_in_class = 0.0;
  double coverage_total = 0.0;
  std::size_t active_cases = 0;
  std::size_t active_in_class = 0;
};

/// Evaluates `rect` over the graphs flagged in `active` (all when empty).
/// `labels[i]` is the class of graph i, `class_names` orders ties.
RectEvaluation evaluate_rect(const Rect& rect, std::span<const EpcGraph> graphs,
                             std::span<const ClassId> labels,
                             std::span<const std::string> class_names, MatchMode mode,
                             std::span<const std::uint8_t> active = {});

struct MiningTarget {
  enum class Kind : std::uint8_t { kMulticlass, kOneVsRest, kFixedClass };
  Kind kind = Kind::kMulticlass;
  std::string class_name;  // kOneVsRest and kFixedClass
  /// kOneVsRest only: restricts rules to "<C>" or "not-<C>"; empty allows both.
  std::string rule_class;
};

struct MiningParams {
  double rect_width = 0.2;
  double rect_height = 0.2;
  double stride = 0.05;
  double min_coverage = 0.10;
  double min_precision = 0.90;
  MatchMode mode = MatchMode::kPoint;
  MiningTarget target;
  std::size_t max_rules = 100;

  /// Throws ConfigurationError for non-positive sizes or thresholds outside (0, 1].
  void validate() const;
};

/// Statistics of a rule on the case set it was accepted against.
struct RuleStats {
  std::vector<std::size_t> class_hits;
  std::size_t hits = 0;
  double precision = 0.0;
  double coverage_in_class = 0.0;
  double coverage_total = 0.0;
  std::size_t active_cases = 0;
  std::size_t active_in_class = 0;
};

struct DominanceRule {
  Rect rect;
  MatchMode mode = MatchMode::kPoint;
  ClassId predicted = 0;
  std::string class_name;
  std::size_t order = 0;
  bool tie_broken = false;
  RuleStats stats;
};

/// Class names and per-case labels in the space mining works in. One-vs-rest
/// collapses every other class into "not-<C>".
struct LabelSpace {
  std::vector<std::string> classes;
  std::vector<ClassId> labels;
};

LabelSpace label_space(std::span<const ClassId> labels, std::span<const std::string> classes,
                       const MiningTarget& target);

/// Deterministic sequential covering over a fixed grid. Rectangle lower-left
/// corners run over xmin + i*stride, ymin + j*stride of the bounding box of
/// all nodes, left to right then bottom to top. Each round accepts the
/// qualifying rectangle with the largest coverage in class (then precision,
/// then scan order) and removes the cases it matches.
/// `active`, when given, marks the cases still open; mining continues from
/// there, as after manually accepted rules.
std::vector<DominanceRule> mine(std::span<const EpcGraph> graphs, const LabelSpace& space,
                                const MiningParams& params,
                                std::span<const std::uint8_t> active = {});

/// Rule for `rect` with stats frozen against the active cases. Its class is
/// `rule_class` when given, the dominant class otherwise. Throws DomainError
/// when the rectangle matches no active case.
DominanceRule freeze_rule(const Rect& rect, MatchMode mode, std::span<const EpcGraph> graphs,
                          const LabelSpace& space, std::span<const std::uint8_t> active,
                          std::size_t order, std::optional<ClassId> rule_class = std::nullopt);

/// Recomputes, in order, each rule's stats against the cases its
/// predecessors leave open, keeping rectangles, modes and classes. Returns
/// the cases left open by all rules.
std::vector<std::uint8_t> rebase(std::span<const EpcGraph> graphs, const LabelSpace& space,
                                 std::vector<DominanceRule>& rules);

/// Reference implementation of one mining round by exhaustive evaluation of
/// every grid position; returns the accepted rule, if any.
std::optional<DominanceRule> mine_round_exhaustive(std::span<const EpcGraph> graphs,
                                                   const LabelSpace& space,
                                                   const MiningParams& params,
                                                   std::span<const std::uint8_t> active);

/// Weighted precision sum(p_i c_i) / sum(c_i); 0 when nothing is covered.
double weighted_precision(std::span<const double> precisions, std::span<const double> counts);

struct RuleReportRow {
  std::size_t order = 0;
  std::string class_name;
  std::size_t hits = 0;
  std::size_t correct = 0;
  double precision = 0.0;
  /// correct / cases of the class still uncovered by earlier rules.
  double coverage_in_class = 0.0;
  /// correct / all cases of the class.
  double global_coverage_in_class = 0.0;
};

struct ClassificationReport {
  std::vector<std::string> classes;  // dataset classes, rows of the confusion matrix
  std::vector<std::string> predicted_classes;  // rule classes, columns (plus "uncovered")
  std::vector<std::optional<std::size_t>> matched_rule;  // per case
  std::vector<RuleReportRow> rows;
  std::vector<std::vector<std::size_t>> confusion;
  std::size_t total_cases = 0;
  std::size_t covered = 0;
  std::size_t correct = 0;
  double total_recall = 0.0;
  double weighted_precision = 0.0;
};

/// First-match classification in rule order. `classes`/`labels` describe the
/// cases; a rule counts as correct on a case whose class name equals the
/// rule's class, or any other class for a "not-<C>" rule with C different.
ClassificationReport classify(std::span<const EpcGraph> graphs, std::span<const ClassId> labels,
                              std::span<const std::string> classes,
                              std::span<const DominanceRule> rules);

/// Whether a case of class `actual` is a correct hit for a rule of class `predicted`.
bool class_agrees(std::string_view predicted, std::string_view actual);

}  // namespace epc
