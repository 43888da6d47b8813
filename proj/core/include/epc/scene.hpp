#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "epc/pipeline.hpp"
#include "epc/rules.hpp"

namespace epc {

/// Which graphs are drawn, relative to the rules in the scene.
enum class Visibility : std::uint8_t { kAll, kOutsideRules, kInsideRules };

std::string_view to_string(Visibility v);
std::optional<Visibility> visibility_from_string(std::string_view s);

struct SceneOptions {
  Visibility visibility = Visibility::kAll;
  /// Case whose side ellipses are overlaid.
  std::optional<std::size_t> selected_case;
  /// Rectangle being drawn, shown without stats.
  std::optional<Rect> in_progress;
  double pixel_width = 800.0;
  double pixel_height = 800.0;
};

struct SectorMark {
  std::size_t coord = 0;
  std::string label;
  double s0 = 0.0;  // arc position of value 0
  double s1 = 0.0;  // arc position of value 1
  Point start;
  Point end;
};

struct SceneGraph {
  std::size_t id = 0;
  std::string class_name;
  bool visible = true;
  std::vector<Point> nodes;
};

struct SceneRect {
  std::string id;
  std::string class_name;
  MatchMode mode = MatchMode::kPoint;
  Rect rect;
  std::optional<RuleStats> stats;  // absent for the in-progress rectangle
};

struct LegendEntry {
  std::string class_name;
  std::string color;
};

/// Render model; y grows upwards, renderers flip it for the screen.
struct Scene {
  Rect bounds;
  double pixel_width = 800.0;
  double pixel_height = 800.0;
  EllipseSpec ellipse = EllipseSpec::unit_circle();
  std::vector<SectorMark> sectors;
  std::optional<std::size_t> overlay_case;
  std::vector<SideEllipse> overlay;
  std::vector<SceneGraph> graphs;
  std::vector<SceneRect> rects;
  /// Class names in the rule stats, in stats order.
  std::vector<std::string> stat_classes;
  std::vector<LegendEntry> legend;
  std::vector<std::string> warnings;
};

/// The fixed categorical palette, assigned to classes in sorted name order.
std::span<const std::string_view> palette();

/// Throws DomainError when the selected case is out of range.
Scene build_scene(const PreparedData& prepared, std::span<const DominanceRule> rules,
                  std::span<const std::string> rule_classes, const SceneOptions& options = {});

/// Standalone SVG 1.1 document. Coordinates carry 6 decimals.
std::string to_svg(const Scene& scene);

/// Canonical JSON form of the scene; this is the UI contract.
std::string to_json(const Scene& scene);

}  // namespace epc
