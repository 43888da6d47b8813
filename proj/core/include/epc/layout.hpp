#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "epc/arc_length.hpp"
#include "epc/geometry.hpp"

namespace epc {

enum class LayoutMode : std::uint8_t {
  /// Sectors clockwise from the top of the central ellipse.
  kSequential,
  /// Right-half sectors clockwise from the top; the left half is their mirror
  /// image across M, so (a, b, a, b) maps to an arrow symmetric about M.
  kMirror,
  /// Each coordinate advances from the previous anchor instead of owning a sector.
  kDynamic,
};

std::string_view to_string(LayoutMode m);
std::optional<LayoutMode> layout_mode_from_string(std::string_view s);

/// How side ellipses are oriented relative to their anchors.
enum class OrientationScheme : std::uint8_t {
  /// Per pair, the orientation that keeps the embedding injective.
  kAuto,
  /// First of each pair on its top arc, second on its bottom arc.
  kAlternating,
  /// Every center above its anchor.
  kAllUp,
  /// Every center below its anchor.
  kAllDown,
};

std::string_view to_string(OrientationScheme s);
std::optional<OrientationScheme> orientation_from_string(std::string_view s);

struct LayoutConfig {
  LayoutMode mode = LayoutMode::kSequential;
  std::size_t dims = 4;
  /// Positive per-coordinate weights; empty means all ones.
  std::vector<double> weights;
  OrientationScheme orientation = OrientationScheme::kAuto;
  /// Optional guide per pair; empty selects the default assignment.
  std::vector<Guide> guides;
  std::size_t arc_table_resolution = 4096;
  RootSelection root_selection = RootSelection::kOrderedAlongGuide;
};

/// Placement of one coordinate on the central ellipse.
struct CoordinateSlot {
  double origin = 0.0;  // arc position of value 0 (static layouts)
  double span = 0.0;    // arc fraction swept by value 1
  int direction = 1;    // +1 clockwise, -1 counter-clockwise
  Guide guide = Guide::kRightOfM;
  ArcSide side = ArcSide::kUpper;
};

struct CoordinateAnchor {
  std::size_t index = 0;
  double value = 0.0;
  double arc_position = 0.0;  // fraction of circumference from the origin mark
  Point point;
};

/// A validated, precomputed layout bound to one central ellipse. Immutable
/// after construction and safe to share between threads.
class Layout {
 public:
  /// Throws ConfigurationError when the configuration cannot be realised
  /// (odd dimension, asymmetric mirror weights, unreachable sectors, ...).
  Layout(LayoutConfig config, EllipseSpec ellipse);

  const LayoutConfig& config() const { return config_; }
  const EllipseSpec& ellipse() const { return arcs_.ellipse(); }
  const ArcLengthTable& arcs() const { return arcs_; }
  LayoutMode mode() const { return config_.mode; }
  bool is_dynamic() const { return config_.mode == LayoutMode::kDynamic; }
  std::size_t dims() const { return slots_.size(); }
  std::size_t pair_count() const { return slots_.size() / 2; }

  const CoordinateSlot& slot(std::size_t i) const { return slots_.at(i); }
  const std::vector<double>& weights() const { return weights_; }
  /// Arc fraction owned by each coordinate (static), or step scale (dynamic).
  std::vector<double> sector_fractions() const;
  Guide pair_guide(std::size_t pair) const { return slots_.at(2 * pair).guide; }

  /// Anchors `value` for coordinate `index`. In dynamic mode `previous` is the
  /// running arc position of the preceding coordinate (0 for the first).
  /// Throws DomainError for values outside [0, 1].
  CoordinateAnchor anchor(double value, std::size_t index, double previous = 0.0) const;

  /// Value of coordinate `index` whose anchor sits at arc position `s`. Not
  /// clamped: callers check the result against [0, 1].
  double value_at(std::size_t index, double s, double previous = 0.0) const;

  /// Canonical JSON text identifying everything that changes the embedding.
  std::string fingerprint() const;

 private:
  void build_static();
  void build_dynamic();
  void assign_static_sides();

  LayoutConfig config_;
  ArcLengthTable arcs_;
  std::vector<double> weights_;
  std::vector<CoordinateSlot> slots_;
};

/// Sector plan of a configuration: origin, span and direction per coordinate,
/// before any guide or orientation is chosen. Throws ConfigurationError for
/// invalid dimensions or weights.
std::vector<CoordinateSlot> plan_sectors(const LayoutConfig& config);

/// Anchor of one value computed from the sector plan alone, without checking
/// that the configuration is realisable. Throws DomainError for values
/// outside [0, 1].
CoordinateAnchor anchor_value(double value, std::size_t index, const LayoutConfig& config,
                              const EllipseSpec& ellipse, double previous = 0.0);

/// Coordinate each coordinate of a mirror layout is reflected onto; mirror
/// weights must agree between partners. `dims` must be even.
std::vector<std::size_t> mirror_partners(std::size_t dims);

/// Default guide of pair `pair` out of `pairs`: right of M for the first
/// half, left of M for the second, below N for the middle pair when the pair
/// count is odd. A single pair sits right of M.
Guide default_guide(std::size_t pair, std::size_t pairs);

}  // namespace epc
