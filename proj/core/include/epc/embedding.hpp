#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "epc/geometry.hpp"
#include "epc/layout.hpp"

namespace epc {

using ClassId = std::uint32_t;

/// How one coordinate was drawn in a dynamic layout, where guides are chosen
/// per point and cannot be read off the layout: the guide its side ellipse is
/// tangent to, which of the two centers at unit distance from the node it
/// used, and which of the central-ellipse crossings is its anchor.
struct CoordinateTrace {
  Guide guide = Guide::kRightOfM;
  std::uint8_t center_branch = 0;
  std::uint8_t anchor_branch = 0;
};

/// Lossless 2-D image of one n-D point: nodes P_1..P_m joined by the edges
/// P_k -> P_k+1.
struct EpcGraph {
  std::vector<Point> nodes;
  ClassId label = 0;
  std::size_t row = 0;
  std::vector<CoordinateTrace> trace;  // dynamic layouts only, one per coordinate

  std::size_t edge_count() const { return nodes.empty() ? 0 : nodes.size() - 1; }
};

/// Maps a normalized point to its graph. Throws DomainError for components
/// outside [0, 1] and GeometryError when a construction has no solution.
EpcGraph embed(std::span<const double> point, const Layout& layout, ClassId label = 0,
               std::size_t row = 0);

/// Recovers the normalized point from a graph produced by `embed` under the
/// same layout. Throws InversionError when a node is off every reachable locus.
std::vector<double> invert(const EpcGraph& graph, const Layout& layout);

/// Values (x_2k+1, x_2k+2) of static pair `pair` whose node is `node`, or
/// nullopt when no admissible pair of anchors produces it.
std::optional<std::array<double, 2>> invert_node(Point node, std::size_t pair,
                                                 const Layout& layout, double tolerance = 1e-7);

/// The side ellipses used for every coordinate of `point`, in coordinate order.
std::vector<SideEllipse> side_ellipses(std::span<const double> point, const Layout& layout);

/// Embeds every row; geometry errors are re-thrown tagged with the row index.
std::vector<EpcGraph> embed_rows(const std::vector<std::vector<double>>& rows,
                                 std::span<const ClassId> labels, const Layout& layout);

/// 4-D points (x1, x2, x1, x2) whose mirror-layout graphs lie on the
/// horizontal line y = line_y, spread evenly over the reachable part of the
/// line. Throws ConfigurationError unless the layout is a 4-D mirror layout
/// and GeometryError when the line misses the reachable region.
std::vector<std::array<double, 4>> points_on_horizontal_line(double line_y, std::size_t count,
                                                             const Layout& layout);

}  // namespace epc
