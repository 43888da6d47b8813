#include "epc/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "epc/errors.hpp"

namespace epc {
namespace {

struct PairBuild {
  SideEllipse first;
  SideEllipse second;
  Point node;
};

struct PairChoice {
  Guide first_guide;
  ArcSide first_side;
  Guide second_guide;
  ArcSide second_side;
};

PairBuild build_pair(const Layout& layout, const PairChoice& c, const CoordinateAnchor& a,
                     const CoordinateAnchor& b) {
  const auto& ell = layout.ellipse();
  PairBuild out{side_ellipse_for_anchor(ell, a.point, c.first_guide, c.first_side,
                                        PairRole::kFirst, a.index),
                side_ellipse_for_anchor(ell, b.point, c.second_guide, c.second_side,
                                        PairRole::kSecond, b.index),
                {}};
  const Guide first_guide = c.first_guide;
  const Guide second_guide = c.second_guide;
  const RootSelection rule = first_guide == second_guide ? layout.config().root_selection
                                                         : RootSelection::kInsideNearestCenter;
  try {
    out.node = intersect_equal_ellipses(ell, out.first, out.second, rule);
  } catch (const DegenerateInputError&) {
    throw;
  } catch (const GeometryError& e) {
    throw GeometryError(std::string(e.what()) + " for pair (X" + std::to_string(a.index + 1) +
                        ", X" + std::to_string(b.index + 1) + ")");
  }
  return out;
}

// Constructions tried for a dynamic pair: the preset orientation before any
// flipped one; within each, shared guides first (the pair's own leading),
// then every mixed combination.
std::vector<PairChoice> dynamic_choices(Guide preferred, ArcSide first_side, ArcSide second_side) {
  constexpr std::array<Guide, 4> all{Guide::kRightOfM, Guide::kLeftOfM, Guide::kBelowN,
                                     Guide::kAboveN};
  std::vector<std::array<Guide, 2>> guides{{preferred, preferred}};
  for (Guide g : all) {
    if (g != preferred) guides.push_back({g, g});
  }
  for (Guide g1 : all) {
    for (Guide g2 : all) {
      if (g1 != g2) guides.push_back({g1, g2});
    }
  }
  auto flip = [](ArcSide s) { return s == ArcSide::kUpper ? ArcSide::kLower : ArcSide::kUpper; };
  const std::array<std::array<ArcSide, 2>, 4> sides{{{first_side, second_side},
                                                     {first_side, flip(second_side)},
                                                     {flip(first_side), second_side},
                                                     {flip(first_side), flip(second_side)}}};
  std::vector<PairChoice> out;
  out.reserve(sides.size() * guides.size());
  for (const auto& sd : sides) {
    for (const auto& g : guides) out.push_back({g[0], sd[0], g[1], sd[1]});
  }
  return out;
}

CoordinateTrace trace_of(const EllipseSpec& ell, const SideEllipse& e, Point node, Point anchor) {
  const GuideFrame f = frame_of(e.guide);
  const double q = dot(ell.to_unit(node), f.along);
  const auto cands = intersect_with_central(ell, e.center);
  return {e.guide, static_cast<std::uint8_t>(e.offset > q ? 1 : 0),
          static_cast<std::uint8_t>(distance(cands[1], anchor) < distance(cands[0], anchor) ? 1 : 0)};
}

struct Built {
  std::vector<PairBuild> pairs;
  std::vector<CoordinateTrace> trace;
};

Built build_all(std::span<const double> point, const Layout& layout) {
  if (point.size() != layout.dims()) {
    throw DomainError("point has " + std::to_string(point.size()) + " components, layout expects " +
                      std::to_string(layout.dims()));
  }
  Built out;
  out.pairs.reserve(layout.pair_count());
  if (!layout.is_dynamic()) {
    for (std::size_t k = 0; k < layout.pair_count(); ++k) {
      const auto a = layout.anchor(point[2 * k], 2 * k);
      const auto b = layout.anchor(point[2 * k + 1], 2 * k + 1);
      const Guide g = layout.pair_guide(k);
      out.pairs.push_back(
          build_pair(layout, {g, layout.slot(2 * k).side, g, layout.slot(2 * k + 1).side}, a, b));
    }
    return out;
  }

  out.trace.reserve(layout.dims());
  double previous = 0.0;
  for (std::size_t k = 0; k < layout.pair_count(); ++k) {
    const auto a = layout.anchor(point[2 * k], 2 * k, previous);
    const auto b = layout.anchor(point[2 * k + 1], 2 * k + 1, a.arc_position);
    previous = b.arc_position;
    std::string last_error;
    bool built = false;
    for (const auto& choice : dynamic_choices(layout.pair_guide(k), layout.slot(2 * k).side,
                                              layout.slot(2 * k + 1).side)) {
      try {
        PairBuild pb = build_pair(layout, choice, a, b);
        out.trace.push_back(trace_of(layout.ellipse(), pb.first, pb.node, a.point));
        out.trace.push_back(trace_of(layout.ellipse(), pb.second, pb.node, b.point));
        out.pairs.push_back(pb);
        built = true;
        break;
      } catch (const GeometryError& e) {
        last_error = e.what();
      }
    }
    if (!built) {
      throw GeometryError("no combination of guide lines joins the anchors of pair (X" +
                          std::to_string(2 * k + 1) + ", X" + std::to_string(2 * k + 2) +
                          "): " + last_error);
    }
  }
  return out;
}

// Centers of the two side ellipses through `node`, as offsets along the guide,
// first coordinate first. Ordered root selection makes the assignment unique.
std::optional<std::array<double, 2>> offsets_through(const EllipseSpec& ell, Point node,
                                                     Guide guide, double tolerance) {
  const GuideFrame f = frame_of(guide);
  const Point u = ell.to_unit(node);
  const double p = dot(u, f.normal);
  const double q = dot(u, f.along);
  const double disc = 1.0 - (p - 1.0) * (p - 1.0);
  if (disc < -tolerance) return std::nullopt;
  const double r = disc <= 0.0 ? 0.0 : std::sqrt(disc);
  if (p <= 1.0) return std::array<double, 2>{q - r, q + r};
  return std::array<double, 2>{q + r, q - r};
}

Point center_for(const EllipseSpec& ell, Guide guide, double offset) {
  const GuideFrame f = frame_of(guide);
  return ell.from_unit(f.normal + offset * f.along);
}

struct Decoded {
  double value = 0.0;
  double position = 0.0;
  double score = 0.0;
};

Decoded decode_static(const Layout& layout, std::size_t index, Guide guide, double offset) {
  const auto& ell = layout.ellipse();
  const auto cands = intersect_with_central(ell, center_for(ell, guide, offset));
  const ArcSide side = layout.slot(index).side;
  const GuideFrame f = frame_of(guide);
  Decoded best{0.0, 0.0, INFINITY};
  for (const Point& c : cands) {
    const double s = layout.arcs().fraction_of(c);
    const double v = layout.value_at(index, s);
    const double rel = dot(ell.to_unit(c), f.along) - offset;
    const double side_violation = side == ArcSide::kUpper ? std::max(0.0, -rel)
                                                          : std::max(0.0, rel);
    const double range_violation = std::max({0.0, -v, v - 1.0});
    const double score = side_violation + range_violation;
    if (score < best.score) best = {v, s, score};
  }
  return best;
}

}  // namespace

EpcGraph embed(std::span<const double> point, const Layout& layout, ClassId label,
               std::size_t row) {
  EpcGraph g;
  g.label = label;
  g.row = row;
  Built built = build_all(point, layout);
  g.nodes.reserve(built.pairs.size());
  for (const auto& p : built.pairs) g.nodes.push_back(p.node);
  g.trace = std::move(built.trace);
  return g;
}

std::vector<SideEllipse> side_ellipses(std::span<const double> point, const Layout& layout) {
  std::vector<SideEllipse> out;
  for (const auto& p : build_all(point, layout).pairs) {
    out.push_back(p.first);
    out.push_back(p.second);
  }
  return out;
}

std::optional<std::array<double, 2>> invert_node(Point node, std::size_t pair,
                                                 const Layout& layout, double tolerance) {
  if (layout.is_dynamic()) {
    throw ConfigurationError("dynamic layouts are inverted per graph, not per node");
  }
  const Guide guide = layout.pair_guide(pair);
  const auto ordered = offsets_through(layout.ellipse(), node, guide, tolerance);
  if (!ordered) return std::nullopt;
  // The swapped assignment is needed without the ordering convention, and at
  // tangency, where the ordering cannot be read off the node.
  const std::vector<std::array<double, 2>> assignments{*ordered, {(*ordered)[1], (*ordered)[0]}};
  for (const auto& offs : assignments) {
    const Decoded a = decode_static(layout, 2 * pair, guide, offs[0]);
    const Decoded b = decode_static(layout, 2 * pair + 1, guide, offs[1]);
    if (a.score <= tolerance && b.score <= tolerance) {
      return std::array<double, 2>{std::clamp(a.value, 0.0, 1.0), std::clamp(b.value, 0.0, 1.0)};
    }
  }
  return std::nullopt;
}

std::vector<double> invert(const EpcGraph& graph, const Layout& layout) {
  if (graph.nodes.size() != layout.pair_count()) {
    throw InversionError("graph has " + std::to_string(graph.nodes.size()) +
                         " nodes, layout expects " + std::to_string(layout.pair_count()));
  }
  std::vector<double> out(layout.dims());
  if (!layout.is_dynamic()) {
    for (std::size_t k = 0; k < graph.nodes.size(); ++k) {
      const auto vals = invert_node(graph.nodes[k], k, layout);
      if (!vals) {
        throw InversionError("node P" + std::to_string(k + 1) + " is off every reachable locus");
      }
      out[2 * k] = (*vals)[0];
      out[2 * k + 1] = (*vals)[1];
    }
    return out;
  }

  if (graph.trace.size() != layout.dims()) {
    throw InversionError("dynamic graph is missing its construction trace");
  }
  const auto& ell = layout.ellipse();
  double previous = 0.0;
  for (std::size_t i = 0; i < layout.dims(); ++i) {
    const CoordinateTrace& t = graph.trace[i];
    const GuideFrame f = frame_of(t.guide);
    const Point u = ell.to_unit(graph.nodes[i / 2]);
    const double p = dot(u, f.normal);
    const double q = dot(u, f.along);
    const double disc = 1.0 - (p - 1.0) * (p - 1.0);
    if (disc < -1e-7) {
      throw InversionError("node P" + std::to_string(i / 2 + 1) + " is out of reach of guide " +
                           std::string(to_string(t.guide)));
    }
    const double r = disc <= 0.0 ? 0.0 : std::sqrt(disc);
    const double offset = t.center_branch ? q + r : q - r;
    const auto cands = intersect_with_central(ell, center_for(ell, t.guide, offset));
    const double s = layout.arcs().fraction_of(cands[t.anchor_branch & 1U]);
    const double v = layout.value_at(i, s, previous);
    if (v > 1.0 + 1e-7) {
      throw InversionError("decoded value of X" + std::to_string(i + 1) + " exceeds 1");
    }
    out[i] = std::clamp(v, 0.0, 1.0);
    previous = s;
  }
  return out;
}

std::vector<EpcGraph> embed_rows(const std::vector<std::vector<double>>& rows,
                                 std::span<const ClassId> labels, const Layout& layout) {
  if (!labels.empty() && labels.size() != rows.size()) {
    throw DataError("label count does not match row count");
  }
  std::vector<EpcGraph> out;
  out.reserve(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    try {
      out.push_back(embed(rows[r], layout, labels.empty() ? 0 : labels[r], r));
    } catch (const DomainError& e) {
      throw DomainError("row " + std::to_string(r) + ": " + e.what());
    } catch (const GeometryError& e) {
      throw GeometryError("row " + std::to_string(r) + ": " + e.what());
    }
  }
  return out;
}

std::vector<std::array<double, 4>> points_on_horizontal_line(double line_y, std::size_t count,
                                                             const Layout& layout) {
  if (layout.mode() != LayoutMode::kMirror || layout.dims() != 4) {
    throw ConfigurationError("horizontal-line families need the 4-D mirror layout");
  }
  if (count == 0) return {};
  const auto& ell = layout.ellipse();
  const GuideFrame f = frame_of(layout.pair_guide(0));
  constexpr std::size_t kSamples = 4001;
  std::vector<std::array<double, 2>> reachable;
  for (std::size_t i = 0; i < kSamples; ++i) {
    const double p = 2.0 * static_cast<double>(i) / static_cast<double>(kSamples - 1);
    const Point u_on_line = ell.to_unit({ell.cx(), line_y});
    // Walk along the normal of the first pair's guide at the requested height.
    const Point u = p * f.normal + dot(u_on_line, f.along) * f.along;
    if (const auto vals = invert_node(ell.from_unit(u), 0, layout)) reachable.push_back(*vals);
  }
  if (reachable.empty()) {
    throw GeometryError("line y = " + std::to_string(line_y) + " misses the reachable node region");
  }
  std::vector<std::array<double, 4>> out;
  out.reserve(count);
  for (std::size_t j = 0; j < count; ++j) {
    const std::size_t idx =
        count == 1 ? reachable.size() / 2
                   : static_cast<std::size_t>(std::llround(static_cast<double>(j) *
                                                           static_cast<double>(reachable.size() - 1) /
                                                           static_cast<double>(count - 1)));
    const auto& v = reachable[idx];
    out.push_back({v[0], v[1], v[0], v[1]});
  }
  return out;
}

}  // namespace epc
