#include "epc/geometry.hpp"

#include <cmath>
#include <string>

#include "epc/errors.hpp"

namespace epc {
namespace {

// Slack for discriminants that should be exactly zero at tangency.
constexpr double kTangencySlack = 1e-12;

double clamped_sqrt(double v, double slack, const char* what) {
  if (v < -slack) {
    throw GeometryError(what);
  }
  return v <= 0.0 ? 0.0 : std::sqrt(v);
}

}  // namespace

EllipseSpec::EllipseSpec(double cx, double cy, double width, double height)
    : cx_(cx), cy_(cy), rw_(width / 2.0), rh_(height / 2.0) {
  if (!(width > 0.0) || !(height > 0.0) || !std::isfinite(width) || !std::isfinite(height) ||
      !std::isfinite(cx) || !std::isfinite(cy)) {
    throw DomainError("ellipse width and height must be finite and positive");
  }
}

std::string_view to_string(Guide g) {
  switch (g) {
    case Guide::kRightOfM: return "M-right";
    case Guide::kLeftOfM: return "M-left";
    case Guide::kAboveN: return "N-top";
    case Guide::kBelowN: return "N-bottom";
  }
  return "?";
}

std::optional<Guide> guide_from_string(std::string_view s) {
  for (Guide g : {Guide::kRightOfM, Guide::kLeftOfM, Guide::kAboveN, Guide::kBelowN}) {
    if (to_string(g) == s) return g;
  }
  return std::nullopt;
}

std::string_view to_string(ArcSide s) { return s == ArcSide::kUpper ? "upper" : "lower"; }

GuideFrame frame_of(Guide g) {
  switch (g) {
    case Guide::kRightOfM: return {{1.0, 0.0}, {0.0, 1.0}};
    case Guide::kLeftOfM: return {{-1.0, 0.0}, {0.0, 1.0}};
    case Guide::kAboveN: return {{0.0, 1.0}, {1.0, 0.0}};
    case Guide::kBelowN: return {{0.0, -1.0}, {1.0, 0.0}};
  }
  return {{1.0, 0.0}, {0.0, 1.0}};
}

SideEllipse side_ellipse_for_anchor(const EllipseSpec& ellipse, Point anchor, Guide guide,
                                    ArcSide side, PairRole role,
                                    std::optional<std::size_t> coordinate) {
  const GuideFrame f = frame_of(guide);
  const Point u = ellipse.to_unit(anchor);
  const double p = dot(u, f.normal);  // distance from the guide line
  const double q = dot(u, f.along);
  const double disc = 1.0 - (p - 1.0) * (p - 1.0);
  if (disc < -kTangencySlack) {
    std::string msg = "anchor is out of reach of guide ";
    msg += to_string(guide);
    if (coordinate) msg += " for coordinate X" + std::to_string(*coordinate + 1);
    throw GeometryError(msg);
  }
  const double r = disc <= 0.0 ? 0.0 : std::sqrt(disc);
  const double offset = side == ArcSide::kUpper ? q - r : q + r;
  const Point center_unit = f.normal + offset * f.along;
  return {ellipse.from_unit(center_unit), offset, guide, side, role};
}

std::array<Point, 2> intersection_candidates(const EllipseSpec& ellipse, Point center1,
                                             Point center2) {
  // In the unit frame both ellipses are unit circles. Subtracting their
  // equations gives the radical line 2(c2-c1).u = |c2|^2 - |c1|^2, which for
  // equal radii is the perpendicular bisector of the centers.
  const Point c1 = ellipse.to_unit(center1);
  const Point c2 = ellipse.to_unit(center2);
  const Point d = c2 - c1;
  const double len = norm(d);
  if (len == 0.0) {
    throw DegenerateInputError("side ellipses have coincident centers");
  }
  const Point mid = 0.5 * (c1 + c2);
  const double h = clamped_sqrt(1.0 - 0.25 * len * len, kTangencySlack,
                                "side ellipses do not intersect");
  const Point perp{-d.y / len, d.x / len};
  return {ellipse.from_unit(mid + h * perp), ellipse.from_unit(mid - h * perp)};
}

Point intersect_equal_ellipses(const EllipseSpec& ellipse, const SideEllipse& first,
                               const SideEllipse& second, RootSelection rule) {
  if (rule == RootSelection::kOrderedAlongGuide && first.guide == second.guide &&
      std::abs(first.offset - second.offset) <= 1e-12) {
    // One ellipse through both anchors. The near root tends to the tangency
    // point as the offsets meet, and no other pair of offsets lands there.
    return ellipse.from_unit(first.offset * frame_of(first.guide).along);
  }
  std::array<Point, 2> cands;
  if (first.guide == second.guide) {
    // Both centers sit at unit distance from the guide, so the roots follow
    // from the offsets alone: halfway along the guide, 1 -+ h away from it.
    // Working from the offsets keeps the along-guide coordinate exact.
    const GuideFrame f = frame_of(first.guide);
    const double half = 0.5 * (second.offset - first.offset);
    if (half == 0.0) throw DegenerateInputError("side ellipses have coincident centers");
    const double h = clamped_sqrt(1.0 - half * half, kTangencySlack, "side ellipses do not intersect");
    const double mid = 0.5 * (first.offset + second.offset);
    cands = {ellipse.from_unit((1.0 - h) * f.normal + mid * f.along),
             ellipse.from_unit((1.0 + h) * f.normal + mid * f.along)};
  } else {
    cands = intersection_candidates(ellipse, first.center, second.center);
  }
  switch (rule) {
    case RootSelection::kInsideNearestCenter: {
      const double r0 = norm(ellipse.to_unit(cands[0]));
      const double r1 = norm(ellipse.to_unit(cands[1]));
      return r1 < r0 ? cands[1] : cands[0];
    }
    case RootSelection::kOrderedAlongGuide: {
      if (first.guide != second.guide) {
        throw GeometryError("ordered root selection needs both ellipses on one guide");
      }
      const GuideFrame f = frame_of(first.guide);
      const double p0 = dot(ellipse.to_unit(cands[0]), f.normal);
      const double p1 = dot(ellipse.to_unit(cands[1]), f.normal);
      const bool want_near = first.offset <= second.offset;
      const bool first_is_near = p0 <= p1;
      return want_near == first_is_near ? cands[0] : cands[1];
    }
  }
  return cands[0];
}

std::array<Point, 2> intersect_with_central(const EllipseSpec& ellipse, Point center) {
  return intersection_candidates(ellipse, ellipse.center(), center);
}

}  // namespace epc
