#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string_view>

namespace epc {

struct Point {
  double x = 0.0;
  double y = 0.0;

  friend constexpr Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Point operator*(double k, Point a) { return {k * a.x, k * a.y}; }
  friend constexpr bool operator==(Point a, Point b) = default;
};

inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double norm(Point a) { return std::hypot(a.x, a.y); }
inline double distance(Point a, Point b) { return norm(a - b); }

/// The central ellipse. Width and height are full extents; every formula in
/// the library works with the semi-axes rw = W/2 and rh = H/2.
class EllipseSpec {
 public:
  /// Throws DomainError unless width > 0 and height > 0.
  EllipseSpec(double cx, double cy, double width, double height);

  /// Circle of radius 1 centred at the origin (W = H = 2).
  static EllipseSpec unit_circle() { return {0.0, 0.0, 2.0, 2.0}; }

  double cx() const { return cx_; }
  double cy() const { return cy_; }
  double width() const { return 2.0 * rw_; }
  double height() const { return 2.0 * rh_; }
  double rw() const { return rw_; }
  double rh() const { return rh_; }
  Point center() const { return {cx_, cy_}; }
  bool is_circle() const { return rw_ == rh_; }

  /// Maps a scene point into the frame where this ellipse is the unit circle.
  Point to_unit(Point p) const { return {(p.x - cx_) / rw_, (p.y - cy_) / rh_}; }
  Point from_unit(Point u) const { return {cx_ + rw_ * u.x, cy_ + rh_ * u.y}; }

  /// (x-cx)^2/rw^2 + (y-cy)^2/rh^2 - 1; zero on the outline.
  double implicit(Point p) const {
    const Point u = to_unit(p);
    return u.x * u.x + u.y * u.y - 1.0;
  }
  bool on_outline(Point p, double tol = 1e-9) const { return std::abs(implicit(p)) <= tol; }

  friend bool operator==(const EllipseSpec&, const EllipseSpec&) = default;

 private:
  double cx_;
  double cy_;
  double rw_;
  double rh_;
};

/// Line a side ellipse is tangent to: the vertical bisector M (side ellipse
/// to its right or left) or the horizontal bisector N (above or below).
enum class Guide : std::uint8_t { kRightOfM, kLeftOfM, kAboveN, kBelowN };

std::string_view to_string(Guide g);
std::optional<Guide> guide_from_string(std::string_view s);

/// Orthonormal frame of a guide in unit-circle coordinates. `normal` points
/// from the guide line towards side-ellipse centers; `along` runs parallel to
/// the guide (+y for M, +x for N).
struct GuideFrame {
  Point normal;
  Point along;
};
GuideFrame frame_of(Guide g);

/// Which arc of its side ellipse an anchor sits on, measured along the guide
/// direction. For vertical guides kUpper is "point on the top arc" (center
/// below the anchor); for horizontal guides kUpper means the anchor is on
/// the +x side of the center.
enum class ArcSide : std::uint8_t { kUpper, kLower };

std::string_view to_string(ArcSide s);

enum class PairRole : std::uint8_t { kFirst, kSecond };

/// Equal-size copy of the central ellipse, tangent to a guide line and passing
/// through one coordinate's anchor.
struct SideEllipse {
  Point center;      // scene coordinates (A, B)
  double offset;     // center position along the guide, unit-circle units
  Guide guide;
  ArcSide side;
  PairRole role;
};

/// Builds the side ellipse through `anchor`. Throws GeometryError if the
/// anchor is out of reach of the guide (negative discriminant); the message
/// names `coordinate` when it is supplied.
SideEllipse side_ellipse_for_anchor(const EllipseSpec& ellipse, Point anchor, Guide guide,
                                    ArcSide side, PairRole role,
                                    std::optional<std::size_t> coordinate = std::nullopt);

/// Both intersection points of two ellipses sharing the semi-axes of
/// `ellipse`. When they touch, the two entries coincide. Throws
/// DegenerateInputError for coincident centers and GeometryError when the
/// ellipses are disjoint.
std::array<Point, 2> intersection_candidates(const EllipseSpec& ellipse, Point center1,
                                             Point center2);

enum class RootSelection : std::uint8_t {
  /// Candidate inside the central ellipse; ties go to the one nearer its center.
  kInsideNearestCenter,
  /// Candidate nearer the guide line when the first ellipse's center precedes
  /// the second's along the guide, the farther one otherwise. Requires both
  /// ellipses to share one guide. Coincident ellipses meet at their point of
  /// tangency with the guide, the limit of the near root.
  kOrderedAlongGuide,
};

Point intersect_equal_ellipses(const EllipseSpec& ellipse, const SideEllipse& first,
                               const SideEllipse& second,
                               RootSelection rule = RootSelection::kInsideNearestCenter);

/// Intersections of a same-size ellipse centred at `center` with the central
/// ellipse itself.
std::array<Point, 2> intersect_with_central(const EllipseSpec& ellipse, Point center);

}  // namespace epc
