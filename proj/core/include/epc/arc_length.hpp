#pragma once

#include <cstddef>
#include <vector>

#include "epc/geometry.hpp"

namespace epc {

/// Arc-length parameterization of an ellipse outline, measured clockwise from
/// the top point as a fraction of the circumference in [0, 1).
///
/// Ellipse arc length has no elementary closed form, so a cumulative-length
/// table over the parametric angle is built once (Gauss-Legendre per cell) and
/// inverted by binary search followed by Newton polishing. Circles bypass the
/// table and use the exact angle.
class ArcLengthTable {
 public:
  explicit ArcLengthTable(const EllipseSpec& ellipse, std::size_t resolution = 4096);

  /// Parametric angle (clockwise from the top, radians in [0, 2pi)) of the
  /// point at circumference fraction `s`; `s` is wrapped into [0, 1).
  double angle_at(double s) const;
  /// Inverse of angle_at.
  double fraction_at(double angle) const;

  Point point_at(double s) const;
  /// Fraction of the outline point nearest to `p` in parametric angle.
  double fraction_of(Point p) const;

  double circumference() const { return total_; }
  std::size_t resolution() const { return resolution_; }
  const EllipseSpec& ellipse() const { return ellipse_; }

 private:
  double speed(double angle) const;
  double integrate(double a, double b) const;

  EllipseSpec ellipse_;
  std::size_t resolution_;
  double step_ = 0.0;
  double total_ = 0.0;
  std::vector<double> cumulative_;  // resolution_ + 1 entries, cumulative_[0] == 0
};

/// Wraps `s` into [0, 1).
double wrap_unit(double s);

}  // namespace epc
