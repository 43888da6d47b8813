#include "epc/arc_length.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "epc/errors.hpp"

namespace epc {
namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// 8-point Gauss-Legendre nodes and weights on [-1, 1].
constexpr double kGaussNodes[8] = {-0.9602898564975363, -0.7966664774136267,
                                   -0.5255324099163290, -0.1834346424956498,
                                   0.1834346424956498,  0.5255324099163290,
                                   0.7966664774136267,  0.9602898564975363};
constexpr double kGaussWeights[8] = {0.1012285362903763, 0.2223810344533745,
                                     0.3137066458778873, 0.3626837833783620,
                                     0.3626837833783620, 0.3137066458778873,
                                     0.2223810344533745, 0.1012285362903763};

double wrap_angle(double a) {
  double w = std::fmod(a, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  if (w >= kTwoPi) w = 0.0;
  return w;
}

}  // namespace

double wrap_unit(double s) {
  double w = std::fmod(s, 1.0);
  if (w < 0.0) w += 1.0;
  if (w >= 1.0) w = 0.0;
  return w;
}

ArcLengthTable::ArcLengthTable(const EllipseSpec& ellipse, std::size_t resolution)
    : ellipse_(ellipse), resolution_(resolution) {
  if (resolution_ < 8) {
    throw ConfigurationError("arc table resolution must be at least 8");
  }
  if (ellipse_.is_circle()) {
    total_ = kTwoPi * ellipse_.rw();
    return;
  }
  step_ = kTwoPi / static_cast<double>(resolution_);
  cumulative_.resize(resolution_ + 1, 0.0);
  for (std::size_t k = 0; k < resolution_; ++k) {
    const double a = step_ * static_cast<double>(k);
    cumulative_[k + 1] = cumulative_[k] + integrate(a, a + step_);
  }
  total_ = cumulative_.back();
}

double ArcLengthTable::speed(double angle) const {
  // Outline point is (cx + rw sin t, cy + rh cos t).
  const double dx = ellipse_.rw() * std::cos(angle);
  const double dy = ellipse_.rh() * std::sin(angle);
  return std::hypot(dx, dy);
}

double ArcLengthTable::integrate(double a, double b) const {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double sum = 0.0;
  for (int i = 0; i < 8; ++i) sum += kGaussWeights[i] * speed(mid + half * kGaussNodes[i]);
  return half * sum;
}

double ArcLengthTable::fraction_at(double angle) const {
  const double a = wrap_angle(angle);
  if (ellipse_.is_circle()) return wrap_unit(a / kTwoPi);
  auto k = static_cast<std::size_t>(a / step_);
  k = std::min(k, resolution_ - 1);
  const double len = cumulative_[k] + integrate(step_ * static_cast<double>(k), a);
  return wrap_unit(len / total_);
}

double ArcLengthTable::angle_at(double s) const {
  const double f = wrap_unit(s);
  if (ellipse_.is_circle()) return f * kTwoPi;
  // Quarter marks sit exactly at the axis ends by symmetry; the table would
  // leave them ~1e-9 off, which tangent constructions there amplify.
  if (const double q = std::round(4.0 * f); std::abs(4.0 * f - q) <= 1e-13) {
    return wrap_angle(q * 0.5 * std::numbers::pi);
  }
  const double target = f * total_;
  auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), target);
  std::size_t k = it == cumulative_.begin() ? 0 : static_cast<std::size_t>(it - cumulative_.begin()) - 1;
  k = std::min(k, resolution_ - 1);
  const double lo = step_ * static_cast<double>(k);
  const double hi = lo + step_;
  const double seg = cumulative_[k + 1] - cumulative_[k];
  double t = lo + step_ * (target - cumulative_[k]) / seg;
  // Newton on L(t) - target; L' is the outline speed, which never vanishes.
  for (int iter = 0; iter < 8; ++iter) {
    const double err = cumulative_[k] + integrate(lo, t) - target;
    const double next = std::clamp(t - err / speed(t), lo, hi);
    if (std::abs(next - t) <= 1e-15 * kTwoPi) {
      t = next;
      break;
    }
    t = next;
  }
  return wrap_angle(t);
}

Point ArcLengthTable::point_at(double s) const {
  const double f = wrap_unit(s);
  if (const double q = std::round(4.0 * f); std::abs(4.0 * f - q) <= 1e-13) {
    constexpr double kSin[4] = {0.0, 1.0, 0.0, -1.0};
    constexpr double kCos[4] = {1.0, 0.0, -1.0, 0.0};
    const auto k = static_cast<std::size_t>(q) % 4;
    return {ellipse_.cx() + ellipse_.rw() * kSin[k], ellipse_.cy() + ellipse_.rh() * kCos[k]};
  }
  const double t = angle_at(f);
  return {ellipse_.cx() + ellipse_.rw() * std::sin(t), ellipse_.cy() + ellipse_.rh() * std::cos(t)};
}

double ArcLengthTable::fraction_of(Point p) const {
  const Point u = ellipse_.to_unit(p);
  return fraction_at(std::atan2(u.x, u.y));
}

}  // namespace epc
