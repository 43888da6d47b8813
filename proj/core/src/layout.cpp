#include "epc/layout.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>

#include "epc/errors.hpp"
#include "json.hpp"

namespace epc {
namespace {

constexpr std::size_t kSideSamples = 129;
constexpr double kReachSlack = 1e-12;

double wrap_centered(double x) { return x - std::floor(x + 0.5); }

struct SideProfile {
  std::vector<double> offsets;
  bool reachable = true;
  bool monotone = true;
};

}  // namespace

std::string_view to_string(LayoutMode m) {
  switch (m) {
    case LayoutMode::kSequential: return "seq";
    case LayoutMode::kMirror: return "mirror";
    case LayoutMode::kDynamic: return "dynamic";
  }
  return "?";
}

std::optional<LayoutMode> layout_mode_from_string(std::string_view s) {
  if (s == "seq" || s == "sequential") return LayoutMode::kSequential;
  if (s == "mirror") return LayoutMode::kMirror;
  if (s == "dynamic") return LayoutMode::kDynamic;
  return std::nullopt;
}

std::string_view to_string(OrientationScheme s) {
  switch (s) {
    case OrientationScheme::kAuto: return "auto";
    case OrientationScheme::kAlternating: return "alternating";
    case OrientationScheme::kAllUp: return "all-up";
    case OrientationScheme::kAllDown: return "all-down";
  }
  return "?";
}

std::optional<OrientationScheme> orientation_from_string(std::string_view s) {
  for (auto o : {OrientationScheme::kAuto, OrientationScheme::kAlternating,
                 OrientationScheme::kAllUp, OrientationScheme::kAllDown}) {
    if (to_string(o) == s) return o;
  }
  return std::nullopt;
}

Guide default_guide(std::size_t pair, std::size_t pairs) {
  if (pairs <= 1) return Guide::kRightOfM;
  const std::size_t half = pairs / 2;
  if (pair < half) return Guide::kRightOfM;
  if (pairs % 2 == 1 && pair == half) return Guide::kBelowN;
  return Guide::kLeftOfM;
}

namespace {

std::vector<double> resolved_weights(const LayoutConfig& config) {
  const std::size_t n = config.dims;
  if (n < 2) throw ConfigurationError("a layout needs at least two coordinates");
  if (n % 2 != 0) {
    throw ConfigurationError("layouts need an even coordinate count; pad the dataset first");
  }
  if (config.weights.empty()) return std::vector<double>(n, 1.0);
  if (config.weights.size() != n) {
    throw ConfigurationError("expected " + std::to_string(n) + " weights, got " +
                             std::to_string(config.weights.size()));
  }
  for (double w : config.weights) {
    if (!(w > 0.0) || !std::isfinite(w)) throw ConfigurationError("weights must be positive");
  }
  return config.weights;
}

}  // namespace

std::vector<std::size_t> mirror_partners(std::size_t dims) {
  // Pair k mirrors pair (pairs-1-k) position by position; an odd middle pair
  // mirrors its two members onto each other.
  const std::size_t pairs = dims / 2;
  std::vector<std::size_t> partner(dims);
  for (std::size_t k = 0; k < pairs / 2; ++k) {
    for (std::size_t j = 0; j < 2; ++j) {
      const std::size_t a = 2 * k + j;
      const std::size_t b = 2 * (pairs - 1 - k) + j;
      partner[a] = b;
      partner[b] = a;
    }
  }
  if (pairs % 2 == 1) {
    partner[2 * (pairs / 2)] = 2 * (pairs / 2) + 1;
    partner[2 * (pairs / 2) + 1] = 2 * (pairs / 2);
  }
  return partner;
}

std::vector<CoordinateSlot> plan_sectors(const LayoutConfig& config) {
  const std::vector<double> weights = resolved_weights(config);
  const std::size_t n = weights.size();
  const std::size_t pairs = n / 2;
  std::vector<CoordinateSlot> slots(n);

  if (config.mode == LayoutMode::kDynamic) {
    const double wmax = *std::max_element(weights.begin(), weights.end());
    for (std::size_t i = 0; i < n; ++i) slots[i].span = weights[i] / wmax;
    return slots;
  }

  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  // A lone pair cannot straddle both halves: two equal ellipses tangent to M
  // from opposite sides meet only on M. Its sectors share the right half.
  const double scale = n == 2 ? 0.5 : 1.0;
  for (std::size_t i = 0; i < n; ++i) slots[i].span = scale * weights[i] / total;

  if (config.mode == LayoutMode::kSequential || n == 2) {
    double at = 0.0;
    for (auto& s : slots) {
      s.origin = at;
      at += s.span;
    }
    return slots;
  }

  const std::vector<std::size_t> partner = mirror_partners(n);
  std::vector<std::size_t> right;
  for (std::size_t i = 0; i < n; ++i) {
    if (i < partner[i] || (pairs % 2 == 1 && i == pairs - 1)) right.push_back(i);
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double w = weights[i];
    const double wp = weights[partner[i]];
    if (std::abs(w - wp) > 1e-12 * std::max(w, wp)) {
      throw ConfigurationError("mirror layout needs X" + std::to_string(i + 1) + " and X" +
                               std::to_string(partner[i] + 1) + " to share one weight");
    }
  }
  double at = 0.0;
  for (std::size_t i : right) {
    slots[i].origin = at;
    at += slots[i].span;
    auto& mirror = slots[partner[i]];
    mirror.origin = wrap_unit(1.0 - slots[i].origin);
    mirror.direction = -1;
  }
  return slots;
}

Layout::Layout(LayoutConfig config, EllipseSpec ellipse)
    : config_(std::move(config)),
      arcs_(ellipse, config_.arc_table_resolution),
      weights_(resolved_weights(config_)),
      slots_(plan_sectors(config_)) {
  if (!config_.guides.empty() && config_.guides.size() != slots_.size() / 2) {
    throw ConfigurationError("expected one guide per coordinate pair");
  }
  if (is_dynamic()) {
    build_dynamic();
  } else {
    build_static();
  }
}

void Layout::build_dynamic() {
  const std::size_t pairs = pair_count();
  for (std::size_t i = 0; i < slots_.size(); ++i) {
    auto& s = slots_[i];
    const std::size_t pair = i / 2;
    s.guide = config_.guides.empty() ? default_guide(pair, pairs) : config_.guides[pair];
    const bool first = i % 2 == 0;
    switch (config_.orientation) {
      case OrientationScheme::kAuto:
      case OrientationScheme::kAlternating:
        s.side = first ? ArcSide::kUpper : ArcSide::kLower;
        break;
      case OrientationScheme::kAllUp: s.side = ArcSide::kLower; break;
      case OrientationScheme::kAllDown: s.side = ArcSide::kUpper; break;
    }
  }
}

void Layout::build_static() {
  const std::size_t pairs = pair_count();
  auto sector_reachable = [&](std::size_t i, Guide g) {
    const GuideFrame f = frame_of(g);
    const auto& s = slots_[i];
    for (std::size_t k = 0; k <= 64; ++k) {
      const double v = static_cast<double>(k) / 64.0;
      const Point u = ellipse().to_unit(arcs_.point_at(s.origin + s.direction * v * s.span));
      if (dot(u, f.normal) < -kReachSlack) return false;
    }
    return true;
  };

  for (std::size_t k = 0; k < pairs; ++k) {
    Guide g = config_.guides.empty() ? default_guide(k, pairs) : config_.guides[k];
    const bool ok = sector_reachable(2 * k, g) && sector_reachable(2 * k + 1, g);
    if (!ok) {
      bool found = false;
      if (config_.guides.empty()) {
        for (Guide alt : {Guide::kRightOfM, Guide::kLeftOfM, Guide::kBelowN, Guide::kAboveN}) {
          if (sector_reachable(2 * k, alt) && sector_reachable(2 * k + 1, alt)) {
            g = alt;
            found = true;
            break;
          }
        }
      }
      if (!found) {
        throw ConfigurationError("sectors of X" + std::to_string(2 * k + 1) + " and X" +
                                 std::to_string(2 * k + 2) +
                                 " do not fit on one side of any guide line");
      }
    }
    slots_[2 * k].guide = g;
    slots_[2 * k + 1].guide = g;
  }
  assign_static_sides();
}

void Layout::assign_static_sides() {
  const std::size_t pairs = pair_count();
  if (config_.orientation != OrientationScheme::kAuto) {
    for (std::size_t i = 0; i < slots_.size(); ++i) {
      switch (config_.orientation) {
        case OrientationScheme::kAlternating:
          slots_[i].side = i % 2 == 0 ? ArcSide::kUpper : ArcSide::kLower;
          break;
        case OrientationScheme::kAllUp: slots_[i].side = ArcSide::kLower; break;
        default: slots_[i].side = ArcSide::kUpper; break;
      }
    }
    return;
  }

  auto profile = [&](std::size_t i, ArcSide side) {
    SideProfile prof;
    const auto& s = slots_[i];
    prof.offsets.reserve(kSideSamples);
    for (std::size_t k = 0; k < kSideSamples; ++k) {
      const double v = static_cast<double>(k) / static_cast<double>(kSideSamples - 1);
      const Point a = arcs_.point_at(s.origin + s.direction * v * s.span);
      try {
        prof.offsets.push_back(
            side_ellipse_for_anchor(ellipse(), a, s.guide, side, PairRole::kFirst).offset);
      } catch (const GeometryError&) {
        prof.reachable = false;
        return prof;
      }
    }
    const bool rising = prof.offsets.back() > prof.offsets.front();
    for (std::size_t k = 1; k < prof.offsets.size(); ++k) {
      const double d = prof.offsets[k] - prof.offsets[k - 1];
      if (rising ? !(d > 0.0) : !(d < 0.0)) prof.monotone = false;
    }
    return prof;
  };

  auto preferred = [&](std::size_t i) {
    const auto& s = slots_[i];
    const Point mid = ellipse().to_unit(arcs_.point_at(s.origin + s.direction * 0.5 * s.span));
    return dot(mid, frame_of(s.guide).along) >= 0.0 ? ArcSide::kUpper : ArcSide::kLower;
  };

  for (std::size_t k = 0; k < pairs; ++k) {
    const std::size_t a = 2 * k;
    const std::size_t b = 2 * k + 1;
    std::vector<std::array<ArcSide, 2>> combos = {{preferred(a), preferred(b)},
                                                  {ArcSide::kUpper, ArcSide::kLower},
                                                  {ArcSide::kLower, ArcSide::kUpper},
                                                  {ArcSide::kUpper, ArcSide::kUpper},
                                                  {ArcSide::kLower, ArcSide::kLower}};
    bool assigned = false;
    for (const auto& combo : combos) {
      const SideProfile pa = profile(a, combo[0]);
      const SideProfile pb = profile(b, combo[1]);
      if (!pa.reachable || !pb.reachable || !pa.monotone || !pb.monotone) continue;
      // Equal ellipses on one guide meet only while their offsets differ by at most 2.
      const auto [alo, ahi] = std::minmax_element(pa.offsets.begin(), pa.offsets.end());
      const auto [blo, bhi] = std::minmax_element(pb.offsets.begin(), pb.offsets.end());
      const double gap = std::max(*ahi - *blo, *bhi - *alo);
      if (gap > 2.0 + 1e-12) continue;
      slots_[a].side = combo[0];
      slots_[b].side = combo[1];
      assigned = true;
      break;
    }
    if (!assigned) {
      throw ConfigurationError("no side-ellipse orientation keeps pair (X" + std::to_string(a + 1) +
                               ", X" + std::to_string(b + 1) + ") invertible");
    }
  }
}

std::vector<double> Layout::sector_fractions() const {
  std::vector<double> out;
  out.reserve(slots_.size());
  for (const auto& s : slots_) out.push_back(s.span);
  return out;
}

CoordinateAnchor Layout::anchor(double value, std::size_t index, double previous) const {
  if (index >= slots_.size()) throw DomainError("coordinate index out of range");
  if (!(value >= 0.0 && value <= 1.0)) {
    throw DomainError("value of X" + std::to_string(index + 1) + " is outside [0, 1]");
  }
  const auto& s = slots_[index];
  const double pos = is_dynamic() ? wrap_unit(previous + value * s.span)
                                  : wrap_unit(s.origin + s.direction * value * s.span);
  return {index, value, pos, arcs_.point_at(pos)};
}

double Layout::value_at(std::size_t index, double s, double previous) const {
  const auto& slot = slots_.at(index);
  if (is_dynamic()) {
    // A full turn is the same anchor as no step; rounding just below the
    // previous position must not read as a full turn.
    double d = wrap_unit(s - previous);
    if (d > 1.0 - 1e-11) d -= 1.0;
    return d / slot.span;
  }
  const double half = 0.5 * slot.span;
  const double delta = half + wrap_centered(slot.direction * (s - slot.origin) - half);
  return delta / slot.span;
}

std::string Layout::fingerprint() const {
  nlohmann::json j;
  j["mode"] = std::string(to_string(config_.mode));
  j["dims"] = slots_.size();
  j["weights"] = weights_;
  j["orientation"] = std::string(to_string(config_.orientation));
  j["root"] = config_.root_selection == RootSelection::kOrderedAlongGuide ? "ordered" : "inside";
  j["arc_resolution"] = config_.arc_table_resolution;
  j["ellipse"] = {{"cx", ellipse().cx()},
                  {"cy", ellipse().cy()},
                  {"w", ellipse().width()},
                  {"h", ellipse().height()}};
  auto& sectors = j["sectors"] = nlohmann::json::array();
  for (const auto& s : slots_) {
    sectors.push_back({{"origin", s.origin},
                       {"span", s.span},
                       {"direction", s.direction},
                       {"guide", std::string(to_string(s.guide))},
                       {"side", std::string(to_string(s.side))}});
  }
  return j.dump();
}

CoordinateAnchor anchor_value(double value, std::size_t index, const LayoutConfig& config,
                              const EllipseSpec& ellipse, double previous) {
  const auto slots = plan_sectors(config);
  if (index >= slots.size()) throw DomainError("coordinate index out of range");
  if (!(value >= 0.0 && value <= 1.0)) {
    throw DomainError("value of X" + std::to_string(index + 1) + " is outside [0, 1]");
  }
  const auto& s = slots[index];
  const double pos = config.mode == LayoutMode::kDynamic
                         ? wrap_unit(previous + value * s.span)
                         : wrap_unit(s.origin + s.direction * value * s.span);
  const ArcLengthTable arcs(ellipse, config.arc_table_resolution);
  return {index, value, pos, arcs.point_at(pos)};
}

}  // namespace epc
