#include "epc/rules.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "epc/errors.hpp"

namespace epc {
namespace {

constexpr std::string_view kNotPrefix = "not-";
constexpr std::size_t kMaxGridPositions = std::size_t{1} << 24;

struct Grid {
  double x0 = 0.0;
  double y0 = 0.0;
  double stride = 1.0;
  double w = 0.0;
  double h = 0.0;
  std::size_t nx = 1;
  std::size_t ny = 1;

  double xs(std::size_t i) const { return x0 + static_cast<double>(i) * stride; }
  double ys(std::size_t j) const { return y0 + static_cast<double>(j) * stride; }
  Rect at(std::size_t i, std::size_t j) const {
    const double x = xs(i);
    const double y = ys(j);
    return {x, y, x + w, y + h};
  }
};

Grid make_grid(std::span<const EpcGraph> graphs, const MiningParams& p) {
  double xmin = std::numeric_limits<double>::infinity();
  double ymin = xmin;
  double xmax = -xmin;
  double ymax = -xmin;
  for (const auto& g : graphs) {
    for (const auto& n : g.nodes) {
      xmin = std::min(xmin, n.x);
      xmax = std::max(xmax, n.x);
      ymin = std::min(ymin, n.y);
      ymax = std::max(ymax, n.y);
    }
  }
  Grid grid;
  grid.stride = p.stride;
  grid.w = p.rect_width;
  grid.h = p.rect_height;
  if (!std::isfinite(xmin)) return grid;
  grid.x0 = xmin;
  grid.y0 = ymin;
  grid.nx = static_cast<std::size_t>(std::floor((xmax - xmin) / p.stride)) + 1;
  grid.ny = static_cast<std::size_t>(std::floor((ymax - ymin) / p.stride)) + 1;
  if (grid.nx > kMaxGridPositions / grid.ny) {
    throw ConfigurationError("stride is too small for the scene: " + std::to_string(grid.nx) +
                             " x " + std::to_string(grid.ny) + " grid positions");
  }
  return grid;
}

// Lexically smallest class name wins ties on hit count.
std::pair<std::optional<ClassId>, bool> dominant_of(std::span<const std::size_t> hits,
                                                    std::span<const std::string> names) {
  std::optional<ClassId> best;
  bool tie = false;
  for (ClassId c = 0; c < hits.size(); ++c) {
    if (hits[c] == 0) continue;
    if (!best || hits[c] > hits[*best]) {
      best = c;
      tie = false;
    } else if (hits[c] == hits[*best]) {
      tie = true;
      if (names[c] < names[*best]) best = c;
    }
  }
  return {best, tie};
}

struct Candidate {
  std::size_t i = 0;
  std::size_t j = 0;
  double coverage = 0.0;
  double precision = 0.0;
};

bool better(const Candidate& a, const Candidate& b) {
  if (a.coverage != b.coverage) return a.coverage > b.coverage;
  return a.precision > b.precision;
}

struct Scorer {
  std::span<const std::string> names;
  std::vector<std::size_t> active_per_class;
  const MiningParams& params;
  std::optional<ClassId> fixed;

  std::optional<Candidate> score(std::size_t i, std::size_t j,
                                 std::span<const std::size_t> hits) const {
    std::size_t total = 0;
    for (auto h : hits) total += h;
    if (total == 0) return std::nullopt;
    const auto [dom, tie] = dominant_of(hits, names);
    if (fixed && dom != fixed) return std::nullopt;
    const double precision = static_cast<double>(hits[*dom]) / static_cast<double>(total);
    const double coverage =
        static_cast<double>(hits[*dom]) / static_cast<double>(active_per_class[*dom]);
    if (coverage < params.min_coverage || precision < params.min_precision) return std::nullopt;
    return Candidate{i, j, coverage, precision};
  }
};

std::vector<std::size_t> count_active(std::span<const ClassId> labels, std::size_t classes,
                                      std::span<const std::uint8_t> active) {
  std::vector<std::size_t> counts(classes, 0);
  for (std::size_t k = 0; k < labels.size(); ++k) {
    if (active.empty() || active[k]) ++counts[labels[k]];
  }
  return counts;
}

std::optional<ClassId> fixed_class(const LabelSpace& space, const MiningParams& params) {
  const auto& t = params.target;
  std::string name;
  if (t.kind == MiningTarget::Kind::kFixedClass) name = t.class_name;
  if (t.kind == MiningTarget::Kind::kOneVsRest) name = t.rule_class;
  if (name.empty()) return std::nullopt;
  const auto it = std::find(space.classes.begin(), space.classes.end(), name);
  if (it == space.classes.end()) throw ConfigurationError("unknown target class '" + name + "'");
  return static_cast<ClassId>(it - space.classes.begin());
}

DominanceRule freeze(const Rect& rect, std::span<const EpcGraph> graphs, const LabelSpace& space,
                     const MiningParams& params, std::span<const std::uint8_t> active,
                     std::size_t order) {
  const RectEvaluation ev =
      evaluate_rect(rect, graphs, space.labels, space.classes, params.mode, active);
  DominanceRule rule;
  rule.rect = rect;
  rule.mode = params.mode;
  rule.predicted = *ev.dominant;
  rule.class_name = space.classes[*ev.dominant];
  rule.order = order;
  rule.tie_broken = ev.tie_broken;
  rule.stats = {ev.class_hits,        ev.hits,         ev.precision,      ev.coverage_in_class,
                ev.coverage_total,    ev.active_cases, ev.active_in_class};
  return rule;
}

// Inclusive range of grid columns i with xs(i) <= hx and xs(i) + w >= lx,
// located by formula and then settled with the exact predicate.
std::optional<std::pair<std::size_t, std::size_t>> column_range(const Grid& g, double lx,
                                                                double hx) {
  auto cond = [&](std::size_t i) { return g.xs(i) <= hx && g.xs(i) + g.w >= lx; };
  const double flo = std::ceil((lx - g.w - g.x0) / g.stride);
  const double fhi = std::floor((hx - g.x0) / g.stride);
  const double top = static_cast<double>(g.nx - 1);
  auto lo = static_cast<std::size_t>(std::clamp(flo, 0.0, top));
  auto hi = static_cast<std::size_t>(std::clamp(fhi, 0.0, top));
  while (lo > 0 && cond(lo - 1)) --lo;
  while (hi + 1 < g.nx && cond(hi + 1)) ++hi;
  while (lo <= hi && !cond(lo)) ++lo;
  while (hi >= lo && !cond(hi)) {
    if (hi == 0) return std::nullopt;
    --hi;
  }
  if (lo > hi) return std::nullopt;
  return std::make_pair(lo, hi);
}

std::pair<std::size_t, std::size_t> row_candidates(const Grid& g, double ylo, double yhi) {
  const double top = static_cast<double>(g.ny - 1);
  const double flo = std::floor((ylo - g.h - g.y0) / g.stride) - 1.0;
  const double fhi = std::floor((yhi - g.y0) / g.stride) + 1.0;
  return {static_cast<std::size_t>(std::clamp(flo, 0.0, top)),
          static_cast<std::size_t>(std::clamp(fhi, 0.0, top))};
}

struct Span {
  std::size_t j;
  std::size_t lo;
  std::size_t hi;
};

// Grid positions whose rectangle matches the graph, as column spans per row.
void graph_spans(const EpcGraph& graph, const Grid& g, MatchMode mode, std::vector<Span>& out) {
  out.clear();
  if (mode == MatchMode::kPoint || graph.nodes.size() == 1) {
    for (const Point& p : graph.nodes) {
      const auto [jlo, jhi] = row_candidates(g, p.y, p.y);
      for (std::size_t j = jlo; j <= jhi; ++j) {
        const double y = g.ys(j);
        if (!(p.y >= y && p.y <= y + g.h)) continue;
        if (const auto r = column_range(g, p.x, p.x)) out.push_back({j, r->first, r->second});
      }
    }
  } else {
    for (std::size_t e = 0; e + 1 < graph.nodes.size(); ++e) {
      const Point a = graph.nodes[e];
      const Point b = graph.nodes[e + 1];
      const auto [jlo, jhi] = row_candidates(g, std::min(a.y, b.y), std::max(a.y, b.y));
      for (std::size_t j = jlo; j <= jhi; ++j) {
        const double y = g.ys(j);
        const auto band = clip_to_band(a, b, y, y + g.h);
        if (!band) continue;
        if (const auto r = column_range(g, (*band)[0], (*band)[1])) {
          out.push_back({j, r->first, r->second});
        }
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const Span& a, const Span& b) {
    return a.j != b.j ? a.j < b.j : a.lo < b.lo;
  });
  std::size_t w = 0;
  for (std::size_t k = 0; k < out.size(); ++k) {
    if (w > 0 && out[w - 1].j == out[k].j && out[k].lo <= out[w - 1].hi + 1) {
      out[w - 1].hi = std::max(out[w - 1].hi, out[k].hi);
    } else {
      out[w++] = out[k];
    }
  }
  out.resize(w);
}

std::optional<Candidate> best_by_counting(std::span<const EpcGraph> graphs, const Grid& g,
                                          const LabelSpace& space, const MiningParams& params,
                                          std::span<const std::uint8_t> active,
                                          const Scorer& scorer) {
  const std::size_t classes = space.classes.size();
  const std::size_t row = g.nx + 1;
  std::vector<std::int32_t> diff(classes * g.ny * row, 0);
  std::vector<Span> spans;
  for (std::size_t k = 0; k < graphs.size(); ++k) {
    if (!active[k]) continue;
    graph_spans(graphs[k], g, params.mode, spans);
    std::int32_t* base = diff.data() + space.labels[k] * g.ny * row;
    for (const Span& s : spans) {
      base[s.j * row + s.lo] += 1;
      base[s.j * row + s.hi + 1] -= 1;
    }
  }
  std::optional<Candidate> best;
  std::vector<std::size_t> hits(classes);
  std::vector<std::int32_t> running(classes);
  for (std::size_t j = 0; j < g.ny; ++j) {
    std::fill(running.begin(), running.end(), 0);
    for (std::size_t i = 0; i < g.nx; ++i) {
      for (std::size_t c = 0; c < classes; ++c) {
        running[c] += diff[(c * g.ny + j) * row + i];
        hits[c] = static_cast<std::size_t>(running[c]);
      }
      const auto cand = scorer.score(i, j, hits);
      if (cand && (!best || better(*cand, *best))) best = cand;
    }
  }
  return best;
}

}  // namespace

Rect Rect::checked(double xmin, double ymin, double xmax, double ymax) {
  if (!(xmin < xmax) || !(ymin < ymax)) {
    throw DomainError("rectangle needs xmin < xmax and ymin < ymax");
  }
  return {xmin, ymin, xmax, ymax};
}

std::string_view to_string(MatchMode m) { return m == MatchMode::kPoint ? "point" : "intersect"; }

std::optional<MatchMode> match_mode_from_string(std::string_view s) {
  if (s == "point") return MatchMode::kPoint;
  if (s == "intersect") return MatchMode::kIntersect;
  return std::nullopt;
}

std::optional<std::array<double, 2>> clip_to_band(Point a, Point b, double y0, double y1) {
  if (a.y == b.y) {
    if (a.y < y0 || a.y > y1) return std::nullopt;
    return std::array<double, 2>{std::min(a.x, b.x), std::max(a.x, b.x)};
  }
  const double dy = b.y - a.y;
  double t0 = (y0 - a.y) / dy;
  double t1 = (y1 - a.y) / dy;
  if (t0 > t1) std::swap(t0, t1);
  t0 = std::max(t0, 0.0);
  t1 = std::min(t1, 1.0);
  if (t0 > t1) return std::nullopt;
  const double xa = t0 == 0.0 ? a.x : (t0 == 1.0 ? b.x : a.x + t0 * (b.x - a.x));
  const double xb = t1 == 0.0 ? a.x : (t1 == 1.0 ? b.x : a.x + t1 * (b.x - a.x));
  return std::array<double, 2>{std::min(xa, xb), std::max(xa, xb)};
}

bool segment_hits_rect(Point a, Point b, const Rect& rect) {
  const auto band = clip_to_band(a, b, rect.ymin, rect.ymax);
  return band && rect.xmin <= (*band)[1] && rect.xmax >= (*band)[0];
}

bool graph_matches(const EpcGraph& graph, const Rect& rect, MatchMode mode) {
  if (mode == MatchMode::kPoint || graph.nodes.size() == 1) {
    return std::any_of(graph.nodes.begin(), graph.nodes.end(),
                       [&](Point p) { return rect.contains(p); });
  }
  for (std::size_t e = 0; e + 1 < graph.nodes.size(); ++e) {
    if (segment_hits_rect(graph.nodes[e], graph.nodes[e + 1], rect)) return true;
  }
  return false;
}

RectEvaluation evaluate_rect(const Rect& rect, std::span<const EpcGraph> graphs,
                             std::span<const ClassId> labels,
                             std::span<const std::string> class_names, MatchMode mode,
                             std::span<const std::uint8_t> active) {
  if (labels.size() != graphs.size()) throw DataError("one label per graph is required");
  if (!active.empty() && active.size() != graphs.size()) {
    throw DataError("active mask does not match the graph count");
  }
  RectEvaluation ev;
  ev.class_hits.assign(class_names.size(), 0);
  const auto per_class = count_active(labels, class_names.size(), active);
  for (std::size_t k = 0; k < graphs.size(); ++k) {
    if (!active.empty() && !active[k]) continue;
    ++ev.active_cases;
    if (graph_matches(graphs[k], rect, mode)) {
      ++ev.class_hits.at(labels[k]);
      ++ev.hits;
    }
  }
  const auto [dom, tie] = dominant_of(ev.class_hits, class_names);
  ev.dominant = dom;
  ev.tie_broken = tie;
  if (dom) {
    ev.active_in_class = per_class[*dom];
    ev.precision = static_cast<double>(ev.class_hits[*dom]) / static_cast<double>(ev.hits);
    ev.coverage_in_class =
        static_cast<double>(ev.class_hits[*dom]) / static_cast<double>(ev.active_in_class);
  }
  if (ev.active_cases > 0) {
    ev.coverage_total = static_cast<double>(ev.hits) / static_cast<double>(ev.active_cases);
  }
  return ev;
}

void MiningParams::validate() const {
  if (!(rect_width > 0.0) || !(rect_height > 0.0)) {
    throw ConfigurationError("rectangle width and height must be positive");
  }
  if (!(stride > 0.0)) throw ConfigurationError("stride must be positive");
  if (!(min_coverage > 0.0 && min_coverage <= 1.0) ||
      !(min_precision > 0.0 && min_precision <= 1.0)) {
    throw ConfigurationError("thresholds must lie in (0, 1]");
  }
  if (target.kind != MiningTarget::Kind::kMulticlass && target.class_name.empty()) {
    throw ConfigurationError("target class name is missing");
  }
}

LabelSpace label_space(std::span<const ClassId> labels, std::span<const std::string> classes,
                       const MiningTarget& target) {
  LabelSpace space;
  if (target.kind != MiningTarget::Kind::kOneVsRest) {
    space.classes.assign(classes.begin(), classes.end());
    space.labels.assign(labels.begin(), labels.end());
    return space;
  }
  const auto it = std::find(classes.begin(), classes.end(), target.class_name);
  if (it == classes.end()) {
    throw ConfigurationError("unknown target class '" + target.class_name + "'");
  }
  const auto c = static_cast<ClassId>(it - classes.begin());
  std::string rest = std::string(kNotPrefix) + target.class_name;
  space.classes = {target.class_name, rest};
  std::sort(space.classes.begin(), space.classes.end());
  const ClassId in = space.classes[0] == target.class_name ? 0 : 1;
  space.labels.reserve(labels.size());
  for (ClassId l : labels) space.labels.push_back(l == c ? in : 1 - in);
  return space;
}

std::vector<DominanceRule> mine(std::span<const EpcGraph> graphs, const LabelSpace& space,
                                const MiningParams& params,
                                std::span<const std::uint8_t> initial_active) {
  params.validate();
  if (space.labels.size() != graphs.size()) throw DataError("one label per graph is required");
  if (!initial_active.empty() && initial_active.size() != graphs.size()) {
    throw DataError("one active flag per graph is required");
  }
  const auto fixed = fixed_class(space, params);
  const Grid grid = make_grid(graphs, params);
  std::vector<std::uint8_t> active(graphs.size(), 1);
  if (!initial_active.empty()) active.assign(initial_active.begin(), initial_active.end());
  std::vector<DominanceRule> rules;
  auto remaining = static_cast<std::size_t>(std::count(active.begin(), active.end(), 1));
  while (rules.size() < params.max_rules && remaining > 0) {
    const Scorer scorer{space.classes, count_active(space.labels, space.classes.size(), active),
                        params, fixed};
    const auto best = best_by_counting(graphs, grid, space, params, active, scorer);
    if (!best) break;
    DominanceRule rule =
        freeze(grid.at(best->i, best->j), graphs, space, params, active, rules.size());
    for (std::size_t k = 0; k < graphs.size(); ++k) {
      if (active[k] && graph_matches(graphs[k], rule.rect, params.mode)) {
        active[k] = 0;
        --remaining;
      }
    }
    rules.push_back(std::move(rule));
  }
  return rules;
}

DominanceRule freeze_rule(const Rect& rect, MatchMode mode, std::span<const EpcGraph> graphs,
                          const LabelSpace& space, std::span<const std::uint8_t> active,
                          std::size_t order, std::optional<ClassId> rule_class) {
  const RectEvaluation ev = evaluate_rect(rect, graphs, space.labels, space.classes, mode, active);
  if (!ev.dominant) throw DomainError("rectangle matches no active case");
  const ClassId c = rule_class.value_or(*ev.dominant);
  if (c >= space.classes.size()) throw DomainError("rule class out of range");
  const auto open = count_active(space.labels, space.classes.size(), active);
  DominanceRule rule;
  rule.rect = rect;
  rule.mode = mode;
  rule.predicted = c;
  rule.class_name = space.classes[c];
  rule.order = order;
  rule.tie_broken = c == *ev.dominant && ev.tie_broken;
  const double hits = static_cast<double>(ev.hits);
  rule.stats = {ev.class_hits,
                ev.hits,
                static_cast<double>(ev.class_hits[c]) / hits,
                open[c] > 0 ? static_cast<double>(ev.class_hits[c]) / static_cast<double>(open[c])
                            : 0.0,
                ev.coverage_total,
                ev.active_cases,
                open[c]};
  return rule;
}

std::vector<std::uint8_t> rebase(std::span<const EpcGraph> graphs, const LabelSpace& space,
                                 std::vector<DominanceRule>& rules) {
  std::vector<std::uint8_t> active(graphs.size(), 1);
  for (std::size_t r = 0; r < rules.size(); ++r) {
    auto& rule = rules[r];
    const RectEvaluation ev =
        evaluate_rect(rule.rect, graphs, space.labels, space.classes, rule.mode, active);
    if (ev.hits == 0) {
      // Nothing left for this rule; keep it with empty stats.
      const auto open = count_active(space.labels, space.classes.size(), active);
      rule.stats = {ev.class_hits, 0, 0.0, 0.0, 0.0, ev.active_cases, open[rule.predicted]};
      rule.order = r;
      continue;
    }
    rule = freeze_rule(rule.rect, rule.mode, graphs, space, active, r, rule.predicted);
    for (std::size_t k = 0; k < graphs.size(); ++k) {
      if (active[k] && graph_matches(graphs[k], rule.rect, rule.mode)) active[k] = 0;
    }
  }
  return active;
}

std::optional<DominanceRule> mine_round_exhaustive(std::span<const EpcGraph> graphs,
                                                   const LabelSpace& space,
                                                   const MiningParams& params,
                                                   std::span<const std::uint8_t> active) {
  params.validate();
  const auto fixed = fixed_class(space, params);
  const Grid grid = make_grid(graphs, params);
  const Scorer scorer{space.classes, count_active(space.labels, space.classes.size(), active),
                      params, fixed};
  std::optional<Candidate> best;
  for (std::size_t j = 0; j < grid.ny; ++j) {
    for (std::size_t i = 0; i < grid.nx; ++i) {
      const auto ev = evaluate_rect(grid.at(i, j), graphs, space.labels, space.classes,
                                    params.mode, active);
      const auto cand = scorer.score(i, j, ev.class_hits);
      if (cand && (!best || better(*cand, *best))) best = cand;
    }
  }
  if (!best) return std::nullopt;
  return freeze(grid.at(best->i, best->j), graphs, space, params, active, 0);
}

double weighted_precision(std::span<const double> precisions, std::span<const double> counts) {
  if (precisions.size() != counts.size()) {
    throw DomainError("precision and count lists differ in length");
  }
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < precisions.size(); ++i) {
    num += precisions[i] * counts[i];
    den += counts[i];
  }
  return den > 0.0 ? num / den : 0.0;
}

bool class_agrees(std::string_view predicted, std::string_view actual) {
  if (predicted == actual) return true;
  if (predicted.substr(0, kNotPrefix.size()) == kNotPrefix) {
    return predicted.substr(kNotPrefix.size()) != actual;
  }
  return false;
}

ClassificationReport classify(std::span<const EpcGraph> graphs, std::span<const ClassId> labels,
                              std::span<const std::string> classes,
                              std::span<const DominanceRule> rules) {
  if (labels.size() != graphs.size()) throw DataError("one label per graph is required");
  ClassificationReport rep;
  rep.classes.assign(classes.begin(), classes.end());
  for (const auto& r : rules) rep.predicted_classes.push_back(r.class_name);
  std::sort(rep.predicted_classes.begin(), rep.predicted_classes.end());
  rep.predicted_classes.erase(
      std::unique(rep.predicted_classes.begin(), rep.predicted_classes.end()),
      rep.predicted_classes.end());
  rep.confusion.assign(classes.size(), std::vector<std::size_t>(rep.predicted_classes.size() + 1, 0));
  rep.total_cases = graphs.size();
  rep.matched_rule.assign(graphs.size(), std::nullopt);

  std::vector<std::uint8_t> open(graphs.size(), 1);
  std::vector<double> precisions;
  std::vector<double> counts;
  for (std::size_t r = 0; r < rules.size(); ++r) {
    const auto& rule = rules[r];
    RuleReportRow row;
    row.order = r;
    row.class_name = rule.class_name;
    std::size_t in_class_open = 0;
    std::size_t in_class_all = 0;
    for (std::size_t k = 0; k < graphs.size(); ++k) {
      const bool agrees = class_agrees(rule.class_name, classes[labels[k]]);
      if (agrees) ++in_class_all;
      if (!open[k]) continue;
      if (agrees) ++in_class_open;
      if (!graph_matches(graphs[k], rule.rect, rule.mode)) continue;
      open[k] = 0;
      rep.matched_rule[k] = r;
      ++row.hits;
      if (agrees) ++row.correct;
    }
    if (row.hits > 0) {
      row.precision = static_cast<double>(row.correct) / static_cast<double>(row.hits);
    }
    if (in_class_open > 0) {
      row.coverage_in_class = static_cast<double>(row.correct) / static_cast<double>(in_class_open);
    }
    if (in_class_all > 0) {
      row.global_coverage_in_class =
          static_cast<double>(row.correct) / static_cast<double>(in_class_all);
    }
    rep.covered += row.hits;
    rep.correct += row.correct;
    precisions.push_back(row.precision);
    counts.push_back(static_cast<double>(row.hits));
    rep.rows.push_back(std::move(row));
  }
  for (std::size_t k = 0; k < graphs.size(); ++k) {
    std::size_t col = rep.predicted_classes.size();
    if (rep.matched_rule[k]) {
      const auto& name = rules[*rep.matched_rule[k]].class_name;
      col = static_cast<std::size_t>(
          std::lower_bound(rep.predicted_classes.begin(), rep.predicted_classes.end(), name) -
          rep.predicted_classes.begin());
    }
    ++rep.confusion[labels[k]][col];
  }
  if (rep.total_cases > 0) {
    rep.total_recall = static_cast<double>(rep.covered) / static_cast<double>(rep.total_cases);
  }
  rep.weighted_precision = weighted_precision(precisions, counts);
  return rep;
}

}  // namespace epc
