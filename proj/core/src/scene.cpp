#include "epc/scene.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <map>

#include "epc/errors.hpp"
#include "json_detail.hpp"

namespace epc {

namespace {

constexpr std::array<std::string_view, 12> kPalette{
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b",
    "#e377c2", "#7f7f7f", "#bcbd22", "#17becf", "#393b79", "#637939"};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  // "-0.000000" and "0.000000" must print alike for byte-stable output.
  if (std::string_view(buf) == "-0.000000") return "0.000000";
  return buf;
}

std::string escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Viewport {
  const Scene& scene;
  double sx() const { return scene.pixel_width / (scene.bounds.xmax - scene.bounds.xmin); }
  double sy() const { return scene.pixel_height / (scene.bounds.ymax - scene.bounds.ymin); }
  double x(double v) const { return (v - scene.bounds.xmin) * sx(); }
  double y(double v) const { return (scene.bounds.ymax - v) * sy(); }
  std::string point(Point p) const { return fmt(x(p.x)) + "," + fmt(y(p.y)); }
};

// Closed ellipse as two half arcs.
std::string ellipse_path(const Viewport& vp, Point c, double rw, double rh) {
  const double rx = rw * vp.sx();
  const double ry = rh * vp.sy();
  const std::string right = vp.point({c.x + rw, c.y});
  const std::string left = vp.point({c.x - rw, c.y});
  const std::string radii = fmt(rx) + " " + fmt(ry);
  return "M " + right + " A " + radii + " 0 1 0 " + left + " A " + radii + " 0 1 0 " + right +
         " Z";
}

}  // namespace

std::string_view to_string(Visibility v) {
  switch (v) {
    case Visibility::kAll: return "all";
    case Visibility::kOutsideRules: return "outside-rules";
    case Visibility::kInsideRules: return "inside-rules";
  }
  return "all";
}

std::optional<Visibility> visibility_from_string(std::string_view s) {
  if (s == "all") return Visibility::kAll;
  if (s == "outside-rules") return Visibility::kOutsideRules;
  if (s == "inside-rules") return Visibility::kInsideRules;
  return std::nullopt;
}

std::span<const std::string_view> palette() { return kPalette; }

Scene build_scene(const PreparedData& prepared, std::span<const DominanceRule> rules,
                  std::span<const std::string> rule_classes, const SceneOptions& options) {
  const auto& layout = prepared.layout;
  const auto& data = prepared.data;
  if (options.selected_case && *options.selected_case >= prepared.graphs.size()) {
    throw DomainError("selected case " + std::to_string(*options.selected_case) +
                      " is out of range");
  }
  Scene sc;
  sc.pixel_width = options.pixel_width;
  sc.pixel_height = options.pixel_height;
  sc.ellipse = layout.ellipse();
  sc.stat_classes.assign(rule_classes.begin(), rule_classes.end());

  std::map<std::string, std::string> color_of;
  for (std::size_t c = 0; c < data.classes.size(); ++c) {
    const std::string color(kPalette[c % kPalette.size()]);
    sc.legend.push_back({data.classes[c], color});
    color_of[data.classes[c]] = color;
  }
  if (data.classes.size() > kPalette.size()) {
    sc.warnings.push_back(std::to_string(data.classes.size()) + " classes share " +
                          std::to_string(kPalette.size()) + " colors");
  }

  if (!layout.is_dynamic()) {
    for (std::size_t i = 0; i < layout.dims(); ++i) {
      const auto& s = layout.slot(i);
      SectorMark m;
      m.coord = i;
      m.label = "X" + std::to_string(i + 1);
      m.s0 = s.origin;
      m.s1 = wrap_unit(s.origin + s.direction * s.span);
      m.start = layout.arcs().point_at(m.s0);
      m.end = layout.arcs().point_at(m.s1);
      sc.sectors.push_back(std::move(m));
    }
  }

  for (const auto& g : prepared.graphs) {
    bool inside = false;
    for (const auto& r : rules) {
      if (graph_matches(g, r.rect, r.mode)) {
        inside = true;
        break;
      }
    }
    bool visible = true;
    if (options.visibility == Visibility::kInsideRules) visible = inside;
    if (options.visibility == Visibility::kOutsideRules) visible = !inside;
    sc.graphs.push_back({g.row, data.classes.at(g.label), visible, g.nodes});
  }

  for (const auto& r : rules) {
    sc.rects.push_back({"r" + std::to_string(r.order + 1), r.class_name, r.mode, r.rect, r.stats});
  }
  if (options.in_progress) {
    sc.rects.push_back({"draft", "", MatchMode::kPoint, *options.in_progress, std::nullopt});
  }

  if (options.selected_case) {
    sc.overlay_case = options.selected_case;
    sc.overlay = side_ellipses(data.rows[*options.selected_case], layout);
  }

  // Bounds: the central ellipse, every node and rectangle, plus a margin.
  const auto& e = sc.ellipse;
  Rect b{e.cx() - e.rw(), e.cy() - e.rh(), e.cx() + e.rw(), e.cy() + e.rh()};
  auto grow = [&](Point p) {
    b.xmin = std::min(b.xmin, p.x);
    b.ymin = std::min(b.ymin, p.y);
    b.xmax = std::max(b.xmax, p.x);
    b.ymax = std::max(b.ymax, p.y);
  };
  for (const auto& g : sc.graphs) {
    for (const auto& p : g.nodes) grow(p);
  }
  for (const auto& r : sc.rects) {
    grow({r.rect.xmin, r.rect.ymin});
    grow({r.rect.xmax, r.rect.ymax});
  }
  const double mx = 0.05 * (b.xmax - b.xmin);
  const double my = 0.05 * (b.ymax - b.ymin);
  sc.bounds = {b.xmin - mx, b.ymin - my, b.xmax + mx, b.ymax + my};
  return sc;
}

std::string to_svg(const Scene& sc) {
  const Viewport vp{sc};
  std::map<std::string, std::string> color_of;
  for (const auto& l : sc.legend) color_of[l.class_name] = l.color;
  auto color = [&](const std::string& cls) {
    const auto it = color_of.find(cls);
    return it == color_of.end() ? std::string("#000000") : it->second;
  };

  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" +
         fmt(sc.pixel_width) + "\" height=\"" + fmt(sc.pixel_height) + "\" viewBox=\"0 0 " +
         fmt(sc.pixel_width) + " " + fmt(sc.pixel_height) + "\">\n";
  out += "<defs>\n";
  for (std::size_t i = 0; i < sc.legend.size(); ++i) {
    out += "<marker id=\"arrow" + std::to_string(i) +
           "\" viewBox=\"0 0 10 10\" refX=\"10\" refY=\"5\" markerWidth=\"6\" markerHeight=\"6\" "
           "orient=\"auto\"><path d=\"M 0 0 L 10 5 L 0 10 z\" fill=\"" +
           sc.legend[i].color + "\"/></marker>\n";
  }
  out += "</defs>\n";
  out += "<rect x=\"" + fmt(0) + "\" y=\"" + fmt(0) + "\" width=\"" + fmt(sc.pixel_width) + "\" height=\"" +
         fmt(sc.pixel_height) + "\" fill=\"#ffffff\"/>\n";
  const auto& e = sc.ellipse;
  out += "<path class=\"central-ellipse\" d=\"" + ellipse_path(vp, e.center(), e.rw(), e.rh()) +
         "\" fill=\"none\" stroke=\"#000000\" stroke-width=\"1.5\"/>\n";

  out += "<g class=\"sectors\">\n";
  for (const auto& m : sc.sectors) {
    out += "<circle cx=\"" + fmt(vp.x(m.start.x)) + "\" cy=\"" + fmt(vp.y(m.start.y)) +
           "\" r=\"3\" fill=\"#d62728\"/>\n";
    // Label just outside the ellipse, halfway along the sector chord.
    const Point mid{(m.start.x + m.end.x) / 2, (m.start.y + m.end.y) / 2};
    const Point dir = mid - e.center();
    const double len = norm(dir);
    const Point at = len > 0 ? e.center() + (1.12 * std::max(e.rw(), e.rh()) / len) * dir : mid;
    out += "<text x=\"" + fmt(vp.x(at.x)) + "\" y=\"" + fmt(vp.y(at.y)) +
           "\" font-size=\"12\" text-anchor=\"middle\">" + escape(m.label) + "</text>\n";
  }
  out += "</g>\n";

  out += "<g class=\"graphs\">\n";
  for (const auto& g : sc.graphs) {
    if (!g.visible) continue;
    const std::string c = color(g.class_name);
    if (g.nodes.size() == 1) {
      out += "<circle class=\"graph\" cx=\"" + fmt(vp.x(g.nodes[0].x)) + "\" cy=\"" +
             fmt(vp.y(g.nodes[0].y)) + "\" r=\"2.5\" fill=\"" + c + "\"/>\n";
      continue;
    }
    std::string pts;
    for (const auto& p : g.nodes) {
      if (!pts.empty()) pts += ' ';
      pts += vp.point(p);
    }
    std::size_t marker = 0;
    for (std::size_t i = 0; i < sc.legend.size(); ++i) {
      if (sc.legend[i].class_name == g.class_name) marker = i;
    }
    out += "<polyline class=\"graph\" points=\"" + pts + "\" fill=\"none\" stroke=\"" + c +
           "\" stroke-width=\"1\" marker-end=\"url(#arrow" + std::to_string(marker) + ")\"/>\n";
  }
  out += "</g>\n";

  if (!sc.overlay.empty()) {
    out += "<g class=\"overlay\">\n";
    for (const auto& s : sc.overlay) {
      out += "<path d=\"" + ellipse_path(vp, s.center, e.rw(), e.rh()) +
             "\" fill=\"none\" stroke=\"#555555\" stroke-dasharray=\"4 3\"/>\n";
    }
    out += "</g>\n";
  }

  out += "<g class=\"rects\">\n";
  for (const auto& r : sc.rects) {
    const std::string c = r.stats ? color(r.class_name) : std::string("#000000");
    out += "<rect x=\"" + fmt(vp.x(r.rect.xmin)) + "\" y=\"" + fmt(vp.y(r.rect.ymax)) +
           "\" width=\"" + fmt((r.rect.xmax - r.rect.xmin) * vp.sx()) + "\" height=\"" +
           fmt((r.rect.ymax - r.rect.ymin) * vp.sy()) + "\" fill=\"none\" stroke=\"" + c +
           "\" stroke-width=\"2\"" + (r.stats ? "" : " stroke-dasharray=\"5 3\"") + "/>\n";
    out += "<text x=\"" + fmt(vp.x(r.rect.xmin)) + "\" y=\"" + fmt(vp.y(r.rect.ymax) - 3) +
           "\" font-size=\"11\">" + escape(r.id) + "</text>\n";
  }
  out += "</g>\n";

  out += "<g class=\"legend\">\n";
  for (std::size_t i = 0; i < sc.legend.size(); ++i) {
    const double y = 16.0 + 16.0 * static_cast<double>(i);
    out += "<rect x=\"" + fmt(8) + "\" y=\"" + fmt(y - 9) + "\" width=\"" + fmt(10) + "\" height=\"" + fmt(10) +
           "\" fill=\"" +
           sc.legend[i].color + "\"/>\n";
    out += "<text x=\"" + fmt(24) + "\" y=\"" + fmt(y) + "\" font-size=\"12\">" +
           escape(sc.legend[i].class_name) + "</text>\n";
  }
  out += "</g>\n</svg>\n";
  return out;
}

std::string to_json(const Scene& sc) {
  using nlohmann::json;
  json sectors = json::array();
  for (const auto& m : sc.sectors) {
    sectors.push_back({{"coord", m.coord}, {"label", m.label}, {"s0", m.s0}, {"s1", m.s1}});
  }
  json graphs = json::array();
  for (const auto& g : sc.graphs) {
    json nodes = json::array();
    for (const auto& p : g.nodes) nodes.push_back({p.x, p.y});
    graphs.push_back(
        {{"id", g.id}, {"class", g.class_name}, {"visible", g.visible}, {"nodes", nodes}});
  }
  json rects = json::array();
  for (const auto& r : sc.rects) {
    json jr = {{"id", r.id},
               {"class", r.class_name},
               {"mode", std::string(to_string(r.mode))},
               {"xmin", r.rect.xmin},
               {"ymin", r.rect.ymin},
               {"xmax", r.rect.xmax},
               {"ymax", r.rect.ymax},
               {"stats", nullptr}};
    if (r.stats) jr["stats"] = detail::stats_json(*r.stats, sc.stat_classes);
    rects.push_back(std::move(jr));
  }
  json legend = json::array();
  for (const auto& l : sc.legend) legend.push_back({{"class", l.class_name}, {"color", l.color}});
  json overlay = nullptr;
  if (sc.overlay_case) {
    json ellipses = json::array();
    for (std::size_t i = 0; i < sc.overlay.size(); ++i) {
      const auto& s = sc.overlay[i];
      ellipses.push_back({{"coord", i},
                          {"cx", s.center.x},
                          {"cy", s.center.y},
                          {"guide", std::string(to_string(s.guide))}});
    }
    overlay = {{"case", *sc.overlay_case}, {"ellipses", ellipses}};
  }
  const auto& e = sc.ellipse;
  const json doc = {{"version", 1},
                    {"viewport",
                     {{"xmin", sc.bounds.xmin},
                      {"ymin", sc.bounds.ymin},
                      {"xmax", sc.bounds.xmax},
                      {"ymax", sc.bounds.ymax},
                      {"width", sc.pixel_width},
                      {"height", sc.pixel_height}}},
                    {"ellipse", {{"cx", e.cx()}, {"cy", e.cy()}, {"w", e.width()}, {"h", e.height()}}},
                    {"sectors", sectors},
                    {"graphs", graphs},
                    {"rects", rects},
                    {"legend", legend},
                    {"overlay", overlay},
                    {"warnings", sc.warnings}};
  return doc.dump();
}

}  // namespace epc
