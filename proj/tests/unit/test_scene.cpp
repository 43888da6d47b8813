#include <gtest/gtest.h>

#include <regex>

#include "epc/errors.hpp"
#include "epc/pipeline.hpp"
#include "epc/scene.hpp"
#include "json.hpp"

namespace epc {
namespace {

using nlohmann::json;

PreparedData iris(LayoutMode mode = LayoutMode::kSequential) {
  EmbeddingConfig cfg;
  cfg.layout.mode = mode;
  return prepare(load_csv_file(std::string(EPC_DATA_DIR) + "/uci/iris.csv").dataset, cfg);
}

std::vector<DominanceRule> mined(const PreparedData& p) {
  MiningParams mp;
  mp.rect_width = 0.2;
  mp.rect_height = 0.2;
  mp.stride = 0.05;
  mp.mode = MatchMode::kIntersect;
  return mine_rules(p, mp).rules;
}

std::size_t count(const std::string& text, const std::string& what) {
  std::size_t n = 0;
  for (auto at = text.find(what); at != std::string::npos; at = text.find(what, at + 1)) ++n;
  return n;
}

TEST(Scene, LegendIsStable) {
  const auto p = iris();
  const auto rules = mined(p);
  const auto a = build_scene(p, {}, p.data.classes);
  SceneOptions inside;
  inside.visibility = Visibility::kInsideRules;
  const auto b = build_scene(p, rules, p.data.classes, inside);
  ASSERT_EQ(a.legend.size(), 3u);
  for (std::size_t k = 0; k < a.legend.size(); ++k) {
    EXPECT_EQ(a.legend[k].class_name, p.data.classes[k]);
    EXPECT_EQ(a.legend[k].color, b.legend[k].color);
    EXPECT_EQ(a.legend[k].color, palette()[k]);
  }
}

TEST(Scene, InsideRulesWithoutRulesIsEmpty) {
  const auto p = iris();
  SceneOptions o;
  o.visibility = Visibility::kInsideRules;
  const auto sc = build_scene(p, {}, p.data.classes, o);
  for (const auto& g : sc.graphs) EXPECT_FALSE(g.visible);
  EXPECT_EQ(count(to_svg(sc), "class=\"graph\""), 0u);
  o.visibility = Visibility::kOutsideRules;
  EXPECT_EQ(count(to_svg(build_scene(p, {}, p.data.classes, o)), "class=\"graph\""), 150u);
}

TEST(Scene, VisibilityPartitionsCases) {
  const auto p = iris();
  const auto rules = mined(p);
  SceneOptions in;
  in.visibility = Visibility::kInsideRules;
  SceneOptions out;
  out.visibility = Visibility::kOutsideRules;
  const auto a = build_scene(p, rules, p.data.classes, in);
  const auto b = build_scene(p, rules, p.data.classes, out);
  std::size_t inside = 0;
  for (std::size_t k = 0; k < a.graphs.size(); ++k) {
    EXPECT_NE(a.graphs[k].visible, b.graphs[k].visible);
    bool matched = false;
    for (const auto& r : rules) matched = matched || graph_matches(p.graphs[k], r.rect, r.mode);
    EXPECT_EQ(a.graphs[k].visible, matched);
    inside += a.graphs[k].visible ? 1 : 0;
  }
  const auto svg = to_svg(a);
  EXPECT_EQ(count(svg, "class=\"graph\""), inside);
  const auto group = svg.substr(svg.find("<g class=\"rects\">"));
  EXPECT_EQ(count(group.substr(0, group.find("</g>")), "<rect "), rules.size());
}

TEST(Scene, RectStatsAreTheRuleStats) {
  const auto p = iris();
  const auto rules = mined(p);
  const auto j = json::parse(to_json(build_scene(p, rules, p.data.classes)));
  ASSERT_EQ(j.at("rects").size(), rules.size());
  for (std::size_t k = 0; k < rules.size(); ++k) {
    const auto& st = j.at("rects")[k].at("stats");
    EXPECT_EQ(st.at("hits"), rules[k].stats.hits);
    EXPECT_EQ(st.at("precision").get<double>(), rules[k].stats.precision);
    EXPECT_EQ(st.at("coverage_in_class").get<double>(), rules[k].stats.coverage_in_class);
  }
}

TEST(Scene, JsonIsCanonical) {
  const auto p = iris(LayoutMode::kMirror);
  SceneOptions o;
  o.selected_case = 7;
  o.in_progress = Rect{0, 0, 0.5, 0.5};
  const auto text = to_json(build_scene(p, mined(p), p.data.classes, o));
  EXPECT_EQ(json::parse(text).dump(), text);
  const auto j = json::parse(text);
  EXPECT_EQ(j.at("graphs").size(), 150u);
  EXPECT_EQ(j.at("sectors").size(), 4u);
  EXPECT_EQ(j.at("overlay").at("ellipses").size(), 4u);
  EXPECT_TRUE(j.at("rects").back().at("stats").is_null());
  EXPECT_FALSE(j.contains("camera"));
}

TEST(Scene, BoundsContainEverything) {
  const auto p = iris(LayoutMode::kDynamic);
  const auto sc = build_scene(p, mined(p), p.data.classes);
  EXPECT_TRUE(sc.sectors.empty());
  for (const auto& g : sc.graphs) {
    for (const auto& n : g.nodes) EXPECT_TRUE(sc.bounds.contains(n));
  }
  for (const auto& r : sc.rects) {
    EXPECT_TRUE(sc.bounds.contains({r.rect.xmin, r.rect.ymin}));
    EXPECT_TRUE(sc.bounds.contains({r.rect.xmax, r.rect.ymax}));
  }
  EXPECT_TRUE(sc.bounds.contains({-1, -1}));
  EXPECT_TRUE(sc.bounds.contains({1, 1}));
}

TEST(Scene, SvgShapeCounts) {
  const auto p = iris();
  SceneOptions o;
  o.selected_case = 0;
  const auto svg = to_svg(build_scene(p, {}, p.data.classes, o));
  EXPECT_EQ(svg.rfind("<?xml", 0), 0u);
  EXPECT_EQ(count(svg, "<polyline"), 150u);
  EXPECT_EQ(count(svg, "stroke-dasharray=\"4 3\""), 4u);  // side ellipses of case 0
  EXPECT_EQ(count(svg, "<marker"), 3u);
  // every number carries six decimals
  const std::regex bad(R"((x|y|cx|cy)="-?\d+(\.\d{1,5})?")");
  EXPECT_FALSE(std::regex_search(svg, bad));
  EXPECT_EQ(count(svg, "\"-0.000000\""), 0u);
}

TEST(Scene, SelectedCaseOutOfRange) {
  const auto p = iris();
  SceneOptions o;
  o.selected_case = 150;
  EXPECT_THROW(build_scene(p, {}, p.data.classes, o), DomainError);
}

TEST(Scene, ManyClassesWarn) {
  std::vector<std::vector<double>> rows;
  std::vector<std::string> labels;
  for (int k = 0; k < 14; ++k) {
    rows.push_back({k / 13.0, 1 - k / 13.0});
    labels.push_back("c" + std::to_string(100 + k));
  }
  const auto p = prepare(make_dataset({"a", "b"}, rows, labels), {});
  const auto sc = build_scene(p, {}, p.data.classes);
  EXPECT_EQ(sc.warnings.size(), 1u);
  EXPECT_EQ(sc.legend[12].color, sc.legend[0].color);
}

TEST(Scene, VisibilityNames) {
  for (auto v : {Visibility::kAll, Visibility::kOutsideRules, Visibility::kInsideRules}) {
    EXPECT_EQ(visibility_from_string(to_string(v)), v);
  }
}

}  // namespace
}  // namespace epc
