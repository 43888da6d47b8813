#include "epc/serialize.hpp"

#include <algorithm>
#include <sstream>

#include "epc/errors.hpp"
#include "json_detail.hpp"

namespace epc {

using nlohmann::json;

namespace {

constexpr int kFormatVersion = 1;

double pct(double f) { return 100.0 * f; }

using detail::class_hits_json;
using detail::rect_json;

json rule_json(const DominanceRule& r, std::span<const std::string> classes) {
  const auto& s = r.stats;
  return {{"id", "r" + std::to_string(r.order + 1)},
          {"order", r.order},
          {"rect", rect_json(r.rect)},
          {"mode", std::string(to_string(r.mode))},
          {"class", r.class_name},
          {"tie_broken", r.tie_broken},
          {"stats", detail::stats_json(s, classes)}};
}

json params_json(const MiningParams& p) {
  json target = {{"kind", p.target.kind == MiningTarget::Kind::kMulticlass   ? "multiclass"
                          : p.target.kind == MiningTarget::Kind::kOneVsRest ? "one-vs-rest"
                                                                              : "fixed-class"}};
  if (p.target.kind != MiningTarget::Kind::kMulticlass) target["class"] = p.target.class_name;
  if (!p.target.rule_class.empty()) target["rule_class"] = p.target.rule_class;
  return {{"rect_width", p.rect_width},       {"rect_height", p.rect_height},
          {"stride", p.stride},               {"min_coverage", p.min_coverage},
          {"min_precision", p.min_precision}, {"mode", std::string(to_string(p.mode))},
          {"target", target},                 {"max_rules", p.max_rules}};
}

template <typename T>
T get(const json& j, const char* key) {
  if (!j.contains(key)) throw DataError(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw DataError(std::string("field '") + key + "' has the wrong type");
  }
}

MiningParams params_from(const json& j) {
  if (!j.is_object()) throw DataError("mining parameters must be a JSON object");
  MiningParams p;
  auto num = [&](const char* key, double& field) {
    if (j.contains(key)) field = get<double>(j, key);
  };
  num("rect_width", p.rect_width);
  num("rect_height", p.rect_height);
  num("stride", p.stride);
  num("min_coverage", p.min_coverage);
  num("min_precision", p.min_precision);
  if (j.contains("max_rules")) p.max_rules = get<std::size_t>(j, "max_rules");
  if (j.contains("mode")) {
    const auto m = match_mode_from_string(get<std::string>(j, "mode"));
    if (!m) throw ConfigurationError("mode must be 'point' or 'intersect'");
    p.mode = *m;
  }
  if (j.contains("target")) {
    const auto& t = j.at("target");
    const auto kind = get<std::string>(t, "kind");
    if (kind == "multiclass") {
      p.target = {};
    } else if (kind == "one-vs-rest") {
      p.target = {MiningTarget::Kind::kOneVsRest, get<std::string>(t, "class"),
                  t.value("rule_class", std::string())};
    } else if (kind == "fixed-class") {
      p.target = {MiningTarget::Kind::kFixedClass, get<std::string>(t, "class"), {}};
    } else {
      throw ConfigurationError("unknown mining target '" + kind + "'");
    }
  }
  p.validate();
  return p;
}

json report_json(const ClassificationReport& rep) {
  json rows = json::array();
  for (const auto& r : rep.rows) {
    rows.push_back({{"rule", "r" + std::to_string(r.order + 1)},
                    {"class", r.class_name},
                    {"coverage_in_class_pct", pct(r.coverage_in_class)},
                    {"precision_pct", pct(r.precision)},
                    {"global_coverage_in_class_pct", pct(r.global_coverage_in_class)},
                    {"hits", r.hits},
                    {"correct", r.correct}});
  }
  auto columns = rep.predicted_classes;
  columns.push_back("uncovered");
  const double n = static_cast<double>(rep.total_cases);
  return {{"format", "epc-report"},
          {"version", kFormatVersion},
          {"rules", rows},
          {"totals",
           {{"cases", rep.total_cases},
            {"covered", rep.covered},
            {"correct", rep.correct},
            {"uncovered", rep.total_cases - rep.covered},
            {"recall_pct", pct(rep.total_recall)},
            {"weighted_precision_pct", pct(rep.weighted_precision)},
            {"accuracy_pct", n > 0 ? pct(static_cast<double>(rep.correct) / n) : 0.0}}},
          {"confusion", {{"actual", rep.classes}, {"predicted", columns}, {"counts", rep.confusion}}}};
}

json parse(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("malformed JSON: ") + e.what());
  }
}

}  // namespace

std::string padding_to_string(const PaddingPolicy& p) {
  switch (p.kind) {
    case PaddingPolicy::Kind::kNone: return "none";
    case PaddingPolicy::Kind::kDuplicateLast: return "dup";
    case PaddingPolicy::Kind::kConstant: {
      std::ostringstream os;
      os << "const:" << json(p.value).dump();
      return os.str();
    }
  }
  return "dup";
}

std::string rule_set_to_json(const RuleSet& rs) {
  const auto& lc = rs.embedding.layout;
  json guides = json::array();
  for (Guide g : lc.guides) guides.push_back(std::string(to_string(g)));
  json mins = json::array();
  json maxs = json::array();
  for (const auto& s : rs.stats) {
    mins.push_back(s.min);
    maxs.push_back(s.max);
  }
  json rules = json::array();
  for (const auto& r : rs.rules) rules.push_back(rule_json(r, rs.classes));
  const auto& e = rs.embedding.ellipse;
  const json doc = {
      {"format", "epc-rules"},
      {"version", kFormatVersion},
      {"layout",
       {{"mode", std::string(to_string(lc.mode))},
        {"dims", lc.dims},
        {"weights", lc.weights},
        {"orientation", std::string(to_string(lc.orientation))},
        {"guides", guides},
        {"arc_resolution", lc.arc_table_resolution},
        {"root", lc.root_selection == RootSelection::kOrderedAlongGuide ? "ordered" : "inside"}}},
      {"ellipse", {{"cx", e.cx()}, {"cy", e.cy()}, {"w", e.width()}, {"h", e.height()}}},
      {"padding", padding_to_string(rs.embedding.padding)},
      {"fingerprint", json::parse(rs.fingerprint)},
      {"normalization", {{"columns", rs.columns}, {"min", mins}, {"max", maxs}}},
      {"params", params_json(rs.params)},
      {"classes", rs.classes},
      {"rules", rules}};
  return doc.dump(2);
}

RuleSet rule_set_from_json(std::string_view text) {
  const json doc = parse(text);
  if (!doc.is_object() || doc.value("format", "") != "epc-rules") {
    throw DataError("not an epc rules document");
  }
  if (get<int>(doc, "version") != kFormatVersion) {
    throw DataError("unsupported rules document version");
  }
  RuleSet rs;
  const auto& L = doc.at("layout");
  LayoutConfig& lc = rs.embedding.layout;
  const auto mode = layout_mode_from_string(get<std::string>(L, "mode"));
  const auto orient = orientation_from_string(get<std::string>(L, "orientation"));
  if (!mode || !orient) throw DataError("unknown layout mode or orientation");
  lc.mode = *mode;
  lc.orientation = *orient;
  lc.dims = get<std::size_t>(L, "dims");
  lc.weights = get<std::vector<double>>(L, "weights");
  for (const auto& g : get<std::vector<std::string>>(L, "guides")) {
    const auto guide = guide_from_string(g);
    if (!guide) throw DataError("unknown guide '" + g + "'");
    lc.guides.push_back(*guide);
  }
  lc.arc_table_resolution = get<std::size_t>(L, "arc_resolution");
  const auto root = get<std::string>(L, "root");
  if (root != "ordered" && root != "inside") throw DataError("unknown root selection");
  lc.root_selection =
      root == "ordered" ? RootSelection::kOrderedAlongGuide : RootSelection::kInsideNearestCenter;
  const auto& E = doc.at("ellipse");
  try {
    rs.embedding.ellipse = EllipseSpec(get<double>(E, "cx"), get<double>(E, "cy"),
                                       get<double>(E, "w"), get<double>(E, "h"));
  } catch (const DomainError& e) {
    throw DataError(std::string("ellipse: ") + e.what());
  }
  try {
    rs.embedding.padding = padding_from_string(get<std::string>(doc, "padding"));
  } catch (const ConfigurationError& e) {
    throw DataError(e.what());
  }

  rs.fingerprint = doc.at("fingerprint").dump();
  const Layout rebuilt(lc, rs.embedding.ellipse);
  if (rebuilt.fingerprint() != rs.fingerprint) {
    throw ConfigurationError("layout rebuilt from the rules document differs from its fingerprint");
  }

  const auto& N = doc.at("normalization");
  rs.columns = get<std::vector<std::string>>(N, "columns");
  const auto mins = get<std::vector<double>>(N, "min");
  const auto maxs = get<std::vector<double>>(N, "max");
  if (mins.size() != maxs.size() || mins.size() != rs.columns.size()) {
    throw DataError("normalization statistics do not match the columns");
  }
  for (std::size_t i = 0; i < mins.size(); ++i) rs.stats.push_back({mins[i], maxs[i]});

  rs.params = params_from(doc.at("params"));
  rs.classes = get<std::vector<std::string>>(doc, "classes");
  for (const auto& r : doc.at("rules")) {
    DominanceRule rule;
    const auto& R = r.at("rect");
    try {
      rule.rect = Rect::checked(get<double>(R, "xmin"), get<double>(R, "ymin"),
                                get<double>(R, "xmax"), get<double>(R, "ymax"));
    } catch (const DomainError& e) {
      throw DataError(std::string("rule rectangle: ") + e.what());
    }
    const auto m = match_mode_from_string(get<std::string>(r, "mode"));
    if (!m) throw DataError("unknown rule mode");
    rule.mode = *m;
    rule.class_name = get<std::string>(r, "class");
    const auto it = std::find(rs.classes.begin(), rs.classes.end(), rule.class_name);
    if (it == rs.classes.end()) throw DataError("rule class '" + rule.class_name + "' is unknown");
    rule.predicted = static_cast<ClassId>(it - rs.classes.begin());
    rule.order = get<std::size_t>(r, "order");
    rule.tie_broken = get<bool>(r, "tie_broken");
    const auto& S = r.at("stats");
    const auto& hits = S.at("class_hits");
    for (const auto& c : rs.classes) rule.stats.class_hits.push_back(hits.value(c, std::size_t{0}));
    rule.stats.hits = get<std::size_t>(S, "hits");
    rule.stats.precision = get<double>(S, "precision");
    rule.stats.coverage_in_class = get<double>(S, "coverage_in_class");
    rule.stats.coverage_total = get<double>(S, "coverage_total");
    rule.stats.active_cases = get<std::size_t>(S, "active_cases");
    rule.stats.active_in_class = get<std::size_t>(S, "active_in_class");
    rs.rules.push_back(std::move(rule));
  }
  return rs;
}

std::string report_to_json(const ClassificationReport& report) {
  return report_json(report).dump(2);
}

std::string split_report_to_json(const SplitReport& report) {
  const json doc = {{"format", "epc-split-report"},
                    {"version", kFormatVersion},
                    {"params", params_json(report.rules.params)},
                    {"train", report_json(report.train)},
                    {"validation", report_json(report.validation)},
                    {"validation_clamped", report.validation_clamped}};
  return doc.dump(2);
}

std::string rule_to_json(const DominanceRule& rule, std::span<const std::string> classes) {
  return rule_json(rule, classes).dump();
}

std::string evaluation_to_json(const RectEvaluation& ev, std::span<const std::string> classes) {
  json doc = {{"class_hits", class_hits_json(ev.class_hits, classes)},
              {"hits", ev.hits},
              {"dominant", nullptr},
              {"tie_broken", ev.tie_broken},
              {"precision", ev.precision},
              {"coverage_in_class", ev.coverage_in_class},
              {"coverage_total", ev.coverage_total},
              {"active_cases", ev.active_cases},
              {"active_in_class", ev.active_in_class}};
  if (ev.dominant) doc["dominant"] = classes[*ev.dominant];
  return doc.dump();
}

std::string mining_params_to_json(const MiningParams& params) { return params_json(params).dump(); }

MiningParams mining_params_from_json(std::string_view text) { return params_from(parse(text)); }

std::string optimize_result_to_json(const OptimizeResult& result) {
  json trace = json::array();
  for (const auto& s : result.trace) {
    trace.push_back({{"weights", s.weights},
                     {"value", s.value ? json(*s.value) : json(nullptr)},
                     {"accepted", s.accepted},
                     {"note", s.note}});
  }
  const json doc = {{"weights", result.weights},
                    {"value", result.value},
                    {"initial_value", result.initial_value},
                    {"trace", trace}};
  return doc.dump(2);
}

}  // namespace epc
