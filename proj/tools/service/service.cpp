#include "service.hpp"

#include <algorithm>
#include <charconv>
#include <shared_mutex>
#include <sstream>

#include "epc/errors.hpp"
#include "epc/pipeline.hpp"
#include "epc/scene.hpp"
#include "epc/serialize.hpp"
#include "json.hpp"

namespace epc::service {

using nlohmann::json;

namespace {

// Request problems the client can fix: 400.
struct BadRequest : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct NotFound : std::runtime_error {
  using std::runtime_error::runtime_error;
};
// Layout fingerprints or label spaces disagree: 409.
struct Conflict : std::runtime_error {
  using std::runtime_error::runtime_error;
};

Response json_response(int status, const json& body) { return {status, "application/json", body.dump()}; }

Response error(int status, std::string_view message) {
  return json_response(status, {{"error", message}, {"status", status}});
}

std::vector<std::string> split_path(std::string_view path) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < path.size()) {
    while (i < path.size() && path[i] == '/') ++i;
    const std::size_t j = path.find('/', i);
    const std::size_t end = j == std::string_view::npos ? path.size() : j;
    if (end > i) out.emplace_back(path.substr(i, end - i));
    i = end;
  }
  return out;
}

std::optional<std::string> query(const Request& r, const std::string& key) {
  const auto it = r.query.find(key);
  if (it == r.query.end()) return std::nullopt;
  return it->second;
}

json parse_body(const Request& r) {
  try {
    return json::parse(r.body);
  } catch (const json::parse_error& e) {
    throw BadRequest(std::string("malformed JSON body: ") + e.what());
  }
}

Rect rect_from(const json& body) {
  if (!body.is_object() || !body.contains("rect")) throw BadRequest("body needs a 'rect'");
  const auto& r = body.at("rect");
  try {
    return Rect::checked(r.at("xmin").get<double>(), r.at("ymin").get<double>(),
                         r.at("xmax").get<double>(), r.at("ymax").get<double>());
  } catch (const json::exception&) {
    throw BadRequest("rect needs numeric xmin, ymin, xmax, ymax");
  } catch (const DomainError& e) {
    throw BadRequest(e.what());
  }
}

MatchMode mode_from(const json& body) {
  if (!body.contains("mode")) return MatchMode::kPoint;
  if (!body.at("mode").is_string()) throw BadRequest("mode must be a string");
  const auto m = match_mode_from_string(body.at("mode").get<std::string>());
  if (!m) throw BadRequest("mode must be 'point' or 'intersect'");
  return *m;
}

bool same_target(const MiningTarget& a, const MiningTarget& b) {
  if (a.kind != b.kind) return false;
  return a.kind == MiningTarget::Kind::kMulticlass || a.class_name == b.class_name;
}

}  // namespace

struct Session {
  std::shared_mutex mutex;
  Dataset raw;
  EmbeddingConfig embedding;
  std::unique_ptr<PreparedData> prepared;
  // Label space of every rule in the session; only the kind and class of the
  // target matter here.
  MiningTarget space_target;
  LabelSpace space;
  std::vector<DominanceRule> rules;
  std::vector<std::uint8_t> active;

  void embed() {
    prepared = std::make_unique<PreparedData>(prepare(raw, embedding));
    set_space(space_target);
  }

  void set_space(const MiningTarget& t) {
    space = label_space(prepared->data.labels, prepared->data.classes, t);
    space_target = {t.kind, t.class_name, {}};
  }

  void refresh() {
    active = rebase(prepared->graphs, space, rules);
  }

  std::size_t active_count() const {
    return static_cast<std::size_t>(std::count(active.begin(), active.end(), 1));
  }

  RuleSet rule_set() const {
    RuleSet rs;
    rs.embedding = embedding;
    rs.embedding.layout = prepared->layout.config();
    rs.embedding.ellipse = prepared->layout.ellipse();
    rs.fingerprint = prepared->layout.fingerprint();
    rs.columns = prepared->raw_columns;
    rs.stats = prepared->raw_stats;
    rs.params.target = space_target;
    rs.classes = space.classes;
    rs.rules = rules;
    return rs;
  }

  json summary(const std::string& id) const {
    return {{"id", id},
            {"n", prepared->data.dims()},
            {"rawDims", raw.dims()},
            {"classes", raw.classes},
            {"caseCount", raw.size()},
            {"activeCount", active_count()},
            {"ruleCount", rules.size()},
            {"fingerprint", json::parse(prepared->layout.fingerprint())}};
  }
};

Service::Service() = default;
Service::~Service() = default;

std::shared_ptr<Session> Service::find(const std::string& id) {
  std::lock_guard lock(registry_mutex_);
  const auto it = sessions_.find(id);
  if (it == sessions_.end()) throw NotFound("unknown dataset '" + id + "'");
  return it->second;
}

std::string Service::add(std::shared_ptr<Session> session) {
  std::lock_guard lock(registry_mutex_);
  const std::string id = "d" + std::to_string(next_id_++);
  sessions_.emplace(id, std::move(session));
  return id;
}

Response Service::upload(const Request& req) {
  CsvOptions csv;
  if (const auto h = query(req, "header")) csv.header = *h != "false" && *h != "0";
  if (const auto lc = query(req, "label-column")) {
    long idx = 0;
    const auto [p, ec] = std::from_chars(lc->data(), lc->data() + lc->size(), idx);
    if (ec == std::errc() && p == lc->data() + lc->size()) {
      csv.label_index = idx;
    } else {
      csv.label_name = *lc;
    }
  }
  auto session = std::make_shared<Session>();
  try {
    if (const auto pad = query(req, "pad")) session->embedding.padding = padding_from_string(*pad);
    if (const auto layout = query(req, "layout")) {
      const auto m = layout_mode_from_string(*layout);
      if (!m) throw BadRequest("layout must be seq, mirror or dynamic");
      session->embedding.layout.mode = *m;
    }
    if (const auto w = query(req, "weights")) session->embedding.layout.weights = parse_number_list(*w);
    if (const auto e = query(req, "ellipse")) session->embedding.ellipse = parse_ellipse(*e);
  } catch (const ConfigurationError& e) {
    throw BadRequest(e.what());
  }
  session->raw = load_csv(req.body, csv).dataset;
  session->embed();
  session->refresh();
  const std::string id = add(session);
  std::shared_lock lock(session->mutex);
  return json_response(201, session->summary(id));
}

Response Service::import_snapshot(const Request& req) {
  const json doc = parse_body(req);
  if (!doc.is_object() || doc.value("format", "") != "epc-session") {
    throw BadRequest("not an epc session snapshot");
  }
  auto session = std::make_shared<Session>();
  RuleSet rs;
  try {
    const auto& d = doc.at("dataset");
    const auto labels = d.at("labels").get<std::vector<std::string>>();
    session->raw = make_dataset(d.at("columns").get<std::vector<std::string>>(),
                                d.at("rows").get<std::vector<std::vector<double>>>(), labels);
    rs = rule_set_from_json(doc.at("rules").dump());
  } catch (const json::exception& e) {
    throw BadRequest(std::string("malformed snapshot: ") + e.what());
  } catch (const ConfigurationError& e) {
    throw Conflict(e.what());
  }
  session->embedding = rs.embedding;
  session->embed();
  if (session->prepared->layout.fingerprint() != rs.fingerprint) {
    throw Conflict("snapshot layout does not match its fingerprint");
  }
  session->set_space(rs.params.target);
  if (session->space.classes != rs.classes) throw Conflict("snapshot classes do not match its data");
  session->rules = rs.rules;
  session->refresh();
  const std::string id = add(session);
  std::shared_lock lock(session->mutex);
  return json_response(201, session->summary(id));
}

Response Service::handle(const Request& req) {
  try {
    if (req.method == "OPTIONS") return {204, "text/plain", ""};
    const auto seg = split_path(req.path);
    if (seg.size() < 2 || seg[0] != "api") throw NotFound("no such endpoint");
    if (seg.size() == 2 && seg[1] == "datasets" && req.method == "POST") return upload(req);
    if (seg.size() == 2 && seg[1] == "import" && req.method == "POST") return import_snapshot(req);
    if (seg[1] != "datasets" || seg.size() < 3) throw NotFound("no such endpoint");

    const std::string& id = seg[2];
    const auto s = find(id);
    const std::string what = seg.size() > 3 ? seg[3] : "";

    if (seg.size() == 3 && req.method == "GET") {
      std::shared_lock lock(s->mutex);
      return json_response(200, s->summary(id));
    }
    if (what == "scene" && seg.size() == 4 && req.method == "GET") {
      SceneOptions opt;
      if (const auto v = query(req, "visibility")) {
        const auto vis = visibility_from_string(*v);
        if (!vis) throw BadRequest("visibility must be all, outside-rules or inside-rules");
        opt.visibility = *vis;
      }
      if (const auto c = query(req, "selectedCase")) {
        std::size_t k = 0;
        const auto [p, ec] = std::from_chars(c->data(), c->data() + c->size(), k);
        if (ec != std::errc() || p != c->data() + c->size()) {
          throw BadRequest("selectedCase must be a case index");
        }
        opt.selected_case = k;
      }
      std::shared_lock lock(s->mutex);
      try {
        return {200, "application/json",
                to_json(build_scene(*s->prepared, s->rules, s->space.classes, opt))};
      } catch (const DomainError& e) {
        throw BadRequest(e.what());
      }
    }
    if (what == "evaluate" && seg.size() == 4 && req.method == "POST") {
      const json body = parse_body(req);
      const Rect rect = rect_from(body);
      const MatchMode mode = mode_from(body);
      std::shared_lock lock(s->mutex);
      const auto ev = evaluate_rect(rect, s->prepared->graphs, s->space.labels, s->space.classes,
                                    mode, s->active);
      return {200, "application/json", evaluation_to_json(ev, s->space.classes)};
    }
    if (what == "rules" && seg.size() == 4 && req.method == "POST") {
      const json body = parse_body(req);
      const Rect rect = rect_from(body);
      const MatchMode mode = mode_from(body);
      std::unique_lock lock(s->mutex);
      if (body.contains("fingerprint") && body.at("fingerprint").dump() !=
                                              json::parse(s->prepared->layout.fingerprint()).dump()) {
        throw Conflict("rectangle was drawn under a different layout");
      }
      std::optional<ClassId> cls;
      if (body.contains("class")) {
        const auto name = body.at("class").get<std::string>();
        const auto it = std::find(s->space.classes.begin(), s->space.classes.end(), name);
        if (it == s->space.classes.end()) throw BadRequest("unknown class '" + name + "'");
        cls = static_cast<ClassId>(it - s->space.classes.begin());
      }
      DominanceRule rule;
      try {
        rule = freeze_rule(rect, mode, s->prepared->graphs, s->space, s->active, s->rules.size(), cls);
      } catch (const DomainError& e) {
        return error(422, e.what());
      }
      s->rules.push_back(rule);
      s->refresh();
      json out = {{"rule", json::parse(rule_to_json(s->rules.back(), s->space.classes))},
                  {"activeCount", s->active_count()}};
      return json_response(201, out);
    }
    if (what == "rules" && seg.size() == 5 && req.method == "DELETE") {
      std::string rid = seg[4];
      if (!rid.empty() && rid[0] == 'r') rid.erase(0, 1);
      std::size_t k = 0;
      const auto [p, ec] = std::from_chars(rid.data(), rid.data() + rid.size(), k);
      std::unique_lock lock(s->mutex);
      if (ec != std::errc() || p != rid.data() + rid.size() || k == 0 || k > s->rules.size()) {
        throw NotFound("unknown rule '" + seg[4] + "'");
      }
      s->rules.erase(s->rules.begin() + static_cast<std::ptrdiff_t>(k - 1));
      s->refresh();
      json rules = json::array();
      for (const auto& r : s->rules) rules.push_back(json::parse(rule_to_json(r, s->space.classes)));
      return json_response(200, {{"rules", rules}, {"activeCount", s->active_count()}});
    }
    if (what == "mine" && seg.size() == 4 && req.method == "POST") {
      MiningParams params;
      try {
        params = mining_params_from_json(req.body.empty() ? "{}" : req.body);
      } catch (const Error& e) {
        throw BadRequest(e.what());
      }
      std::unique_lock lock(s->mutex);
      if (!same_target(params.target, s->space_target)) {
        if (!s->rules.empty()) {
          throw Conflict("the session's rules use another label space; delete them first");
        }
        s->set_space(params.target);
        s->refresh();
      }
      auto mined = mine(s->prepared->graphs, s->space, params, s->active);
      json added = json::array();
      for (auto& r : mined) {
        r.order = s->rules.size();
        s->rules.push_back(r);
        added.push_back(json::parse(rule_to_json(s->rules.back(), s->space.classes)));
      }
      s->refresh();
      return json_response(200, {{"rules", added}, {"activeCount", s->active_count()}});
    }
    if (what == "report" && seg.size() == 4 && req.method == "GET") {
      std::shared_lock lock(s->mutex);
      const auto rep = classify(s->prepared->graphs, s->prepared->data.labels,
                                s->prepared->data.classes, s->rules);
      return {200, "application/json", report_to_json(rep)};
    }
    if (what == "weights" && seg.size() == 4 && req.method == "PUT") {
      const json body = parse_body(req);
      std::vector<double> weights;
      try {
        weights = body.at("weights").get<std::vector<double>>();
      } catch (const json::exception&) {
        throw BadRequest("body needs numeric 'weights'");
      }
      std::unique_lock lock(s->mutex);
      EmbeddingConfig cfg = s->embedding;
      cfg.layout.weights = weights;
      auto prepared = std::make_unique<PreparedData>(prepare(s->raw, cfg));
      const std::size_t dropped = s->rules.size();
      s->embedding = cfg;
      s->prepared = std::move(prepared);
      s->set_space(s->space_target);
      s->rules.clear();
      s->refresh();
      Scene scene = build_scene(*s->prepared, s->rules, s->space.classes);
      if (dropped > 0) {
        scene.warnings.push_back(std::to_string(dropped) +
                                 " accepted rules were removed because the layout changed");
      }
      return {200, "application/json", to_json(scene)};
    }
    if (what == "export" && seg.size() == 4 && req.method == "POST") {
      std::shared_lock lock(s->mutex);
      std::vector<std::string> labels;
      for (ClassId l : s->raw.labels) labels.push_back(s->raw.classes[l]);
      const json doc = {{"format", "epc-session"},
                        {"version", 1},
                        {"dataset", {{"columns", s->raw.columns}, {"rows", s->raw.rows}, {"labels", labels}}},
                        {"rules", json::parse(rule_set_to_json(s->rule_set()))}};
      return json_response(200, doc);
    }
    throw NotFound("no such endpoint");
  } catch (const BadRequest& e) {
    return error(400, e.what());
  } catch (const NotFound& e) {
    return error(404, e.what());
  } catch (const Conflict& e) {
    return error(409, e.what());
  } catch (const Error& e) {
    // Data, geometry, domain and configuration errors all describe input
    // the server understood but cannot process.
    return error(422, e.what());
  } catch (const json::exception& e) {
    return error(400, e.what());
  }
}

std::vector<double> parse_number_list(std::string_view text) {
  std::vector<double> out;
  std::size_t i = 0;
  while (i <= text.size()) {
    const std::size_t j = std::min(text.find(',', i), text.size());
    const std::string item(text.substr(i, j - i));
    double v = 0.0;
    const auto [p, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (item.empty() || ec != std::errc() || p != item.data() + item.size()) {
      throw ConfigurationError("'" + item + "' is not a number");
    }
    out.push_back(v);
    i = j + 1;
  }
  return out;
}

EllipseSpec parse_ellipse(std::string_view text) {
  const auto v = parse_number_list(text);
  if (v.size() != 4) throw ConfigurationError("ellipse needs cx,cy,W,H");
  try {
    return EllipseSpec(v[0], v[1], v[2], v[3]);
  } catch (const DomainError& e) {
    throw ConfigurationError(e.what());
  }
}

}  // namespace epc::service
