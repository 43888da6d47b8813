// epc command-line tool: project, mine, classify, synth, reproduce, serve.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "epc/data.hpp"
#include "epc/errors.hpp"
#include "epc/experiments.hpp"
#include "epc/pipeline.hpp"
#include "epc/scene.hpp"
#include "epc/serialize.hpp"
#include "service.hpp"

namespace {

enum Exit : int { kOk = 0, kUsage = 1, kData = 2, kGeometry = 3, kTargetsMissed = 4 };

struct InputFlags {
  std::string csv;
  std::string label_column;
  bool no_header = false;
};

struct EmbeddingFlags {
  std::string layout = "seq";
  std::string weights;
  std::string pad = "dup";
  std::string ellipse;
};

void add_input(CLI::App& cmd, InputFlags& f) {
  cmd.add_option("csv", f.csv, "Input CSV, label in the last column by default")->required();
  cmd.add_option("--label-column", f.label_column, "Label column by header name or index");
  cmd.add_flag("--no-header", f.no_header, "The first line is data");
}

void add_embedding(CLI::App& cmd, EmbeddingFlags& f) {
  cmd.add_option("--layout", f.layout, "seq, mirror or dynamic")->default_str("seq");
  cmd.add_option("--weights", f.weights, "Comma separated coordinate weights");
  cmd.add_option("--pad", f.pad, "Odd-dimension padding: dup or const:<v>")->default_str("dup");
  cmd.add_option("--ellipse", f.ellipse, "Central ellipse cx,cy,W,H");
}

epc::Dataset load_input(const InputFlags& f) {
  epc::CsvOptions o;
  o.header = !f.no_header;
  if (!f.label_column.empty()) {
    try {
      std::size_t used = 0;
      const long idx = std::stol(f.label_column, &used);
      if (used != f.label_column.size()) throw std::invalid_argument("name");
      o.label_index = idx;
    } catch (const std::logic_error&) {
      o.label_name = f.label_column;
    }
  }
  return epc::load_csv_file(f.csv, o).dataset;
}

epc::EmbeddingConfig embedding_from(const EmbeddingFlags& f) {
  epc::EmbeddingConfig cfg;
  const auto mode = epc::layout_mode_from_string(f.layout);
  if (!mode) throw epc::ConfigurationError("--layout must be seq, mirror or dynamic");
  cfg.layout.mode = *mode;
  if (!f.weights.empty()) cfg.layout.weights = epc::service::parse_number_list(f.weights);
  cfg.padding = epc::padding_from_string(f.pad);
  if (!f.ellipse.empty()) cfg.ellipse = epc::service::parse_ellipse(f.ellipse);
  return cfg;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text << '\n';
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw epc::DataError("cannot write " + path);
  out << text << '\n';
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw epc::DataError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool ends_with(const std::string& s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

int run(int argc, char** argv) {
  CLI::App app{"Elliptic paired coordinates: lossless 2-D graphs of n-D data and dominance rules"};
  app.require_subcommand(1);

  InputFlags input;
  EmbeddingFlags emb;

  auto* project = app.add_subcommand("project", "Embed a CSV and write the scene as SVG or JSON");
  add_input(*project, input);
  add_embedding(*project, emb);
  std::string project_out;
  project->add_option("--out", project_out, "Output .svg or .json")->required();

  auto* mine = app.add_subcommand("mine", "Mine dominance rules");
  add_input(*mine, input);
  add_embedding(*mine, emb);
  std::string mode_text;
  epc::MiningParams params;
  std::string one_vs_rest;
  std::string mine_out;
  mine->add_option("--mode", mode_text, "point or intersect")->required();
  mine->add_option("--rect-w", params.rect_width, "Rectangle width")->required();
  mine->add_option("--rect-h", params.rect_height, "Rectangle height")->required();
  mine->add_option("--stride", params.stride, "Grid step")->required();
  mine->add_option("--min-coverage", params.min_coverage, "Minimum coverage in class")
      ->default_str("0.10");
  mine->add_option("--min-precision", params.min_precision, "Minimum precision")->default_str("0.90");
  mine->add_option("--one-vs-rest", one_vs_rest, "Mine <class> against all others");
  mine->add_option("--max-rules", params.max_rules, "Rule cap")->default_str("100");
  mine->add_option("--out", mine_out, "rules.json")->required();

  auto* cls = app.add_subcommand("classify", "Apply a rule set to a CSV");
  add_input(*cls, input);
  std::string rules_path;
  std::string classify_out;
  cls->add_option("--rules", rules_path, "rules.json")->required();
  cls->add_option("--out", classify_out, "report.json (stdout when omitted)");

  auto* synth = app.add_subcommand("synth", "Write a synthetic point set");
  std::string family;
  std::string synth_out;
  synth->add_option("family", family, "A, B, C or S4")->required();
  synth->add_option("--out", synth_out, "Output CSV")->required();

  auto* reproduce = app.add_subcommand("reproduce", "Rerun a published experiment on local data");
  std::string recipe_name;
  std::string data_dir;
  std::string reproduce_out;
  reproduce->add_option("name", recipe_name, "iris, wbc, glass, car, ionosphere, abalone or skin")
      ->required();
  reproduce->add_option("--data-dir", data_dir, "Directory with the data files")->required();
  reproduce->add_option("--out", reproduce_out, "Results JSON");

  auto* serve = app.add_subcommand("serve", "Run the HTTP API");
  epc::service::ServeOptions serve_opts;
  serve->add_option("--port", serve_opts.port, "TCP port")->default_str("8080");
  serve->add_option("--host", serve_opts.host, "Bind address")->default_str("127.0.0.1");
  serve->add_option("--ui-assets", serve_opts.ui_assets, "Static UI directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  if (*project) {
    if (!ends_with(project_out, ".svg") && !ends_with(project_out, ".json")) {
      throw epc::ConfigurationError("--out must end in .svg or .json");
    }
    const auto prepared = epc::prepare(load_input(input), embedding_from(emb));
    const auto scene = epc::build_scene(prepared, {}, {});
    write_text(project_out, ends_with(project_out, ".svg") ? epc::to_svg(scene) : epc::to_json(scene));
    return kOk;
  }
  if (*mine) {
    const auto m = epc::match_mode_from_string(mode_text);
    if (!m) throw epc::ConfigurationError("--mode must be point or intersect");
    params.mode = *m;
    if (!one_vs_rest.empty()) {
      params.target.kind = epc::MiningTarget::Kind::kOneVsRest;
      params.target.class_name = one_vs_rest;
    }
    params.validate();
    const auto prepared = epc::prepare(load_input(input), embedding_from(emb));
    const auto rs = epc::mine_rules(prepared, params);
    write_text(mine_out, epc::rule_set_to_json(rs));
    std::fprintf(stderr, "%zu rules\n", rs.rules.size());
    return kOk;
  }
  if (*cls) {
    const auto rs = epc::rule_set_from_json(read_text(rules_path));
    std::size_t clamped = 0;
    const auto report = epc::classify_dataset(load_input(input), rs, &clamped);
    if (clamped > 0) std::fprintf(stderr, "warning: %zu values clamped into [0,1]\n", clamped);
    write_text(classify_out, epc::report_to_json(report));
    return kOk;
  }
  if (*synth) {
    const auto f = epc::synthetic_from_string(family);
    if (!f) throw epc::ConfigurationError("family must be A, B, C or S4");
    std::ofstream out(synth_out, std::ios::binary);
    if (!out) throw epc::DataError("cannot write " + synth_out);
    epc::write_csv(epc::generate_synthetic(*f), out);
    return kOk;
  }
  if (*reproduce) {
    const auto& recipe = epc::find_recipe(recipe_name);
    const auto path = epc::locate_data(recipe, data_dir);
    if (!path) {
      std::string names;
      for (const auto& n : recipe.file_names) names += " " + n;
      throw epc::DataError("none of" + names + " found in " + data_dir + "; " + recipe.notes);
    }
    const auto results = epc::run_recipe(recipe, recipe.load(*path));
    bool all = true;
    std::printf("%-22s %-28s %-28s %s\n", "run", "published rules/rec/prec", "achieved rules/rec/prec",
                "verdict");
    for (const auto& r : results) {
      char pub[64];
      char got[64];
      std::snprintf(pub, sizeof pub, "%zu / %.2f%% / %.2f%%", r.published.rules, r.published.recall_pct,
                    r.published.precision_pct);
      std::snprintf(got, sizeof got, "%zu / %.2f%% / %.2f%%", r.rules.rules.size(), r.recall_pct,
                    r.precision_pct);
      std::printf("%-22s %-28s %-28s %s (%s %gx%g, %.2fs)\n", r.label.c_str(), pub, got,
                  r.passed ? "PASS" : "MISS", std::string(epc::to_string(r.params.mode)).c_str(),
                  r.params.rect_width, r.params.rect_height, r.seconds);
      all = all && r.passed;
    }
    if (!reproduce_out.empty()) write_text(reproduce_out, epc::results_to_json(recipe.name, results));
    return all ? kOk : kTargetsMissed;
  }
  if (*serve) {
    epc::service::Service service;
    std::fprintf(stderr, "listening on http://%s:%d\n", serve_opts.host.c_str(), serve_opts.port);
    if (!epc::service::serve(service, serve_opts)) {
      std::fprintf(stderr, "error: cannot serve on port %d\n", serve_opts.port);
      return kUsage;
    }
    return kOk;
  }
  return kUsage;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const epc::ConfigurationError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsage;
  } catch (const epc::GeometryError& e) {
    std::fprintf(stderr, "geometry error: %s\n", e.what());
    return kGeometry;
  } catch (const epc::Error& e) {
    // data and out-of-domain values
    std::fprintf(stderr, "data error: %s\n", e.what());
    return kData;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kData;
  }
}
