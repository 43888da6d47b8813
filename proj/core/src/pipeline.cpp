#include "epc/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "epc/errors.hpp"

namespace epc {

namespace {

std::size_t padded_dims(std::size_t dims, const PaddingPolicy& padding) {
  return dims % 2 == 1 && padding.kind != PaddingPolicy::Kind::kNone ? dims + 1 : dims;
}

// Uniform double in [0, 1) from the top 53 bits; avoids the
// implementation-defined distributions so runs agree across standard libraries.
double unit_real(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

double mean_node_distance(const EpcGraph& a, const EpcGraph& b) {
  double sum = 0.0;
  for (std::size_t k = 0; k < a.nodes.size(); ++k) sum += distance(a.nodes[k], b.nodes[k]);
  return sum / static_cast<double>(a.nodes.size());
}

double compactness(const PreparedData& prep, std::size_t cap) {
  const std::size_t n = prep.graphs.size();
  std::vector<std::size_t> pick;
  if (n <= cap) {
    pick.resize(n);
    for (std::size_t i = 0; i < n; ++i) pick[i] = i;
  } else {
    for (std::size_t k = 0; k < cap; ++k) pick.push_back(k * n / cap);
  }
  double inter = 0.0;
  double intra = 0.0;
  std::size_t n_inter = 0;
  std::size_t n_intra = 0;
  for (std::size_t a = 0; a < pick.size(); ++a) {
    for (std::size_t b = a + 1; b < pick.size(); ++b) {
      const auto& ga = prep.graphs[pick[a]];
      const auto& gb = prep.graphs[pick[b]];
      const double d = mean_node_distance(ga, gb);
      if (ga.label == gb.label) {
        intra += d;
        ++n_intra;
      } else {
        inter += d;
        ++n_inter;
      }
    }
  }
  if (n_inter == 0 || n_intra == 0) {
    throw DataError("class compactness needs two classes with at least two cases each");
  }
  return (inter / n_inter) / std::max(intra / n_intra, 1e-12);
}

}  // namespace

PreparedData prepare(const Dataset& raw, const EmbeddingConfig& config) {
  return prepare(raw, config, column_stats(raw));
}

PreparedData prepare(const Dataset& raw, const EmbeddingConfig& config,
                     std::span<const ColumnStats> stats) {
  std::size_t clamped = 0;
  Dataset data = pad(normalize_with(raw, stats, &clamped), config.padding);
  LayoutConfig lc = config.layout;
  lc.dims = data.dims();
  Layout layout(std::move(lc), config.ellipse);
  auto graphs = embed_rows(data.rows, data.labels, layout);
  return PreparedData{std::move(data),
                      std::vector<ColumnStats>(stats.begin(), stats.end()),
                      raw.columns,
                      std::move(layout),
                      std::move(graphs),
                      clamped};
}

RuleSet mine_rules(const PreparedData& prepared, const MiningParams& params) {
  params.validate();
  const auto space = label_space(prepared.data.labels, prepared.data.classes, params.target);
  RuleSet out;
  out.embedding.layout = prepared.layout.config();
  out.embedding.ellipse = prepared.layout.ellipse();
  out.fingerprint = prepared.layout.fingerprint();
  out.columns = prepared.raw_columns;
  out.stats = prepared.raw_stats;
  out.params = params;
  out.classes = space.classes;
  out.rules = mine(prepared.graphs, space, params);
  return out;
}

ClassificationReport classify_prepared(const PreparedData& prepared, const RuleSet& rules) {
  if (prepared.layout.fingerprint() != rules.fingerprint) {
    throw ConfigurationError("rules were mined under a different layout");
  }
  return classify(prepared.graphs, prepared.data.labels, prepared.data.classes, rules.rules);
}

ClassificationReport classify_dataset(const Dataset& raw, const RuleSet& rules,
                                      std::size_t* clamped) {
  if (raw.dims() != rules.stats.size()) {
    throw DataError("rules expect " + std::to_string(rules.stats.size()) +
                    " feature columns, data has " + std::to_string(raw.dims()));
  }
  const auto prep = prepare(raw, rules.embedding, rules.stats);
  if (clamped) *clamped = prep.clamped;
  return classify_prepared(prep, rules);
}

Split random_split(std::size_t cases, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
    throw DataError("train fraction must lie strictly between 0 and 1");
  }
  std::vector<std::size_t> idx(cases);
  for (std::size_t i = 0; i < cases; ++i) idx[i] = i;
  // Fisher-Yates with an explicit draw: std::shuffle's sequence differs between libraries.
  std::mt19937_64 rng(seed);
  for (std::size_t i = cases; i > 1; --i) std::swap(idx[i - 1], idx[rng() % i]);
  const auto cut = static_cast<std::size_t>(std::llround(train_fraction * cases));
  Split s;
  s.train.assign(idx.begin(), idx.begin() + cut);
  s.validation.assign(idx.begin() + cut, idx.end());
  std::sort(s.train.begin(), s.train.end());
  std::sort(s.validation.begin(), s.validation.end());
  return s;
}

Dataset subset(const Dataset& ds, std::span<const std::size_t> indices) {
  Dataset out;
  out.columns = ds.columns;
  out.classes = ds.classes;
  out.stats = ds.stats;
  for (auto i : indices) {
    if (i >= ds.size()) throw DataError("case index " + std::to_string(i) + " out of range");
    out.rows.push_back(ds.rows[i]);
    out.labels.push_back(ds.labels[i]);
  }
  return out;
}

SplitReport evaluate_split(const Dataset& raw, const EmbeddingConfig& config,
                           const MiningParams& params, const Split& split) {
  if (split.train.empty()) throw DataError("training side of the split is empty");
  if (split.validation.empty()) throw DataError("validation side of the split is empty");
  const auto train = subset(raw, split.train);
  const auto validation = subset(raw, split.validation);
  const auto prep_train = prepare(train, config);
  SplitReport out;
  out.rules = mine_rules(prep_train, params);
  out.train = classify_prepared(prep_train, out.rules);
  const auto prep_val = prepare(validation, out.rules.embedding, out.rules.stats);
  out.validation = classify_prepared(prep_val, out.rules);
  out.validation_clamped = prep_val.clamped;
  return out;
}

std::string_view to_string(Objective o) {
  return o == Objective::kRuleQuality ? "rule-quality" : "class-compactness";
}

std::optional<Objective> objective_from_string(std::string_view s) {
  if (s == "rule-quality") return Objective::kRuleQuality;
  if (s == "class-compactness") return Objective::kClassCompactness;
  return std::nullopt;
}

double objective_value(const Dataset& raw, const EmbeddingConfig& config,
                       std::span<const double> weights, const MiningParams& params,
                       const OptimizeOptions& options) {
  EmbeddingConfig cfg = config;
  cfg.layout.weights.assign(weights.begin(), weights.end());
  const auto prep = prepare(raw, cfg);
  if (options.objective == Objective::kClassCompactness) {
    return compactness(prep, options.compactness_sample);
  }
  const auto rules = mine_rules(prep, params);
  const auto report = classify_prepared(prep, rules);
  return report.weighted_precision * report.total_recall;
}

OptimizeResult optimize_weights(const Dataset& raw, const EmbeddingConfig& config,
                                const MiningParams& params, const OptimizeOptions& options) {
  if (!(options.step > 0.0)) throw ConfigurationError("weight step must be positive");
  const std::size_t dims = padded_dims(raw.dims(), config.padding);
  std::vector<double> current = options.initial;
  if (current.empty()) current.assign(dims, 1.0);
  if (current.size() != dims) {
    throw ConfigurationError("expected " + std::to_string(dims) + " initial weights");
  }
  if (std::any_of(current.begin(), current.end(), [](double w) { return !(w > 0.0); })) {
    throw ConfigurationError("initial weights must be positive");
  }

  auto evaluate = [&](const std::vector<double>& w) -> std::optional<double> {
    try {
      return objective_value(raw, config, w, params, options);
    } catch (const ConfigurationError&) {
      return std::nullopt;
    } catch (const GeometryError&) {
      return std::nullopt;
    }
  };

  OptimizeResult out;
  const auto first = evaluate(current);
  if (!first) throw ConfigurationError("initial weights do not give a valid layout");
  double current_value = *first;
  out.initial_value = current_value;
  out.weights = current;
  out.value = current_value;
  out.trace.push_back({current, current_value, true, "initial"});

  // Mirror weights move with their partner so the layout stays symmetric;
  // elsewhere every coordinate is its own partner.
  std::vector<std::size_t> partner(dims);
  std::iota(partner.begin(), partner.end(), std::size_t{0});
  if (config.layout.mode == LayoutMode::kMirror) partner = mirror_partners(dims);

  std::mt19937_64 rng(options.seed);
  const std::size_t budget = std::max<std::size_t>(options.budget, 1);
  const std::size_t per_start = std::max<std::size_t>(1, (budget - 1) / (options.restarts + 1));
  std::size_t used = 1;
  for (std::size_t start = 0; start <= options.restarts && used < budget; ++start) {
    if (start > 0) {
      std::vector<double> w = out.weights;
      for (std::size_t i = 0; i < dims; ++i) {
        if (partner[i] < i) continue;
        w[i] = std::max(options.step, w[i] * (0.5 + unit_real(rng)));
        w[partner[i]] = w[i];
      }
      const auto v = evaluate(w);
      ++used;
      out.trace.push_back({w, v, v.has_value(), "restart"});
      if (v) {
        current = w;
        current_value = *v;
        if (*v > out.value) {
          out.value = *v;
          out.weights = w;
        }
      } else {
        current = out.weights;
        current_value = out.value;
      }
    }
    for (std::size_t k = 0; k < per_start && used < budget; ++k) {
      std::vector<double> w = current;
      const std::size_t i = rng() % dims;
      w[i] += (rng() & 1) ? options.step : -options.step;
      std::string note;
      if (!(w[i] > 0.0)) {
        w[i] = options.step;
        note = "X" + std::to_string(i + 1) + " clamped to step";
      }
      w[partner[i]] = w[i];
      const auto v = evaluate(w);
      ++used;
      const bool better = v && *v > current_value;
      if (!v) note += note.empty() ? "no valid layout" : "; no valid layout";
      out.trace.push_back({w, v, better, note});
      if (better) {
        current = w;
        current_value = *v;
        if (*v > out.value) {
          out.value = *v;
          out.weights = w;
        }
      }
    }
  }
  return out;
}

}  // namespace epc
