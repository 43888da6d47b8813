#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "epc/data.hpp"
#include "epc/embedding.hpp"
#include "epc/layout.hpp"
#include "epc/rules.hpp"

namespace epc {

/// Everything needed to turn a raw dataset into graphs. `layout.dims` is
/// overwritten with the padded dimension.
struct EmbeddingConfig {
  LayoutConfig layout;
  EllipseSpec ellipse = EllipseSpec::unit_circle();
  PaddingPolicy padding = PaddingPolicy::duplicate_last();
};

/// A dataset normalized, padded and embedded under one layout.
struct PreparedData {
  Dataset data;                       // normalized and padded
  std::vector<ColumnStats> raw_stats;  // statistics of the raw feature columns
  std::vector<std::string> raw_columns;
  Layout layout;
  std::vector<EpcGraph> graphs;
  std::size_t clamped = 0;
};

/// Normalizes with the dataset's own statistics.
PreparedData prepare(const Dataset& raw, const EmbeddingConfig& config);

/// Normalizes with given statistics (e.g. from training data), clamping.
PreparedData prepare(const Dataset& raw, const EmbeddingConfig& config,
                     std::span<const ColumnStats> stats);

/// Rules together with what is needed to apply them to new raw data.
struct RuleSet {
  EmbeddingConfig embedding;
  std::string fingerprint;
  std::vector<std::string> columns;
  std::vector<ColumnStats> stats;
  MiningParams params;
  std::vector<std::string> classes;  // label space the rules were mined in
  std::vector<DominanceRule> rules;
};

RuleSet mine_rules(const PreparedData& prepared, const MiningParams& params);

/// Applies the rules to already embedded data. Throws ConfigurationError when
/// the data was embedded under a different layout.
ClassificationReport classify_prepared(const PreparedData& prepared, const RuleSet& rules);

/// Normalizes raw data with the rule set's statistics, embeds and classifies.
/// Throws DataError when the feature columns do not match.
ClassificationReport classify_dataset(const Dataset& raw, const RuleSet& rules,
                                      std::size_t* clamped = nullptr);

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
};

/// Deterministic shuffle-and-cut split; the same seed gives the same split on
/// every platform.
Split random_split(std::size_t cases, double train_fraction, std::uint64_t seed);

struct SplitReport {
  RuleSet rules;
  ClassificationReport train;
  ClassificationReport validation;
  std::size_t validation_clamped = 0;
};

/// Mines on the training rows (normalized with their own statistics) and
/// evaluates the frozen rules on the validation rows. Throws DataError for an
/// empty side or an index out of range.
SplitReport evaluate_split(const Dataset& raw, const EmbeddingConfig& config,
                           const MiningParams& params, const Split& split);

Dataset subset(const Dataset& ds, std::span<const std::size_t> indices);

enum class Objective : std::uint8_t {
  /// Weighted precision times total recall of automatically mined rules.
  kRuleQuality,
  /// Mean inter-class graph distance over mean intra-class graph distance.
  kClassCompactness,
};

std::string_view to_string(Objective o);
std::optional<Objective> objective_from_string(std::string_view s);

struct OptimizeOptions {
  Objective objective = Objective::kRuleQuality;
  double step = 0.25;
  std::size_t budget = 60;  // objective evaluations, including restarts
  std::size_t restarts = 2;
  std::uint64_t seed = 1;
  std::vector<double> initial;  // empty means all ones
  /// Cap on cases used by the compactness objective (pairwise cost).
  std::size_t compactness_sample = 400;
};

struct OptimizeStep {
  std::vector<double> weights;
  std::optional<double> value;  // nullopt when the weights gave no valid layout
  bool accepted = false;
  std::string note;
};

struct OptimizeResult {
  std::vector<double> weights;
  double value = 0.0;
  double initial_value = 0.0;
  std::vector<OptimizeStep> trace;
};

/// Objective of one weight vector; throws what layout construction or
/// embedding throws.
double objective_value(const Dataset& raw, const EmbeddingConfig& config,
                       std::span<const double> weights, const MiningParams& params,
                       const OptimizeOptions& options);

/// Hill climbing over layout weights with random restarts: one weight moves by
/// +-step per evaluation and improvements are kept. Deterministic per seed.
OptimizeResult optimize_weights(const Dataset& raw, const EmbeddingConfig& config,
                                const MiningParams& params, const OptimizeOptions& options);

}  // namespace epc
