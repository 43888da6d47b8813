#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "epc/data.hpp"
#include "epc/pipeline.hpp"
#include "epc/rules.hpp"

namespace epc {

/// Published result a run is compared with.
struct PublishedRow {
  std::size_t rules = 0;
  double recall_pct = 0.0;
  double precision_pct = 0.0;
};

/// What a run must reach to pass.
struct Thresholds {
  std::optional<std::size_t> max_rules;
  double min_recall_pct = 0.0;
  double min_precision_pct = 0.0;
};

enum class RecallBasis : std::uint8_t {
  /// Covered cases over all cases.
  kAllCases,
  /// Correctly covered cases over the cases of the rule class.
  kRuleClass,
};

struct RecipeRun {
  std::string label;
  MiningTarget target;
  std::vector<MatchMode> modes;
  RecallBasis basis = RecallBasis::kAllCases;
  PublishedRow published;
  Thresholds thresholds;
};

/// How to load one public dataset and which mining runs to perform on it.
struct ExperimentRecipe {
  std::string name;
  std::vector<std::string> file_names;  // first one found in the data directory wins
  std::string notes;
  std::function<Dataset(const std::filesystem::path&)> load;
  EmbeddingConfig embedding;
  /// Rectangle sizes searched; the stride is a quarter of the smaller side.
  std::vector<std::array<double, 2>> sizes;
  std::vector<RecipeRun> runs;
};

const std::vector<ExperimentRecipe>& recipes();

/// Throws ConfigurationError for an unknown name.
const ExperimentRecipe& find_recipe(std::string_view name);

std::optional<std::filesystem::path> locate_data(const ExperimentRecipe& recipe,
                                                 const std::filesystem::path& dir);

struct RunResult {
  std::string label;
  MiningParams params;
  RuleSet rules;
  ClassificationReport report;
  double recall_pct = 0.0;
  double precision_pct = 0.0;
  PublishedRow published;
  Thresholds thresholds;
  bool passed = false;
  double seconds = 0.0;
};

/// Grid search over sizes and modes; keeps, per run, the candidate that
/// passes with the best recall x precision (fewer rules on ties), or the best
/// failing one when none passes.
std::vector<RunResult> run_recipe(const ExperimentRecipe& recipe, const Dataset& raw);

std::string results_to_json(std::string_view recipe, std::span<const RunResult> results);

/// Categorical Car attributes mapped to ordinals; see the recipe notes.
Dataset load_car(const std::filesystem::path& path);

}  // namespace epc
