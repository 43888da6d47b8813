#pragma once

#include <span>
#include <string>
#include <string_view>

#include "epc/pipeline.hpp"
#include "epc/rules.hpp"

namespace epc {

// JSON documents cross this interface as text so that no JSON library type
// leaks into the installed headers. Every writer emits canonical JSON (sorted
// keys, shortest round-trip numbers): equal inputs give equal bytes.

std::string padding_to_string(const PaddingPolicy& p);

/// rules.json: layout, ellipse, padding, normalization statistics, mining
/// parameters, label space and the ordered rules with their frozen stats.
std::string rule_set_to_json(const RuleSet& rules);

/// Parses rules.json and rebuilds the layout. Throws DataError for malformed
/// documents and ConfigurationError when the rebuilt layout does not match
/// the stored fingerprint.
RuleSet rule_set_from_json(std::string_view text);

/// report.json: one row per rule with coverage/recall in class and precision
/// in percent, totals with weighted precision, and the confusion matrix.
std::string report_to_json(const ClassificationReport& report);

std::string split_report_to_json(const SplitReport& report);

std::string rule_to_json(const DominanceRule& rule, std::span<const std::string> classes);

std::string evaluation_to_json(const RectEvaluation& evaluation,
                               std::span<const std::string> classes);

std::string mining_params_to_json(const MiningParams& params);

/// Missing fields keep their defaults. Throws DataError for malformed input
/// and ConfigurationError for invalid values.
MiningParams mining_params_from_json(std::string_view text);

std::string optimize_result_to_json(const OptimizeResult& result);

}  // namespace epc
