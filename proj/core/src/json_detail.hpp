#pragma once

// JSON pieces shared by the serializers; private to the library.

#include <span>
#include <string>

#include "epc/rules.hpp"
#include "json.hpp"

namespace epc::detail {

inline nlohmann::json rect_json(const Rect& r) {
  return {{"xmin", r.xmin}, {"ymin", r.ymin}, {"xmax", r.xmax}, {"ymax", r.ymax}};
}

inline nlohmann::json class_hits_json(std::span<const std::size_t> hits,
                                      std::span<const std::string> classes) {
  nlohmann::json out = nlohmann::json::object();
  for (std::size_t c = 0; c < hits.size() && c < classes.size(); ++c) out[classes[c]] = hits[c];
  return out;
}

inline nlohmann::json stats_json(const RuleStats& s, std::span<const std::string> classes) {
  return {{"class_hits", class_hits_json(s.class_hits, classes)},
          {"hits", s.hits},
          {"precision", s.precision},
          {"coverage_in_class", s.coverage_in_class},
          {"coverage_total", s.coverage_total},
          {"active_cases", s.active_cases},
          {"active_in_class", s.active_in_class}};
}

}  // namespace epc::detail
