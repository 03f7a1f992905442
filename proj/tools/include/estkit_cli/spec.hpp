#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "estkit/estimator.hpp"
#include "estkit/model_selection.hpp"
#include "json.hpp"

// JSON spec files:
//
//   {
//     "estimator": {"kind": "Pipeline", "params": {"steps": [
//         {"name": "scale", "estimator": {"kind": "StandardScaler"}},
//         {"name": "clf", "estimator": {"kind": "SVC", "params": {"C": 10}}}]}},
//     "search": {
//       "type": "grid",
//       "param_grid": [{"clf__C": [1, 10]}, {"clf__kernel": ["linear"]}],
//       "cv": {"scheme": "stratified_kfold", "k": 5, "shuffle": false, "seed": 0},
//       "scoring": "f1",
//       "refit": true
//     }
//   }
//
// Randomized search uses "type": "randomized", "n_iter", "seed" and
// "param_distributions": {"clf__C": {"log_uniform": [0.01, 100]},
// "clf__kernel": {"choice": ["linear", "rbf"]}}; the other distributions are
// "uniform": [a, b] and "integer_uniform": [a, b] (b excluded).
//
// Parameter values map as: null -> none, true/false -> boolean, integer ->
// integer, other numbers -> real, string -> string, {"kind", "params"} ->
// nested estimator, [{"name", "estimator"}, ...] -> estimator list, any
// other array -> list.

namespace estkit::cli {

using json = nlohmann::ordered_json;

struct SearchSpec {
  std::string type = "grid";
  ParamGrid grid;
  ParamDistributions distributions;
  std::size_t n_iter = 10;
  std::uint64_t seed = 0;
  SearchOptions options;
};

struct Spec {
  Estimator estimator;
  std::optional<SearchSpec> search;
};

// Throws ParamError on any structural problem, unknown kind or parameter.
Spec parse_spec(const json& doc);
Spec read_spec(const std::string& path);

Estimator estimator_from_json(const json& j);
ParamValue value_from_json(const json& j);
json value_to_json(const ParamValue& v);
json params_to_json(const ParamMap& params);

}  // namespace estkit::cli
