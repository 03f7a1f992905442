#include "estkit_cli/spec.hpp"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <limits>

#include "estkit/errors.hpp"

namespace estkit::cli {

namespace {

void require_object(const json& j, const std::string& what) {
  if (!j.is_object()) throw ParamError(what + " must be a JSON object");
}

void reject_unknown_keys(const json& j, std::initializer_list<std::string_view> known,
                         const std::string& what) {
  for (const auto& [key, _] : j.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      throw ParamError(what + ": unknown key '" + key + "'");
    }
  }
}

bool is_named_estimator(const json& j) {
  return j.is_object() && j.contains("name") && j.contains("estimator");
}

double number(const json& j, const std::string& what) {
  if (!j.is_number()) throw ParamError(what + " must be a number");
  return j.get<double>();
}

std::uint64_t unsigned_integer(const json& j, const std::string& what) {
  if (!j.is_number_unsigned()) throw ParamError(what + " must be a non-negative integer");
  return j.get<std::uint64_t>();
}

CvSplitter parse_cv(const json& j) {
  require_object(j, "search.cv");
  reject_unknown_keys(j, {"scheme", "k", "shuffle", "seed"}, "search.cv");
  CvSplitter cv;
  const std::string scheme = j.value("scheme", std::string("kfold"));
  if (scheme == "kfold") {
    cv.scheme = CvScheme::kfold;
  } else if (scheme == "stratified_kfold") {
    cv.scheme = CvScheme::stratified_kfold;
  } else if (scheme == "leave_one_out") {
    cv.scheme = CvScheme::leave_one_out;
  } else {
    throw ParamError("search.cv.scheme must be kfold, stratified_kfold or leave_one_out, got '" +
                     scheme + "'");
  }
  if (j.contains("k")) cv.k = unsigned_integer(j["k"], "search.cv.k");
  if (j.contains("shuffle")) {
    if (!j["shuffle"].is_boolean()) throw ParamError("search.cv.shuffle must be a boolean");
    cv.shuffle = j["shuffle"].get<bool>();
  }
  if (j.contains("seed")) cv.random_seed = unsigned_integer(j["seed"], "search.cv.seed");
  return cv;
}

SubGrid parse_subgrid(const json& j) {
  require_object(j, "search.param_grid entry");
  SubGrid sub;
  for (const auto& [key, values] : j.items()) {
    if (!values.is_array()) {
      throw ParamError("search.param_grid: values of '" + key + "' must be a list");
    }
    ParamValue::List list;
    for (const auto& v : values) list.push_back(value_from_json(v));
    sub.emplace_back(key, std::move(list));
  }
  return sub;
}

Distribution parse_distribution(const std::string& key, const json& j) {
  const std::string what = "search.param_distributions." + key;
  if (!j.is_object() || j.size() != 1) {
    throw ParamError(what + " must be an object with one of choice, uniform, log_uniform, "
                            "integer_uniform");
  }
  const auto& [type, args] = *j.items().begin();
  if (!args.is_array()) throw ParamError(what + "." + type + " must be a list");
  if (type == "choice") {
    ParamValue::List values;
    for (const auto& v : args) values.push_back(value_from_json(v));
    return Distribution::choice(std::move(values));
  }
  if (args.size() != 2) throw ParamError(what + "." + type + " needs [low, high]");
  if (type == "uniform") return Distribution::uniform(number(args[0], what), number(args[1], what));
  if (type == "log_uniform") {
    return Distribution::log_uniform(number(args[0], what), number(args[1], what));
  }
  if (type == "integer_uniform") {
    if (!args[0].is_number_integer() || !args[1].is_number_integer()) {
      throw ParamError(what + ".integer_uniform bounds must be integers");
    }
    return Distribution::integer_uniform(args[0].get<std::int64_t>(), args[1].get<std::int64_t>());
  }
  throw ParamError(what + ": unknown distribution '" + type + "'");
}

SearchSpec parse_search(const json& j) {
  require_object(j, "search");
  reject_unknown_keys(j,
                      {"type", "param_grid", "param_distributions", "n_iter", "seed", "cv",
                       "scoring", "refit", "n_jobs"},
                      "search");
  SearchSpec s;
  s.type = j.value("type", std::string("grid"));
  if (s.type == "grid") {
    if (!j.contains("param_grid")) throw ParamError("grid search needs search.param_grid");
    const json& g = j["param_grid"];
    if (g.is_array()) {
      for (const auto& sub : g) s.grid.push_back(parse_subgrid(sub));
    } else {
      s.grid.push_back(parse_subgrid(g));
    }
    expand_grid(s.grid);  // surfaces empty value lists before any data is read
  } else if (s.type == "randomized") {
    if (!j.contains("param_distributions")) {
      throw ParamError("randomized search needs search.param_distributions");
    }
    const json& d = j["param_distributions"];
    require_object(d, "search.param_distributions");
    for (const auto& [key, dist] : d.items()) {
      s.distributions.emplace_back(key, parse_distribution(key, dist));
    }
    if (j.contains("n_iter")) s.n_iter = unsigned_integer(j["n_iter"], "search.n_iter");
    if (j.contains("seed")) s.seed = unsigned_integer(j["seed"], "search.seed");
    sample_params(s.distributions, s.n_iter, s.seed);  // validates bounds
  } else {
    throw ParamError("search.type must be grid or randomized, got '" + s.type + "'");
  }
  if (j.contains("cv")) s.options.cv = parse_cv(j["cv"]);
  if (j.contains("scoring")) {
    if (!j["scoring"].is_string()) throw ParamError("search.scoring must be a string");
    s.options.scoring = Scorer(j["scoring"].get<std::string>());
  }
  if (j.contains("refit")) {
    if (!j["refit"].is_boolean()) throw ParamError("search.refit must be a boolean");
    s.options.refit = j["refit"].get<bool>();
  }
  if (j.contains("n_jobs")) s.options.n_jobs = unsigned_integer(j["n_jobs"], "search.n_jobs");
  return s;
}

}  // namespace

ParamValue value_from_json(const json& j) {
  switch (j.type()) {
    case json::value_t::null: return {};
    case json::value_t::boolean: return j.get<bool>();
    case json::value_t::number_integer: return j.get<std::int64_t>();
    case json::value_t::number_unsigned: {
      const auto v = j.get<std::uint64_t>();
      if (v > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max())) throw ParamError("integer out of range");
      return static_cast<std::int64_t>(v);
    }
    case json::value_t::number_float: return j.get<double>();
    case json::value_t::string: return j.get<std::string>();
    case json::value_t::object: return estimator_from_json(j);
    case json::value_t::array: {
      if (!j.empty() && std::all_of(j.begin(), j.end(), is_named_estimator)) {
        EstimatorList list;
        for (const auto& item : j) {
          reject_unknown_keys(item, {"name", "estimator"}, "named estimator");
          if (!item["name"].is_string()) throw ParamError("estimator list names must be strings");
          list.emplace_back(item["name"].get<std::string>(), estimator_from_json(item["estimator"]));
        }
        return list;
      }
      ParamValue::List list;
      for (const auto& item : j) list.push_back(value_from_json(item));
      return list;
    }
    default: break;
  }
  throw ParamError("unsupported JSON value in parameter");
}

Estimator estimator_from_json(const json& j) {
  require_object(j, "estimator");
  reject_unknown_keys(j, {"kind", "params"}, "estimator");
  if (!j.contains("kind") || !j["kind"].is_string()) {
    throw ParamError("estimator needs a string \"kind\"");
  }
  ParamMap params;
  if (j.contains("params")) {
    require_object(j["params"], "params of " + j["kind"].get<std::string>());
    for (const auto& [key, value] : j["params"].items()) params.set(key, value_from_json(value));
  }
  return Estimator(j["kind"].get<std::string>(), params);
}

json value_to_json(const ParamValue& v) {
  switch (v.type()) {
    case ParamType::none: return nullptr;
    case ParamType::boolean: return v.as_bool();
    case ParamType::integer: return v.as_int();
    case ParamType::real: return v.as_real();
    case ParamType::string: return v.as_string();
    case ParamType::list: {
      json out = json::array();
      for (const auto& item : v.as_list()) out.push_back(value_to_json(item));
      return out;
    }
    case ParamType::estimator: {
      const Estimator& e = v.as_estimator();
      return json{{"kind", e.kind()}, {"params", params_to_json(e.params())}};
    }
    case ParamType::estimator_list: {
      json out = json::array();
      for (const auto& m : v.as_estimator_list()) {
        out.push_back(json{{"name", m.name}, {"estimator", value_to_json(*m.estimator)}});
      }
      return out;
    }
  }
  return nullptr;
}

json params_to_json(const ParamMap& params) {
  json out = json::object();
  for (const auto& [key, value] : params) out[key] = value_to_json(value);
  return out;
}

Spec parse_spec(const json& doc) {
  require_object(doc, "spec");
  reject_unknown_keys(doc, {"estimator", "search"}, "spec");
  if (!doc.contains("estimator")) throw ParamError("spec needs an \"estimator\" entry");
  Spec spec{estimator_from_json(doc["estimator"]), std::nullopt};
  spec.estimator.validate();
  if (doc.contains("search")) spec.search = parse_search(doc["search"]);
  return spec;
}

Spec read_spec(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ParamError("cannot open spec file '" + path + "'");
  json doc;
  try {
    doc = json::parse(f);
  } catch (const json::exception& e) {
    throw ParamError("spec file '" + path + "' is not valid JSON: " + e.what());
  }
  return parse_spec(doc);
}

}  // namespace estkit::cli
