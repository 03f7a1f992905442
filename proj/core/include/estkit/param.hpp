#pragma once

#include <concepts>
#include <cstdint>
#include <initializer_list>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace estkit {

class Estimator;

// A named sub-estimator: a pipeline step, a union member, a fitted child.
struct NamedEstimator {
  NamedEstimator(std::string name, const Estimator& estimator);
  NamedEstimator(std::string name, std::shared_ptr<const Estimator> estimator);

  std::string name;
  std::shared_ptr<const Estimator> estimator;

  bool operator==(const NamedEstimator& other) const;
};

using EstimatorList = std::vector<NamedEstimator>;

enum class ParamType { none, boolean, integer, real, string, list, estimator, estimator_list };

std::string_view to_string(ParamType type);

// A hyper-parameter value. Nested estimators are held as unfitted
// prototypes and compare by kind and parameters.
class ParamValue {
 public:
  using List = std::vector<ParamValue>;

  ParamValue() = default;
  ParamValue(std::nullptr_t) {}
  ParamValue(bool v) : value_(v) {}
  template <std::integral T>
    requires(!std::same_as<T, bool>)
  ParamValue(T v) : value_(static_cast<std::int64_t>(v)) {}
  template <std::floating_point T>
  ParamValue(T v) : value_(static_cast<double>(v)) {}
  ParamValue(const char* v) : value_(std::string(v)) {}
  ParamValue(std::string v) : value_(std::move(v)) {}
  ParamValue(std::string_view v) : value_(std::string(v)) {}
  ParamValue(List v) : value_(std::move(v)) {}
  ParamValue(std::initializer_list<ParamValue> v) : value_(List(v)) {}
  // Stores an unfitted clone of the estimator.
  ParamValue(const Estimator& e);
  // Members are stored as unfitted clones.
  ParamValue(EstimatorList v);

  ParamType type() const;
  bool is_none() const { return std::holds_alternative<std::monostate>(value_); }

  // Typed access; throws ParamError on a type mismatch. as_real accepts
  // integers.
  bool as_bool() const;
  std::int64_t as_int() const;
  double as_real() const;
  const std::string& as_string() const;
  const List& as_list() const;
  const Estimator& as_estimator() const;
  const EstimatorList& as_estimator_list() const;

  // Compact human-readable rendering, e.g. `0.001`, `"rbf"`, `[1, 2]`,
  // `LogisticRegression(C=1, ...)`.
  std::string to_string() const;

  bool operator==(const ParamValue& other) const;

 private:
  using Value = std::variant<std::monostate, bool, std::int64_t, double, std::string, List,
                             std::shared_ptr<const Estimator>, EstimatorList>;
  Value value_;
};

// Ordered name -> value map. Iteration order is insertion order.
class ParamMap {
 public:
  using Entry = std::pair<std::string, ParamValue>;

  ParamMap() = default;
  ParamMap(std::initializer_list<Entry> entries);

  bool contains(std::string_view name) const { return find(name) != nullptr; }
  const ParamValue* find(std::string_view name) const;
  // Throws ParamError when absent.
  const ParamValue& at(std::string_view name) const;
  // Replaces in place, or appends when new.
  void set(std::string name, ParamValue value);

  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  auto begin() const { return entries_.begin(); }
  auto end() const { return entries_.end(); }

  // Restriction to the given keys, in this map's order.
  ParamMap subset(const ParamMap& keys) const;

  std::string to_string() const;

  bool operator==(const ParamMap& other) const { return entries_ == other.entries_; }

 private:
  std::vector<Entry> entries_;
};

// Declared hyper-parameter of an estimator kind.
struct ParamSpec {
  std::string name;
  ParamType type;
  ParamValue default_value;
  bool nullable = false;
};

// Checks `value` against `spec`, widening integers to reals where the spec
// asks for a real. Throws ParamError naming the parameter on mismatch.
ParamValue coerce(const ParamSpec& spec, const ParamValue& value, std::string_view kind);

}  // namespace estkit
