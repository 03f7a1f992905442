#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "estkit/matrix.hpp"
#include "estkit/param.hpp"

namespace estkit {

enum class Task { none, classification, regression, clustering };

enum class InputKind { matrix, documents };

// What an estimator can do. Constant per kind for basic estimators; computed
// from the children for composites.
struct Capabilities {
  bool predictor = false;
  bool transformer = false;
  bool probabilistic = false;      // predict_proba
  bool decision_function = false;
  bool supervised = false;         // fit requires y
  Task task = Task::none;          // selects the default score
  InputKind input = InputKind::matrix;

  bool operator==(const Capabilities&) const = default;
};

// N-d array of doubles with an explicit shape.
struct Array {
  std::vector<std::size_t> shape;
  std::vector<double> values;

  bool operator==(const Array&) const = default;
};

// Learned attributes of a fitted estimator. Array attribute names end with
// '_'; composites additionally hold fitted children.
class FittedState {
 public:
  void set(std::string name, Array array);
  void set_matrix(std::string name, const Matrix& m);
  void set_vector(std::string name, std::vector<double> v);
  void set_scalar(std::string name, double v);

  bool contains(std::string_view name) const;
  const Array& array(std::string_view name) const;
  Matrix matrix(std::string_view name) const;
  std::vector<double> vector(std::string_view name) const;
  double scalar(std::string_view name) const;
  const std::vector<std::pair<std::string, Array>>& arrays() const { return arrays_; }

  void add_child(std::string name, Estimator fitted);
  void add_child(NamedEstimator child);
  const EstimatorList& children() const { return children_; }
  const Estimator& child(std::string_view name) const;
  const Estimator& child(std::size_t i) const;

  bool operator==(const FittedState& other) const;

 private:
  std::vector<std::pair<std::string, Array>> arrays_;
  EstimatorList children_;
};

struct KindInfo;

// Uniform handle over any registered estimator kind: a kind name, its
// hyper-parameters, and the fitted state once fit succeeded. Copies share
// the (immutable) fitted state.
class Estimator {
 public:
  // Defaults overridden by `overrides`. Touches no data; throws ParamError on
  // unknown kind, unknown parameter or type mismatch.
  explicit Estimator(std::string_view kind, const ParamMap& overrides = {});

  const std::string& kind() const;
  const KindInfo& info() const { return *info_; }
  Capabilities capabilities() const;

  const ParamMap& params() const { return params_; }
  // deep=true adds "<child>__<param>" entries for nested estimators.
  ParamMap get_params(bool deep = false) const;
  // New unfitted handle with the updates applied; composite "a__b" keys
  // address nested estimators. This handle is left unchanged.
  Estimator set_params(const ParamMap& updates) const;
  // Fresh unfitted handle with equal parameters.
  Estimator clone() const;
  // Domain checks on hyper-parameter values (fit runs these too).
  void validate() const;

  // Learns from X (and y for supervised kinds), replacing any earlier fitted
  // state, and returns *this.
  Estimator& fit(const Data& X, std::span<const double> y = {});
  Data fit_transform(const Data& X, std::span<const double> y = {});
  std::vector<double> fit_predict(const Data& X, std::span<const double> y = {});

  bool is_fitted() const { return state_ != nullptr; }
  const FittedState& state() const;

  std::vector<double> predict(const Data& X) const;
  Matrix decision_function(const Data& X) const;
  Matrix predict_proba(const Data& X) const;
  Data transform(const Data& X) const;
  // Higher is better: accuracy for classifiers, R^2 for regressors,
  // kind-specific otherwise.
  double score(const Data& X, std::span<const double> y = {}) const;

  // Kind and parameters equal; fitted state is ignored.
  bool same_config(const Estimator& other) const;

  // Rebuilds a fitted handle from stored parameters and state without
  // running any learning code.
  static Estimator restore(std::string_view kind, const ParamMap& params, FittedState state);

 private:
  void check_input(const Data& X, bool fitting) const;
  void require_fitted(std::string_view method) const;

  const KindInfo* info_;
  ParamMap params_;
  std::shared_ptr<const FittedState> state_;
};

// Shorthand for Estimator(kind, params).
inline Estimator make(std::string_view kind, const ParamMap& params = {}) {
  return Estimator(kind, params);
}

inline NamedEstimator::NamedEstimator(std::string n, const Estimator& e)
    : name(std::move(n)), estimator(std::make_shared<const Estimator>(e)) {}

// Implementation hooks of an estimator kind. Only `fit` is mandatory; the
// presence of the other hooks must agree with the declared capabilities.
struct KindInfo {
  using FitFn = std::function<FittedState(const Estimator&, const Data&, std::span<const double>)>;
  using FitTransformFn = std::function<std::pair<FittedState, Data>(
      const Estimator&, const Data&, std::span<const double>)>;
  using PredictFn = std::function<std::vector<double>(const Estimator&, const Data&)>;
  using MatrixFn = std::function<Matrix(const Estimator&, const Data&)>;
  using TransformFn = std::function<Data(const Estimator&, const Data&)>;
  using ScoreFn = std::function<double(const Estimator&, const Data&, std::span<const double>)>;
  using CapsFn = std::function<Capabilities(const Estimator&)>;
  using ValidateFn = std::function<void(const Estimator&)>;

  std::string name;
  std::vector<ParamSpec> schema;
  Capabilities capabilities;
  CapsFn dynamic_capabilities;  // composites only
  ValidateFn validate;
  FitFn fit;
  FitTransformFn fit_transform;  // optional shortcut; must equal fit then transform
  PredictFn predict;
  MatrixFn decision_function;
  MatrixFn predict_proba;
  TransformFn transform;
  ScoreFn score;  // overrides the task-based default

  const ParamSpec* param(std::string_view name) const;
};

}  // namespace estkit
