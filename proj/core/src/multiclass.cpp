#include "estkit/multiclass.hpp"

#include <algorithm>

#include "builtins.hpp"
#include "common.hpp"

namespace estkit {

namespace {

const Estimator& base_of(const Estimator& self) {
  const auto& base = self.params().at("estimator");
  if (base.is_none()) throw ParamError(self.kind() + ": estimator must be set");
  return base.as_estimator();
}

void wrapper_validate(const Estimator& self) {
  const Estimator& base = base_of(self);
  base.validate();
  if (!base.capabilities().predictor) {
    throw CapabilityError(self.kind() + ": base estimator " + base.kind() +
                          " is not a predictor");
  }
}

Capabilities wrapper_capabilities(const Estimator& self, bool forward_scores) {
  Capabilities caps;
  caps.predictor = true;
  caps.supervised = true;
  caps.task = Task::classification;
  const auto& base = self.params().at("estimator");
  if (!base.is_none()) {
    const auto b = base.as_estimator().capabilities();
    caps.input = b.input;
    if (forward_scores) {
      caps.decision_function = b.decision_function;
      caps.probabilistic = b.probabilistic;
    }
  }
  return caps;
}

// Single column of a binary estimator's scores for its positive class.
std::vector<double> positive_column(const Matrix& m) { return m.col(m.cols() - 1); }

std::vector<double> binary_targets(std::span<const double> y, double positive) {
  std::vector<double> out(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) out[i] = y[i] == positive ? 1.0 : 0.0;
  return out;
}

// ---------------------------------------------------------------------------
// OneVsOneClassifier

FittedState ovo_fit(const Estimator& self, const Data& X, std::span<const double> y) {
  const Estimator& base = base_of(self);
  const auto classes = detail::unique_sorted(y);
  if (classes.size() < 2) throw FitError("OneVsOneClassifier needs at least 2 classes in y");
  FittedState state;
  state.set_vector("classes_", classes);
  for (std::size_t i = 0; i < classes.size(); ++i) {
    for (std::size_t j = i + 1; j < classes.size(); ++j) {
      std::vector<std::size_t> rows;
      std::vector<double> targets;
      for (std::size_t r = 0; r < y.size(); ++r) {
        if (y[r] == classes[i] || y[r] == classes[j]) {
          rows.push_back(r);
          targets.push_back(y[r] == classes[j] ? 1.0 : 0.0);
        }
      }
      const std::string name = std::to_string(i) + "_" + std::to_string(j);
      Estimator clone = base.clone();
      try {
        clone.fit(take_rows(X, rows), targets);
      } catch (const Error&) {
        detail::rethrow_with_context("pair " + name + ": ");
      }
      state.add_child(name, std::move(clone));
    }
  }
  return state;
}

std::vector<double> ovo_predict(const Estimator& self, const Data& Z) {
  const auto& state = self.state();
  const auto classes = state.vector("classes_");
  const std::size_t K = classes.size();
  const std::size_t n = n_rows(Z);
  std::vector<double> votes(n * K, 0.0), confidence(n * K, 0.0);

  std::size_t pair = 0;
  for (std::size_t i = 0; i < K; ++i) {
    for (std::size_t j = i + 1; j < K; ++j, ++pair) {
      const Estimator& clf = state.child(pair);
      const auto pred = clf.predict(Z);
      for (std::size_t r = 0; r < n; ++r) votes[r * K + (pred[r] == 1.0 ? j : i)] += 1;
      if (clf.capabilities().decision_function) {
        const auto d = positive_column(clf.decision_function(Z));
        for (std::size_t r = 0; r < n; ++r) {
          confidence[r * K + j] += d[r];
          confidence[r * K + i] -= d[r];
        }
      }
    }
  }
  std::vector<double> out(n);
  for (std::size_t r = 0; r < n; ++r) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < K; ++c) {
      const double v = votes[r * K + c], bv = votes[r * K + best];
      if (v > bv || (v == bv && confidence[r * K + c] > confidence[r * K + best])) best = c;
    }
    out[r] = classes[best];
  }
  return out;
}

// ---------------------------------------------------------------------------
// OneVsRestClassifier

FittedState ovr_fit(const Estimator& self, const Data& X, std::span<const double> y) {
  const Estimator& base = base_of(self);
  const auto caps = base.capabilities();
  if (!caps.decision_function && !caps.probabilistic) {
    throw CapabilityError("OneVsRestClassifier: base estimator " + base.kind() +
                          " exposes neither decision_function nor predict_proba");
  }
  const auto classes = detail::unique_sorted(y);
  if (classes.size() < 2) throw FitError("OneVsRestClassifier needs at least 2 classes in y");
  FittedState state;
  state.set_vector("classes_", classes);
  for (std::size_t c = 0; c < classes.size(); ++c) {
    Estimator clone = base.clone();
    try {
      clone.fit(X, binary_targets(y, classes[c]));
    } catch (const Error&) {
      detail::rethrow_with_context("class " + std::to_string(c) + ": ");
    }
    state.add_child(std::to_string(c), std::move(clone));
  }
  return state;
}

// Per-class positive scores, n x K; decision_function when available.
Matrix ovr_scores(const Estimator& self, const Data& Z, bool proba) {
  const auto& children = self.state().children();
  const std::size_t K = children.size();
  const std::size_t n = n_rows(Z);
  std::vector<double> out(n * K);
  for (std::size_t c = 0; c < K; ++c) {
    const Estimator& clf = *children[c].estimator;
    const auto col = positive_column(proba ? clf.predict_proba(Z) : clf.decision_function(Z));
    for (std::size_t r = 0; r < n; ++r) out[r * K + c] = col[r];
  }
  return Matrix(n, K, std::move(out));
}

std::vector<double> ovr_predict(const Estimator& self, const Data& Z) {
  const auto classes = self.state().vector("classes_");
  if (classes.size() == 2) {
    const auto pred = self.state().child(1).predict(Z);
    std::vector<double> out(pred.size());
    for (std::size_t r = 0; r < pred.size(); ++r) out[r] = pred[r] == 1.0 ? classes[1] : classes[0];
    return out;
  }
  const bool use_decision = self.state().child(0).capabilities().decision_function;
  const Matrix s = ovr_scores(self, Z, !use_decision);
  std::vector<double> out(s.rows());
  for (std::size_t r = 0; r < s.rows(); ++r) {
    const auto row = s.row(r);
    out[r] = classes[static_cast<std::size_t>(std::max_element(row.begin(), row.end()) -
                                              row.begin())];
  }
  return out;
}

Matrix ovr_decision(const Estimator& self, const Data& Z) {
  if (self.state().children().size() == 2) return self.state().child(1).decision_function(Z);
  return ovr_scores(self, Z, false);
}

Matrix ovr_proba(const Estimator& self, const Data& Z) {
  if (self.state().children().size() == 2) return self.state().child(1).predict_proba(Z);
  const Matrix s = ovr_scores(self, Z, true);
  const std::size_t K = s.cols();
  std::vector<double> out(s.values().begin(), s.values().end());
  for (std::size_t r = 0; r < s.rows(); ++r) {
    double sum = 0;
    for (std::size_t c = 0; c < K; ++c) sum += out[r * K + c];
    for (std::size_t c = 0; c < K; ++c) {
      out[r * K + c] = sum > 0 ? out[r * K + c] / sum : 1.0 / static_cast<double>(K);
    }
  }
  return Matrix(s.rows(), K, std::move(out));
}

}  // namespace

Estimator one_vs_one(const Estimator& base) {
  return Estimator("OneVsOneClassifier", {{"estimator", base}});
}

Estimator one_vs_rest(const Estimator& base) {
  return Estimator("OneVsRestClassifier", {{"estimator", base}});
}

namespace detail {

void register_multiclass(Registry& registry) {
  {
    KindInfo info;
    info.name = "OneVsOneClassifier";
    info.schema = {{"estimator", ParamType::estimator, nullptr, true}};
    info.dynamic_capabilities = [](const Estimator& e) { return wrapper_capabilities(e, false); };
    info.validate = wrapper_validate;
    info.fit = ovo_fit;
    info.predict = ovo_predict;
    registry.add(std::move(info));
  }
  {
    KindInfo info;
    info.name = "OneVsRestClassifier";
    info.schema = {{"estimator", ParamType::estimator, nullptr, true}};
    info.dynamic_capabilities = [](const Estimator& e) { return wrapper_capabilities(e, true); };
    info.validate = wrapper_validate;
    info.fit = ovr_fit;
    info.predict = ovr_predict;
    info.decision_function = ovr_decision;
    info.predict_proba = ovr_proba;
    registry.add(std::move(info));
  }
}

}  // namespace detail

}  // namespace estkit
