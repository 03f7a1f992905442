#include "estkit/compose.hpp"

#include "builtins.hpp"
#include "common.hpp"

namespace estkit {

namespace {

const EstimatorList& steps_of(const Estimator& self) {
  return self.params().at("steps").as_estimator_list();
}

const EstimatorList& members_of(const Estimator& self) {
  return self.params().at("transformer_list").as_estimator_list();
}

std::string step_context(const std::string& name) { return "step '" + name + "': "; }

// ---------------------------------------------------------------------------
// Pipeline

void pipeline_validate(const Estimator& self) {
  const auto& steps = steps_of(self);
  if (steps.empty()) throw ParamError("Pipeline: steps must not be empty");
  for (std::size_t i = 0; i < steps.size(); ++i) {
    try {
      steps[i].estimator->validate();
    } catch (const Error&) {
      detail::rethrow_with_context(step_context(steps[i].name));
    }
    if (i + 1 < steps.size() && !steps[i].estimator->capabilities().transformer) {
      throw CapabilityError("Pipeline: step '" + steps[i].name + "' (" +
                            steps[i].estimator->kind() +
                            ") is not a transformer; only the last step may be a "
                            "non-transformer");
    }
  }
}

Capabilities pipeline_capabilities(const Estimator& self) {
  const auto& steps = steps_of(self);
  if (steps.empty()) return {};
  Capabilities caps = steps.back().estimator->capabilities();
  caps.input = steps.front().estimator->capabilities().input;
  for (const auto& step : steps) caps.supervised |= step.estimator->capabilities().supervised;
  return caps;
}

// Fits every step; the last one through fit_transform when `transform_last`.
std::pair<FittedState, Data> pipeline_fit_impl(const Estimator& self, const Data& X,
                                               std::span<const double> y,
                                               bool transform_last) {
  const auto& steps = steps_of(self);
  FittedState state;
  Data current = X;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    Estimator step = steps[i].estimator->clone();
    try {
      if (i + 1 < steps.size() || transform_last) {
        current = step.fit_transform(current, y);
      } else {
        step.fit(current, y);
      }
    } catch (const Error&) {
      detail::rethrow_with_context(step_context(steps[i].name));
    }
    state.add_child(steps[i].name, std::move(step));
  }
  return {std::move(state), std::move(current)};
}

FittedState pipeline_fit(const Estimator& self, const Data& X, std::span<const double> y) {
  return pipeline_fit_impl(self, X, y, false).first;
}

std::pair<FittedState, Data> pipeline_fit_transform(const Estimator& self, const Data& X,
                                                    std::span<const double> y) {
  return pipeline_fit_impl(self, X, y, true);
}

// Z pushed through every fitted step but the last.
Data pipeline_prefix(const Estimator& self, const Data& Z) {
  const auto& children = self.state().children();
  Data current = Z;
  for (std::size_t i = 0; i + 1 < children.size(); ++i) {
    try {
      current = children[i].estimator->transform(current);
    } catch (const Error&) {
      detail::rethrow_with_context(step_context(children[i].name));
    }
  }
  return current;
}

const Estimator& last_step(const Estimator& self) {
  return *self.state().children().back().estimator;
}

// ---------------------------------------------------------------------------
// FeatureUnion

void union_validate(const Estimator& self) {
  const auto& members = members_of(self);
  if (members.empty()) throw ParamError("FeatureUnion: transformer_list must not be empty");
  for (const auto& m : members) {
    try {
      m.estimator->validate();
    } catch (const Error&) {
      detail::rethrow_with_context("member '" + m.name + "': ");
    }
    if (!m.estimator->capabilities().transformer) {
      throw CapabilityError("FeatureUnion: member '" + m.name + "' (" + m.estimator->kind() +
                            ") is not a transformer");
    }
  }
}

Capabilities union_capabilities(const Estimator& self) {
  Capabilities caps;
  caps.transformer = true;
  const auto& members = members_of(self);
  if (!members.empty()) caps.input = members.front().estimator->capabilities().input;
  for (const auto& m : members) caps.supervised |= m.estimator->capabilities().supervised;
  return caps;
}

std::pair<FittedState, Data> union_fit_impl(const Estimator& self, const Data& X,
                                            std::span<const double> y, bool want_output) {
  FittedState state;
  std::vector<Data> blocks;
  for (const auto& m : members_of(self)) {
    Estimator member = m.estimator->clone();
    try {
      if (want_output) {
        blocks.push_back(member.fit_transform(X, y));
      } else {
        member.fit(X, y);
      }
    } catch (const Error&) {
      detail::rethrow_with_context("member '" + m.name + "': ");
    }
    state.add_child(m.name, std::move(member));
  }
  Data out = want_output ? hstack(blocks) : Data{};
  return {std::move(state), std::move(out)};
}

Data union_transform(const Estimator& self, const Data& Z) {
  std::vector<Data> blocks;
  for (const auto& child : self.state().children()) {
    try {
      blocks.push_back(child.estimator->transform(Z));
    } catch (const Error&) {
      detail::rethrow_with_context("member '" + child.name + "': ");
    }
  }
  return hstack(blocks);
}

}  // namespace

Estimator make_pipeline(EstimatorList steps) {
  return Estimator("Pipeline", {{"steps", std::move(steps)}});
}

Estimator make_union(EstimatorList transformers) {
  return Estimator("FeatureUnion", {{"transformer_list", std::move(transformers)}});
}

namespace detail {

void register_compose(Registry& registry) {
  {
    KindInfo info;
    info.name = "Pipeline";
    info.schema = {{"steps", ParamType::estimator_list, EstimatorList{}}};
    info.dynamic_capabilities = pipeline_capabilities;
    info.validate = pipeline_validate;
    info.fit = pipeline_fit;
    info.fit_transform = pipeline_fit_transform;
    info.predict = [](const Estimator& self, const Data& Z) {
      return last_step(self).predict(pipeline_prefix(self, Z));
    };
    info.decision_function = [](const Estimator& self, const Data& Z) {
      return last_step(self).decision_function(pipeline_prefix(self, Z));
    };
    info.predict_proba = [](const Estimator& self, const Data& Z) {
      return last_step(self).predict_proba(pipeline_prefix(self, Z));
    };
    info.transform = [](const Estimator& self, const Data& Z) {
      return last_step(self).transform(pipeline_prefix(self, Z));
    };
    info.score = [](const Estimator& self, const Data& Z, std::span<const double> y) {
      return last_step(self).score(pipeline_prefix(self, Z), y);
    };
    registry.add(std::move(info));
  }
  {
    KindInfo info;
    info.name = "FeatureUnion";
    info.schema = {{"transformer_list", ParamType::estimator_list, EstimatorList{}}};
    info.dynamic_capabilities = union_capabilities;
    info.validate = union_validate;
    info.fit = [](const Estimator& self, const Data& X, std::span<const double> y) {
      return union_fit_impl(self, X, y, false).first;
    };
    info.fit_transform = [](const Estimator& self, const Data& X, std::span<const double> y) {
      return union_fit_impl(self, X, y, true);
    };
    info.transform = union_transform;
    registry.add(std::move(info));
  }
}

}  // namespace detail

}  // namespace estkit
