#pragma once

#include "estkit/registry.hpp"

namespace estkit::detail {

void register_builtins(Registry& registry);

void register_transformers(Registry& registry);
void register_predictors(Registry& registry);
void register_compose(Registry& registry);
void register_multiclass(Registry& registry);

}  // namespace estkit::detail
