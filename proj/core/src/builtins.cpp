#include "builtins.hpp"

namespace estkit::detail {

void register_builtins(Registry& registry) {
  register_transformers(registry);
  register_predictors(registry);
  register_compose(registry);
  register_multiclass(registry);
}

}  // namespace estkit::detail
