#pragma once

#include "estkit/estimator.hpp"

// Registered composite kinds:
//
//   Pipeline      steps=[(name, estimator), ...]; every step but the last
//                 must be a transformer. Methods are those of the last step.
//   FeatureUnion  transformer_list=[(name, transformer), ...]; outputs are
//                 concatenated column-wise in list order.
//
// Fitted children are stored under the step or member name. Nested
// parameters are addressed as "<name>__<param>".

namespace estkit {

Estimator make_pipeline(EstimatorList steps);
Estimator make_union(EstimatorList transformers);

}  // namespace estkit
