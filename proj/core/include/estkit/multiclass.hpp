#pragma once

#include "estkit/estimator.hpp"

// Registered multiclass wrappers around a binary predictor `estimator`:
//
//   OneVsOneClassifier   one clone per class pair (i < j), trained on the
//                        samples of that pair with labels i -> 0, j -> 1.
//                        Predicts by vote; ties go to the larger summed
//                        decision_function confidence when the base has one,
//                        then to the lower label.
//                        fitted: classes_, children "i_j"
//   OneVsRestClassifier  one clone per class c trained on y == c vs rest.
//                        With two classes only the clone for classes_[1] is
//                        consulted, so results equal the base estimator.
//                        fitted: classes_, children "c"

namespace estkit {

Estimator one_vs_one(const Estimator& base);
Estimator one_vs_rest(const Estimator& base);

}  // namespace estkit
