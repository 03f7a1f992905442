#pragma once

#include "estkit/compose.hpp"
#include "estkit/errors.hpp"
#include "estkit/estimator.hpp"
#include "estkit/io.hpp"
#include "estkit/matrix.hpp"
#include "estkit/metrics.hpp"
#include "estkit/model_selection.hpp"
#include "estkit/multiclass.hpp"
#include "estkit/param.hpp"
#include "estkit/persistence.hpp"
#include "estkit/predictors.hpp"
#include "estkit/random.hpp"
#include "estkit/registry.hpp"
#include "estkit/transformers.hpp"
