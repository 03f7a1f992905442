#pragma once

#include <span>

namespace estkit::metrics {

// All metrics are greater-is-better except mean_squared_error. Length
// mismatches throw DataError.

double accuracy(std::span<const double> y_true, std::span<const double> y_pred);

// Binary metrics with positive label 1. A zero denominator yields 0.
double precision(std::span<const double> y_true, std::span<const double> y_pred);
double recall(std::span<const double> y_true, std::span<const double> y_pred);
double f1(std::span<const double> y_true, std::span<const double> y_pred);

// Area under the ROC curve as the Mann-Whitney statistic over real-valued
// scores: (correctly ordered pairs + ties/2) / (n_pos * n_neg). Labels are
// positive iff equal to 1. Throws DataError unless both classes occur.
double roc_auc(std::span<const double> y_true, std::span<const double> scores);

// 1 - SS_res/SS_tot. Constant y_true: 0 for a perfect fit (SS_res = 0),
// DataError otherwise (the ratio would be infinite).
double r2(std::span<const double> y_true, std::span<const double> y_pred);

double mean_squared_error(std::span<const double> y_true, std::span<const double> y_pred);

}  // namespace estkit::metrics
