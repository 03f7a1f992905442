#include "estkit/metrics.hpp"

#include <algorithm>
#include <numeric>
#include <string>
#include <vector>

#include "estkit/errors.hpp"

namespace estkit::metrics {

namespace {

void check_lengths(std::span<const double> a, std::span<const double> b, const char* metric) {
  if (a.size() != b.size()) {
    throw DataError(std::string(metric) + ": length mismatch (" + std::to_string(a.size()) +
                    " vs " + std::to_string(b.size()) + ")");
  }
  if (a.empty()) throw DataError(std::string(metric) + ": empty input");
}

struct Confusion {
  double tp = 0, fp = 0, fn = 0;
};

Confusion confusion(std::span<const double> y_true, std::span<const double> y_pred,
                    const char* metric) {
  check_lengths(y_true, y_pred, metric);
  Confusion c;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    const bool t = y_true[i] == 1.0;
    const bool p = y_pred[i] == 1.0;
    c.tp += t && p;
    c.fp += !t && p;
    c.fn += t && !p;
  }
  return c;
}

}  // namespace

double accuracy(std::span<const double> y_true, std::span<const double> y_pred) {
  check_lengths(y_true, y_pred, "accuracy");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < y_true.size(); ++i) hits += y_true[i] == y_pred[i];
  return static_cast<double>(hits) / static_cast<double>(y_true.size());
}

double precision(std::span<const double> y_true, std::span<const double> y_pred) {
  const auto c = confusion(y_true, y_pred, "precision");
  return c.tp + c.fp == 0 ? 0.0 : c.tp / (c.tp + c.fp);
}

double recall(std::span<const double> y_true, std::span<const double> y_pred) {
  const auto c = confusion(y_true, y_pred, "recall");
  return c.tp + c.fn == 0 ? 0.0 : c.tp / (c.tp + c.fn);
}

double f1(std::span<const double> y_true, std::span<const double> y_pred) {
  const double p = precision(y_true, y_pred);
  const double r = recall(y_true, y_pred);
  return p + r == 0 ? 0.0 : 2 * p * r / (p + r);
}

double roc_auc(std::span<const double> y_true, std::span<const double> scores) {
  check_lengths(y_true, scores, "roc_auc");
  const std::size_t n = y_true.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Sum of positive ranks with ties sharing their average rank. Ranks are
  // half-integers, so every partial sum is exact.
  double n_pos = 0;
  double pos_rank_sum = 0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double avg_rank = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    for (std::size_t k = i; k < j; ++k) {
      if (y_true[order[k]] == 1.0) {
        n_pos += 1;
        pos_rank_sum += avg_rank;
      }
    }
    i = j;
  }
  const double n_neg = static_cast<double>(n) - n_pos;
  if (n_pos == 0 || n_neg == 0) {
    throw DataError("roc_auc needs both positive and negative samples");
  }
  const double u = pos_rank_sum - n_pos * (n_pos + 1) / 2.0;
  return u / (n_pos * n_neg);
}

double r2(std::span<const double> y_true, std::span<const double> y_pred) {
  check_lengths(y_true, y_pred, "r2");
  const double mean =
      std::accumulate(y_true.begin(), y_true.end(), 0.0) / static_cast<double>(y_true.size());
  double ss_res = 0;
  double ss_tot = 0;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    ss_res += (y_true[i] - y_pred[i]) * (y_true[i] - y_pred[i]);
    ss_tot += (y_true[i] - mean) * (y_true[i] - mean);
  }
  if (ss_tot == 0) {
    if (ss_res == 0) return 0.0;
    throw DataError("r2 is undefined for constant targets with imperfect predictions");
  }
  return 1.0 - ss_res / ss_tot;
}

double mean_squared_error(std::span<const double> y_true, std::span<const double> y_pred) {
  check_lengths(y_true, y_pred, "mean_squared_error");
  double sum = 0;
  for (std::size_t i = 0; i < y_true.size(); ++i) {
    sum += (y_true[i] - y_pred[i]) * (y_true[i] - y_pred[i]);
  }
  return sum / static_cast<double>(y_true.size());
}

}  // namespace estkit::metrics
