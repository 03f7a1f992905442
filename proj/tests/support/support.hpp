#pragma once

#include <cstdint>
#include <mutex>
#include <set>
#include <string>
#include <vector>

#include "estkit/estkit.hpp"

namespace estkit::testing {

Matrix random_matrix(Rng& rng, std::size_t rows, std::size_t cols, double low = -1.0,
                     double high = 1.0);

struct Labeled {
  Matrix X;
  std::vector<double> y;
};

// Gaussian-ish blobs (sum of uniforms) around the given centers, labels
// 0..K-1, samples interleaved by class.
Labeled blobs(Rng& rng, std::size_t per_class, const std::vector<std::vector<double>>& centers,
              double spread);

// Labels 0..K-1 with every class present at least `min_count` times, shuffled.
std::vector<double> random_labels(Rng& rng, std::size_t n, std::size_t classes,
                                  std::size_t min_count = 1);

Documents random_documents(Rng& rng, std::size_t n, std::size_t vocabulary);

// Test-only kinds, registered once:
//
//   RowRecorder    supervised classifier; fit records column 0 of every row
//                  it receives (tests put the row id there) and predicts
//                  the majority training label.
//   MeanRegressor  regressor predicting the training mean of y.
//   Cyclic         binary classifier for one-vs-one vote cycles. Column 0
//                  of X holds the original class label; a fitted clone
//                  predicts the larger of the two labels it saw, except for
//                  the pair (10, 30), where it predicts the smaller.
//   CyclicScored   Cyclic plus a decision_function of +1 for the larger
//                  label and -0.5 for the (10, 30) pair.
void register_test_kinds();

// Row ids received by each RowRecorder fit since the last reset.
class RowLog {
 public:
  static RowLog& instance();
  void reset();
  void record(std::span<const double> ids);
  std::vector<std::set<double>> fits() const;
  std::set<double> seen() const;  // union over fits

 private:
  mutable std::mutex mutex_;
  std::vector<std::set<double>> fits_;
};

// A random but valid (estimator, data) pair for a registered kind.
struct Case {
  Estimator estimator;
  Data X;
  std::vector<double> y;  // empty for unsupervised cases
  std::string description;
};

// Throws std::logic_error for kinds without a generator.
Case random_case(const std::string& kind, Rng& rng);

// Row-selected copy of a case's data for held-out evaluation.
Data fresh_rows(const Case& c, Rng& rng);

// Exact equality of two Data values.
bool same_data(const Data& a, const Data& b);

}  // namespace estkit::testing
