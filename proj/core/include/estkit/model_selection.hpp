#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "estkit/estimator.hpp"

namespace estkit {

// ---------------------------------------------------------------------------
// Cross-validation

enum class CvScheme { kfold, stratified_kfold, leave_one_out };

struct CvSplitter {
  CvScheme scheme = CvScheme::kfold;
  std::size_t k = 5;
  bool shuffle = false;
  std::uint64_t random_seed = 0;

  static CvSplitter kfold(std::size_t k, bool shuffle = false, std::uint64_t seed = 0) {
    return {CvScheme::kfold, k, shuffle, seed};
  }
  static CvSplitter stratified(std::size_t k, bool shuffle = false, std::uint64_t seed = 0) {
    return {CvScheme::stratified_kfold, k, shuffle, seed};
  }
  static CvSplitter leave_one_out() { return {CvScheme::leave_one_out, 0, false, 0}; }
};

struct Split {
  std::vector<std::size_t> train;  // ascending
  std::vector<std::size_t> test;   // ascending
};

// kfold: the first n % k folds hold ceil(n/k) test indices, the rest
// floor(n/k); contiguous unless shuffled. stratified_kfold: indices of each
// class (sorted label order, original index order) are dealt round-robin to
// the folds with one counter running across classes. leave_one_out: test
// set {i} for every i.
std::vector<Split> split(const CvSplitter& cv, std::size_t n_samples,
                         std::span<const double> y = {});

// ---------------------------------------------------------------------------
// Scoring

// accuracy, f1, precision, recall, roc_auc, r2, neg_mean_squared_error, or
// estimator_default (the estimator's own score). Greater is better.
class Scorer {
 public:
  Scorer() : name_("estimator_default") {}
  // Throws ParamError for unknown names.
  explicit Scorer(std::string name);

  const std::string& name() const { return name_; }
  double operator()(const Estimator& fitted, const Data& X, std::span<const double> y) const;

  bool operator==(const Scorer&) const = default;

 private:
  std::string name_;
};

// The metric behind a scorer name applied to labels (or, for roc_auc, scores).
double score_metric(std::string_view scorer, std::span<const double> y_true,
                    std::span<const double> y_pred_or_scores);

// ---------------------------------------------------------------------------
// Search spaces

// Parameter path -> candidate values, in declaration order.
using SubGrid = std::vector<std::pair<std::string, ParamValue::List>>;
using ParamGrid = std::vector<SubGrid>;

// Cartesian product of each sub-grid (last key fastest), sub-grids
// concatenated, exact duplicates dropped keeping the first.
std::vector<ParamMap> expand_grid(const ParamGrid& grid);

struct Distribution {
  enum class Type { choice, uniform, log_uniform, integer_uniform };
  Type type = Type::choice;
  ParamValue::List choices;
  double low = 0;
  double high = 1;

  static Distribution choice(ParamValue::List values) {
    return {Type::choice, std::move(values), 0, 0};
  }
  // [low, high)
  static Distribution uniform(double low, double high) { return {Type::uniform, {}, low, high}; }
  // exp(U(ln low, ln high)); low > 0
  static Distribution log_uniform(double low, double high) {
    return {Type::log_uniform, {}, low, high};
  }
  // Integers in [low, high)
  static Distribution integer_uniform(std::int64_t low, std::int64_t high) {
    return {Type::integer_uniform, {}, static_cast<double>(low), static_cast<double>(high)};
  }
};

using ParamDistributions = std::vector<std::pair<std::string, Distribution>>;

// n_iter independent draws; every parameter drawn in declaration order from
// one generator seeded with `seed`.
std::vector<ParamMap> sample_params(const ParamDistributions& dists, std::size_t n_iter,
                                    std::uint64_t seed);

// ---------------------------------------------------------------------------
// Search

struct SearchOptions {
  CvSplitter cv;
  Scorer scoring;
  bool refit = true;
  // Worker threads for candidate x fold evaluations. Results do not depend
  // on it.
  std::size_t n_jobs = 1;
};

class SearchResult {
 public:
  std::vector<ParamMap> candidates;
  std::vector<std::vector<double>> fold_scores;  // candidate x fold
  std::vector<double> mean_scores;
  std::size_t best_index_ = 0;
  ParamMap best_params_;
  double best_score_ = 0;
  std::optional<Estimator> best_estimator_;  // set when refit

  // Forwarded to best_estimator_; NotFittedError without refit.
  const Estimator& best_estimator() const;
  std::vector<double> predict(const Data& X) const;
  Matrix predict_proba(const Data& X) const;
  Matrix decision_function(const Data& X) const;
  Data transform(const Data& X) const;
  double score(const Data& X, std::span<const double> y = {}) const;

  bool operator==(const SearchResult& other) const;
};

// Scores every candidate on every fold: clone, set the candidate's
// parameters, fit on the training rows, score on the test rows. A failing
// fit aborts with an error naming the candidate and fold.
SearchResult evaluate_candidates(const Estimator& base, std::vector<ParamMap> candidates,
                                 const Data& X, std::span<const double> y,
                                 const SearchOptions& options = {});

SearchResult grid_search(const Estimator& base, const ParamGrid& grid, const Data& X,
                         std::span<const double> y, const SearchOptions& options = {});

SearchResult randomized_search(const Estimator& base, const ParamDistributions& dists,
                               std::size_t n_iter, std::uint64_t seed, const Data& X,
                               std::span<const double> y, const SearchOptions& options = {});

}  // namespace estkit
