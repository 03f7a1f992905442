#include "estkit/model_selection.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <numeric>
#include <thread>

#include "common.hpp"
#include "estkit/metrics.hpp"
#include "estkit/random.hpp"

namespace estkit {

namespace {

std::vector<Split> folds_to_splits(const std::vector<std::size_t>& fold_of, std::size_t k) {
  std::vector<Split> out(k);
  for (std::size_t i = 0; i < fold_of.size(); ++i) {
    for (std::size_t f = 0; f < k; ++f) {
      (f == fold_of[i] ? out[f].test : out[f].train).push_back(i);
    }
  }
  return out;
}

}  // namespace

std::vector<Split> split(const CvSplitter& cv, std::size_t n, std::span<const double> y) {
  if (cv.scheme == CvScheme::leave_one_out) {
    if (n < 2) throw DataError("leave-one-out needs at least 2 samples, got " + std::to_string(n));
    std::vector<std::size_t> fold_of(n);
    std::iota(fold_of.begin(), fold_of.end(), std::size_t{0});
    return folds_to_splits(fold_of, n);
  }
  const std::size_t k = cv.k;
  if (k < 2) throw ParamError("cross-validation needs k >= 2, got " + std::to_string(k));
  if (k > n) {
    throw DataError("cannot split " + std::to_string(n) + " samples into " + std::to_string(k) +
                    " folds");
  }
  std::vector<std::size_t> fold_of(n);

  if (cv.scheme == CvScheme::kfold) {
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    if (cv.shuffle) Rng(cv.random_seed).shuffle(std::span<std::size_t>(order));
    std::size_t pos = 0;
    for (std::size_t f = 0; f < k; ++f) {
      const std::size_t size = n / k + (f < n % k ? 1 : 0);
      for (std::size_t s = 0; s < size; ++s) fold_of[order[pos++]] = f;
    }
    return folds_to_splits(fold_of, k);
  }

  if (y.size() != n) throw DataError("stratified k-fold needs one label per sample");
  const auto classes = detail::unique_sorted(y);
  std::vector<std::vector<std::size_t>> members(classes.size());
  for (std::size_t i = 0; i < n; ++i) members[detail::class_index(classes, y[i])].push_back(i);
  Rng rng(cv.random_seed);
  std::size_t counter = 0;
  for (std::size_t c = 0; c < classes.size(); ++c) {
    if (members[c].size() < k) {
      throw DataError("stratified k-fold: class " + ParamValue(classes[c]).to_string() +
                      " has " + std::to_string(members[c].size()) + " samples, fewer than k=" +
                      std::to_string(k));
    }
    if (cv.shuffle) rng.shuffle(std::span<std::size_t>(members[c]));
    for (std::size_t i : members[c]) fold_of[i] = counter++ % k;
  }
  return folds_to_splits(fold_of, k);
}

// ---------------------------------------------------------------------------

namespace {

constexpr std::string_view scorer_names[] = {
    "accuracy", "f1", "precision", "recall", "roc_auc", "r2", "neg_mean_squared_error",
    "estimator_default"};

// Positive-class scores for roc_auc: the decision function, else the
// probability of the last class.
std::vector<double> ranking_scores(const Estimator& e, const Data& X) {
  const auto caps = e.capabilities();
  Matrix s;
  if (caps.decision_function) {
    s = e.decision_function(X);
  } else if (caps.probabilistic) {
    s = e.predict_proba(X);
  } else {
    throw CapabilityError("roc_auc scoring needs decision_function or predict_proba; " +
                          e.kind() + " has neither");
  }
  if (s.cols() > 2 || (s.cols() == 2 && caps.decision_function)) {
    throw DataError("roc_auc scoring supports binary problems only");
  }
  return s.col(s.cols() - 1);
}

}  // namespace

Scorer::Scorer(std::string name) : name_(std::move(name)) {
  if (std::find(std::begin(scorer_names), std::end(scorer_names), name_) ==
      std::end(scorer_names)) {
    std::string known;
    for (auto n : scorer_names) known += (known.empty() ? "" : ", ") + std::string(n);
    throw ParamError("unknown scorer '" + name_ + "'; expected one of " + known);
  }
}

double score_metric(std::string_view scorer, std::span<const double> y_true,
                    std::span<const double> y) {
  if (scorer == "accuracy") return metrics::accuracy(y_true, y);
  if (scorer == "f1") return metrics::f1(y_true, y);
  if (scorer == "precision") return metrics::precision(y_true, y);
  if (scorer == "recall") return metrics::recall(y_true, y);
  if (scorer == "roc_auc") return metrics::roc_auc(y_true, y);
  if (scorer == "r2") return metrics::r2(y_true, y);
  if (scorer == "neg_mean_squared_error") return -metrics::mean_squared_error(y_true, y);
  throw ParamError("score_metric: '" + std::string(scorer) + "' is not a metric scorer");
}

double Scorer::operator()(const Estimator& fitted, const Data& X,
                          std::span<const double> y) const {
  if (name_ == "estimator_default") return fitted.score(X, y);
  if (name_ == "roc_auc") return score_metric(name_, y, ranking_scores(fitted, X));
  return score_metric(name_, y, fitted.predict(X));
}

// ---------------------------------------------------------------------------

std::vector<ParamMap> expand_grid(const ParamGrid& grid) {
  if (grid.empty()) throw ParamError("parameter grid is empty");
  std::vector<ParamMap> out;
  const auto append_unique = [&](ParamMap candidate) {
    if (std::find(out.begin(), out.end(), candidate) == out.end()) {
      out.push_back(std::move(candidate));
    }
  };
  for (const auto& sub : grid) {
    for (const auto& [key, values] : sub) {
      if (values.empty()) throw ParamError("parameter grid: '" + key + "' has no values");
    }
    // Odometer over the value lists, last key fastest.
    std::vector<std::size_t> pos(sub.size(), 0);
    bool done = false;
    while (!done) {
      ParamMap candidate;
      for (std::size_t k = 0; k < sub.size(); ++k) candidate.set(sub[k].first, sub[k].second[pos[k]]);
      append_unique(std::move(candidate));
      done = true;
      for (std::size_t k = sub.size(); k-- > 0;) {
        if (++pos[k] < sub[k].second.size()) {
          done = false;
          break;
        }
        pos[k] = 0;
      }
    }
  }
  return out;
}

std::vector<ParamMap> sample_params(const ParamDistributions& dists, std::size_t n_iter,
                                    std::uint64_t seed) {
  if (n_iter == 0) throw ParamError("randomized search needs n_iter >= 1");
  using T = Distribution::Type;
  for (const auto& [key, d] : dists) {
    if (d.type == T::choice) {
      if (d.choices.empty()) throw ParamError("distribution for '" + key + "' has no choices");
      continue;
    }
    if (!(d.low < d.high) || !std::isfinite(d.low) || !std::isfinite(d.high)) {
      throw ParamError("distribution for '" + key + "' needs finite low < high");
    }
    if (d.type == T::log_uniform && !(d.low > 0)) {
      throw ParamError("log_uniform distribution for '" + key + "' needs low > 0");
    }
    if (d.type == T::integer_uniform &&
        (d.low != std::floor(d.low) || d.high != std::floor(d.high))) {
      throw ParamError("integer_uniform distribution for '" + key + "' needs integer bounds");
    }
  }
  Rng rng(seed);
  std::vector<ParamMap> out;
  out.reserve(n_iter);
  for (std::size_t i = 0; i < n_iter; ++i) {
    ParamMap candidate;
    for (const auto& [key, d] : dists) {
      switch (d.type) {
        case T::choice:
          candidate.set(key, d.choices[rng.index(d.choices.size())]);
          break;
        case T::uniform:
          candidate.set(key, d.low + (d.high - d.low) * rng.uniform());
          break;
        case T::log_uniform: {
          const double a = std::log(d.low), b = std::log(d.high);
          candidate.set(key, std::exp(a + (b - a) * rng.uniform()));
          break;
        }
        case T::integer_uniform: {
          const auto span = static_cast<std::uint64_t>(d.high - d.low);
          candidate.set(key, static_cast<std::int64_t>(d.low) +
                                 static_cast<std::int64_t>(rng.index(span)));
          break;
        }
      }
    }
    out.push_back(std::move(candidate));
  }
  return out;
}

// ---------------------------------------------------------------------------

const Estimator& SearchResult::best_estimator() const {
  if (!best_estimator_) {
    throw NotFittedError("search ran with refit=false; no best estimator to delegate to");
  }
  return *best_estimator_;
}

std::vector<double> SearchResult::predict(const Data& X) const {
  return best_estimator().predict(X);
}
Matrix SearchResult::predict_proba(const Data& X) const {
  return best_estimator().predict_proba(X);
}
Matrix SearchResult::decision_function(const Data& X) const {
  return best_estimator().decision_function(X);
}
Data SearchResult::transform(const Data& X) const { return best_estimator().transform(X); }
double SearchResult::score(const Data& X, std::span<const double> y) const {
  return best_estimator().score(X, y);
}

bool SearchResult::operator==(const SearchResult& o) const {
  if (candidates != o.candidates || fold_scores != o.fold_scores ||
      mean_scores != o.mean_scores || best_index_ != o.best_index_ ||
      best_params_ != o.best_params_ || best_score_ != o.best_score_ ||
      best_estimator_.has_value() != o.best_estimator_.has_value()) {
    return false;
  }
  if (!best_estimator_) return true;
  return best_estimator_->same_config(*o.best_estimator_) &&
         best_estimator_->state() == o.best_estimator_->state();
}

SearchResult evaluate_candidates(const Estimator& base, std::vector<ParamMap> candidates,
                                 const Data& X, std::span<const double> y,
                                 const SearchOptions& options) {
  if (candidates.empty()) throw ParamError("search has no candidates");
  const auto splits = split(options.cv, n_rows(X), y);
  const std::size_t n_folds = splits.size();
  const std::size_t n_tasks = candidates.size() * n_folds;

  // Configure every candidate up front so path errors surface before any fit.
  std::vector<Estimator> configured;
  configured.reserve(candidates.size());
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    try {
      configured.push_back(base.set_params(candidates[c]));
    } catch (const Error&) {
      detail::rethrow_with_context("candidate " + std::to_string(c) + " " +
                                   candidates[c].to_string() + ": ");
    }
  }

  SearchResult result;
  result.fold_scores.assign(candidates.size(), std::vector<double>(n_folds, 0.0));
  std::vector<std::exception_ptr> errors(n_tasks);

  const auto run = [&](std::size_t task) {
    const std::size_t c = task / n_folds;
    const std::size_t f = task % n_folds;
    try {
      try {
        const auto& s = splits[f];
        const std::vector<double> y_train = y.empty() ? std::vector<double>{} : take(y, s.train);
        const std::vector<double> y_test = y.empty() ? std::vector<double>{} : take(y, s.test);
        Estimator model = configured[c].clone();
        model.fit(take_rows(X, s.train), y_train);
        result.fold_scores[c][f] = options.scoring(model, take_rows(X, s.test), y_test);
      } catch (const Error&) {
        detail::rethrow_with_context("candidate " + std::to_string(c) + " " +
                                     candidates[c].to_string() + ", fold " + std::to_string(f) +
                                     ": ");
      }
    } catch (...) {
      errors[task] = std::current_exception();
    }
  };

  const std::size_t workers = std::min(std::max<std::size_t>(options.n_jobs, 1), n_tasks);
  if (workers == 1) {
    for (std::size_t t = 0; t < n_tasks; ++t) {
      run(t);
      if (errors[t]) break;
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t t = next++; t < n_tasks && !failed; t = next++) {
          run(t);
          if (errors[t]) failed = true;
        }
      });
    }
    for (auto& th : pool) th.join();
  }
  // Report the earliest failing (candidate, fold) regardless of timing.
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }

  result.mean_scores.resize(candidates.size());
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    double sum = 0;
    for (double s : result.fold_scores[c]) sum += s;
    result.mean_scores[c] = sum / static_cast<double>(n_folds);
    if (c == 0 || result.mean_scores[c] > result.mean_scores[result.best_index_]) {
      result.best_index_ = c;
    }
  }
  result.best_score_ = result.mean_scores[result.best_index_];
  result.best_params_ = candidates[result.best_index_];
  result.candidates = std::move(candidates);

  if (options.refit) {
    Estimator best = configured[result.best_index_].clone();
    try {
      best.fit(X, y);
    } catch (const Error&) {
      detail::rethrow_with_context("refit of candidate " + std::to_string(result.best_index_) +
                                   ": ");
    }
    result.best_estimator_ = std::move(best);
  }
  return result;
}

SearchResult grid_search(const Estimator& base, const ParamGrid& grid, const Data& X,
                         std::span<const double> y, const SearchOptions& options) {
  return evaluate_candidates(base, expand_grid(grid), X, y, options);
}

SearchResult randomized_search(const Estimator& base, const ParamDistributions& dists,
                               std::size_t n_iter, std::uint64_t seed, const Data& X,
                               std::span<const double> y, const SearchOptions& options) {
  return evaluate_candidates(base, sample_params(dists, n_iter, seed), X, y, options);
}

}  // namespace estkit
