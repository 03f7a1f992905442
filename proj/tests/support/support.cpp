#include "support.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

namespace estkit::testing {

Matrix random_matrix(Rng& rng, std::size_t rows, std::size_t cols, double low, double high) {
  std::vector<double> v(rows * cols);
  for (auto& x : v) x = low + (high - low) * rng.uniform();
  return Matrix(rows, cols, std::move(v));
}

Labeled blobs(Rng& rng, std::size_t per_class, const std::vector<std::vector<double>>& centers,
              double spread) {
  const std::size_t p = centers.front().size();
  std::vector<double> values;
  std::vector<double> y;
  for (std::size_t i = 0; i < per_class; ++i) {
    for (std::size_t c = 0; c < centers.size(); ++c) {
      for (std::size_t f = 0; f < p; ++f) {
        const double noise = rng.uniform() + rng.uniform() + rng.uniform() - 1.5;
        values.push_back(centers[c][f] + spread * noise);
      }
      y.push_back(static_cast<double>(c));
    }
  }
  return {Matrix(y.size(), p, std::move(values)), std::move(y)};
}

std::vector<double> random_labels(Rng& rng, std::size_t n, std::size_t classes,
                                  std::size_t min_count) {
  std::vector<double> y;
  for (std::size_t c = 0; c < classes; ++c) {
    for (std::size_t k = 0; k < min_count; ++k) y.push_back(static_cast<double>(c));
  }
  while (y.size() < n) y.push_back(static_cast<double>(rng.index(classes)));
  rng.shuffle(std::span<double>(y));
  return y;
}

Documents random_documents(Rng& rng, std::size_t n, std::size_t vocabulary) {
  std::vector<Document> docs(n);
  for (auto& d : docs) {
    const std::size_t len = rng.index(8);
    for (std::size_t t = 0; t < len; ++t) d.push_back("w" + std::to_string(rng.index(vocabulary)));
  }
  return Documents(std::move(docs));
}

RowLog& RowLog::instance() {
  static RowLog log;
  return log;
}

void RowLog::reset() {
  std::lock_guard lock(mutex_);
  fits_.clear();
}

void RowLog::record(std::span<const double> ids) {
  std::lock_guard lock(mutex_);
  fits_.emplace_back(ids.begin(), ids.end());
}

std::vector<std::set<double>> RowLog::fits() const {
  std::lock_guard lock(mutex_);
  return fits_;
}

std::set<double> RowLog::seen() const {
  std::lock_guard lock(mutex_);
  std::set<double> all;
  for (const auto& f : fits_) all.insert(f.begin(), f.end());
  return all;
}

void register_test_kinds() {
  static std::once_flag once;
  std::call_once(once, [] {
    auto& registry = Registry::global();
    {
      KindInfo info;
      info.name = "RowRecorder";
      info.capabilities.predictor = true;
      info.capabilities.supervised = true;
      info.capabilities.task = Task::classification;
      info.fit = [](const Estimator&, const Data& X, std::span<const double> y) {
        const Matrix m = to_dense(X);
        const auto ids = m.col(0);
        RowLog::instance().record(ids);
        std::map<double, std::size_t> counts;
        for (double v : y) ++counts[v];
        double best = counts.begin()->first;
        for (const auto& [label, count] : counts) {
          if (count > counts[best]) best = label;
        }
        FittedState state;
        state.set_scalar("majority_", best);
        return state;
      };
      info.predict = [](const Estimator& self, const Data& X) {
        return std::vector<double>(n_rows(X), self.state().scalar("majority_"));
      };
      registry.add(std::move(info));
    }
    {
      KindInfo info;
      info.name = "MeanRegressor";
      info.capabilities.predictor = true;
      info.capabilities.supervised = true;
      info.capabilities.task = Task::regression;
      info.fit = [](const Estimator&, const Data&, std::span<const double> y) {
        FittedState state;
        state.set_scalar("mean_", std::accumulate(y.begin(), y.end(), 0.0) /
                                      static_cast<double>(y.size()));
        return state;
      };
      info.predict = [](const Estimator& self, const Data& X) {
        return std::vector<double>(n_rows(X), self.state().scalar("mean_"));
      };
      registry.add(std::move(info));
    }
    for (const bool scored : {false, true}) {
      KindInfo info;
      info.name = scored ? "CyclicScored" : "Cyclic";
      info.capabilities.predictor = true;
      info.capabilities.supervised = true;
      info.capabilities.decision_function = scored;
      info.capabilities.task = Task::classification;
      info.fit = [](const Estimator&, const Data& X, std::span<const double>) {
        const auto col = to_dense(X).col(0);
        FittedState state;
        state.set_scalar("lo_", *std::min_element(col.begin(), col.end()));
        state.set_scalar("hi_", *std::max_element(col.begin(), col.end()));
        return state;
      };
      const auto flipped = [](const Estimator& self) {
        return self.state().scalar("lo_") == 10 && self.state().scalar("hi_") == 30;
      };
      info.predict = [flipped](const Estimator& self, const Data& Z) {
        return std::vector<double>(n_rows(Z), flipped(self) ? 0.0 : 1.0);
      };
      if (scored) {
        info.decision_function = [flipped](const Estimator& self, const Data& Z) {
          return Matrix(n_rows(Z), 1, std::vector<double>(n_rows(Z), flipped(self) ? -0.5 : 1.0));
        };
      }
      registry.add(std::move(info));
    }
  });
}

namespace {

double log_uniform(Rng& rng, double low, double high) {
  return std::exp(std::log(low) + (std::log(high) - std::log(low)) * rng.uniform());
}

bool coin(Rng& rng) { return rng.index(2) == 1; }

std::size_t between(Rng& rng, std::size_t low, std::size_t high) {
  return low + rng.index(high - low + 1);
}

// Dense data with distinct rows, so kernels and covariances are
// non-degenerate.
Matrix features(Rng& rng, std::size_t n, std::size_t p) {
  return random_matrix(rng, n, p, -3.0, 3.0);
}

Estimator random_transformer(Rng& rng, std::size_t p, bool allow_supervised) {
  switch (rng.index(allow_supervised ? 4 : 3)) {
    case 0: return make("StandardScaler", {{"with_mean", coin(rng)}, {"with_std", coin(rng)}});
    // Earlier steps may have reduced the width, so PCA keeps 1 or all.
    case 1: return coin(rng) ? make("PCA") : make("PCA", {{"n_components", 1}});
    case 2: return make("KernelPCA", {{"n_components", static_cast<std::int64_t>(between(rng, 1, 3))},
                                      {"kernel", coin(rng) ? "rbf" : "linear"}});
    default: return make("SelectKBest", {{"k", static_cast<std::int64_t>(between(rng, 1, p))}});
  }
}

Estimator random_binary_predictor(Rng& rng) {
  if (coin(rng)) {
    return make("LogisticRegression", {{"penalty", coin(rng) ? "l1" : "l2"},
                                       {"C", log_uniform(rng, 0.01, 100.0)}});
  }
  return make("SVC", {{"C", log_uniform(rng, 0.1, 100.0)},
                      {"kernel", coin(rng) ? "rbf" : "linear"},
                      {"gamma", log_uniform(rng, 0.01, 2.0)}});
}

}  // namespace

Case random_case(const std::string& kind, Rng& rng) {
  const std::size_t n = between(rng, 8, 30);
  const std::size_t p = between(rng, 1, 5);
  Case c{make("StandardScaler"), Matrix(), {}, kind};

  if (kind == "StandardScaler") {
    const bool sparse = coin(rng);
    const bool with_mean = !sparse && coin(rng);
    c.estimator = make(kind, {{"with_mean", with_mean}, {"with_std", coin(rng)}});
    const Matrix X = features(rng, n, p);
    c.X = sparse ? Data(SparseMatrix::from_dense(X)) : Data(X);
  } else if (kind == "SelectKBest") {
    c.estimator = make(kind, {{"k", static_cast<std::int64_t>(between(rng, 1, p + 2))}});
    c.X = features(rng, n, p);
    c.y = random_labels(rng, n, between(rng, 2, 3), 2);
  } else if (kind == "PCA") {
    const std::size_t k = between(rng, 0, std::min(n, p));
    c.estimator = k == 0 ? make(kind) : make(kind, {{"n_components", static_cast<std::int64_t>(k)}});
    c.X = features(rng, n, p);
  } else if (kind == "KernelPCA") {
    ParamMap params{{"kernel", coin(rng) ? "rbf" : "linear"}};
    if (coin(rng)) params.set("gamma", log_uniform(rng, 0.01, 2.0));
    if (coin(rng)) params.set("n_components", static_cast<std::int64_t>(between(rng, 1, p)));
    c.estimator = make(kind, params);
    c.X = features(rng, n, p);
  } else if (kind == "HashingVectorizer") {
    c.estimator = make(kind, {{"n_features", std::int64_t{1} << between(rng, 1, 10)},
                              {"norm", coin(rng) ? "l2" : "none"}});
    c.X = random_documents(rng, n, 20);
  } else if (kind == "LogisticRegression") {
    c.estimator = make(kind, {{"penalty", coin(rng) ? "l1" : "l2"},
                              {"C", log_uniform(rng, 0.01, 100.0)},
                              {"fit_intercept", coin(rng)}});
    c.X = features(rng, n, p);
    c.y = random_labels(rng, n, between(rng, 2, 3));
  } else if (kind == "SVC") {
    ParamMap params{{"C", log_uniform(rng, 0.1, 100.0)},
                    {"kernel", coin(rng) ? "rbf" : "linear"}};
    if (coin(rng)) params.set("gamma", log_uniform(rng, 0.01, 2.0));
    c.estimator = make(kind, params);
    c.X = features(rng, n, p);
    c.y = random_labels(rng, n, 2);
  } else if (kind == "KMeans") {
    c.estimator = make(kind, {{"n_clusters", static_cast<std::int64_t>(between(rng, 1, std::min<std::size_t>(n, 5)))},
                              {"n_init", static_cast<std::int64_t>(between(rng, 1, 4))},
                              {"random_seed", static_cast<std::int64_t>(rng.index(1000))}});
    c.X = features(rng, n, p);
  } else if (kind == "Pipeline") {
    EstimatorList steps;
    const std::size_t n_transformers = between(rng, 1, 2);
    for (std::size_t i = 0; i < n_transformers; ++i) {
      steps.emplace_back("t" + std::to_string(i), random_transformer(rng, p, true));
    }
    switch (rng.index(3)) {
      case 0: steps.emplace_back("last", random_binary_predictor(rng)); break;
      case 1: steps.emplace_back("last", make("KMeans", {{"n_clusters", 2}, {"n_init", 2}})); break;
      default: steps.emplace_back("last", random_transformer(rng, p, true)); break;
    }
    c.estimator = make_pipeline(std::move(steps));
    c.X = features(rng, n, p);
    c.y = random_labels(rng, n, 2, 2);
  } else if (kind == "FeatureUnion") {
    EstimatorList members;
    const std::size_t count = between(rng, 1, 3);
    for (std::size_t i = 0; i < count; ++i) {
      members.emplace_back("m" + std::to_string(i), random_transformer(rng, p, true));
    }
    c.estimator = make_union(std::move(members));
    c.X = features(rng, n, p);
    c.y = random_labels(rng, n, 2, 2);
  } else if (kind == "OneVsOneClassifier" || kind == "OneVsRestClassifier") {
    c.estimator = make(kind, {{"estimator", random_binary_predictor(rng)}});
    c.X = features(rng, n, p);
    c.y = random_labels(rng, n, between(rng, 2, 4), 2);
  } else if (kind == "RowRecorder") {
    c.estimator = make(kind);
    c.X = features(rng, n, p);
    c.y = random_labels(rng, n, 2);
  } else if (kind == "Cyclic" || kind == "CyclicScored") {
    c.estimator = make(kind);
    const auto y = random_labels(rng, n, 2);
    std::vector<double> values;
    for (double label : y) {
      values.push_back(10 + 10 * label);
      for (std::size_t f = 1; f < p; ++f) values.push_back(rng.uniform());
    }
    c.X = Matrix(n, p, std::move(values));
    c.y = y;
  } else if (kind == "MeanRegressor") {
    c.estimator = make(kind);
    c.X = features(rng, n, p);
    std::vector<double> y(n);
    for (auto& v : y) v = rng.uniform() * 10;
    c.y = y;
  } else {
    throw std::logic_error("no random case generator for kind " + kind);
  }
  c.description = kind + " " + c.estimator.params().to_string();
  return c;
}

Data fresh_rows(const Case& c, Rng& rng) {
  const std::size_t n = n_rows(c.X);
  std::vector<std::size_t> idx(between(rng, 1, n));
  for (auto& i : idx) i = rng.index(n);
  return take_rows(c.X, idx);
}

bool same_data(const Data& a, const Data& b) {
  if (a.index() != b.index()) return false;
  return std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        return x == std::get<T>(b);
      },
      a);
}

}  // namespace estkit::testing
