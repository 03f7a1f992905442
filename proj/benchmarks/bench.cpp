#include <benchmark/benchmark.h>

#include "estkit/estkit.hpp"

namespace {

using namespace estkit;

Matrix features(std::size_t n, std::size_t p, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> v(n * p);
  for (auto& x : v) x = 2 * rng.uniform() - 1;
  return Matrix(n, p, std::move(v));
}

std::vector<double> labels(const Matrix& X) {
  std::vector<double> y(X.rows());
  for (std::size_t i = 0; i < X.rows(); ++i) y[i] = X(i, 0) + 0.5 * X(i, 1) > 0 ? 1 : 0;
  return y;
}

void BM_LogisticFit(benchmark::State& state) {
  const Matrix X = features(static_cast<std::size_t>(state.range(0)), 20, 1);
  const auto y = labels(X);
  const char* penalty = state.range(1) == 1 ? "l1" : "l2";
  for (auto _ : state) {
    Estimator lr = make("LogisticRegression", {{"penalty", penalty}});
    lr.fit(X, y);
    benchmark::DoNotOptimize(lr.state().matrix("coef_"));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_LogisticFit)->ArgsProduct({{200, 2000}, {1, 2}})->Unit(benchmark::kMillisecond);

void BM_SvcFit(benchmark::State& state) {
  const Matrix X = features(static_cast<std::size_t>(state.range(0)), 10, 2);
  const auto y = labels(X);
  for (auto _ : state) {
    Estimator svc = make("SVC", {{"C", 10.0}});
    svc.fit(X, y);
    benchmark::DoNotOptimize(svc.state().vector("dual_coef_"));
  }
}
BENCHMARK(BM_SvcFit)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);

void BM_KMeansFit(benchmark::State& state) {
  const Matrix X = features(static_cast<std::size_t>(state.range(0)), 8, 3);
  for (auto _ : state) {
    Estimator km = make("KMeans", {{"n_clusters", 8}, {"n_init", 3}});
    km.fit(X);
    benchmark::DoNotOptimize(km.state().scalar("inertia_"));
  }
}
BENCHMARK(BM_KMeansFit)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_PcaFit(benchmark::State& state) {
  const Matrix X = features(2000, static_cast<std::size_t>(state.range(0)), 4);
  for (auto _ : state) {
    Estimator pca = make("PCA", {{"n_components", 5}});
    pca.fit(X);
    benchmark::DoNotOptimize(pca.state().matrix("components_"));
  }
}
BENCHMARK(BM_PcaFit)->Arg(10)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_HashingTransform(benchmark::State& state) {
  std::vector<Document> docs(5000);
  Rng rng(5);
  for (auto& d : docs) {
    for (int t = 0; t < 20; ++t) d.push_back("token" + std::to_string(rng.index(5000)));
  }
  const Documents corpus(std::move(docs));
  Estimator hv = make("HashingVectorizer", {{"n_features", 1 << 18}});
  hv.fit(corpus);
  for (auto _ : state) benchmark::DoNotOptimize(hv.transform(corpus));
  state.SetItemsProcessed(state.iterations() * 5000);
}
BENCHMARK(BM_HashingTransform)->Unit(benchmark::kMillisecond);

void BM_GridSearch(benchmark::State& state) {
  const Matrix X = features(300, 5, 6);
  const auto y = labels(X);
  const ParamGrid grid = {{{"clf__C", {0.1, 1.0, 10.0, 100.0}}, {"clf__kernel", {"rbf", "linear"}}}};
  const Estimator pipe = make_pipeline({{"scale", make("StandardScaler")}, {"clf", make("SVC")}});
  SearchOptions options;
  options.cv = CvSplitter::stratified(5);
  options.n_jobs = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(grid_search(pipe, grid, X, y, options).best_score_);
}
BENCHMARK(BM_GridSearch)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

void BM_SerializeRoundTrip(benchmark::State& state) {
  const Matrix X = features(500, 10, 7);
  const auto y = labels(X);
  Estimator pipe = make_pipeline({{"scale", make("StandardScaler")}, {"clf", make("SVC")}});
  pipe.fit(X, y);
  for (auto _ : state) {
    const auto bytes = serialize(pipe);
    benchmark::DoNotOptimize(deserialize(bytes));
    state.SetBytesProcessed(state.bytes_processed() + static_cast<std::int64_t>(bytes.size()));
  }
}
BENCHMARK(BM_SerializeRoundTrip);

}  // namespace

BENCHMARK_MAIN();
