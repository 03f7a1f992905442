#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "estkit/estkit.hpp"
#include "support.hpp"

namespace estkit {
namespace {

std::vector<std::vector<std::size_t>> test_sets(const std::vector<Split>& splits) {
  std::vector<std::vector<std::size_t>> out;
  for (const auto& s : splits) out.push_back(s.test);
  return out;
}

TEST(Split, KFoldPutsTheRemainderFirst) {
  EXPECT_EQ(test_sets(split(CvSplitter::kfold(3), 7)),
            (std::vector<std::vector<std::size_t>>{{0, 1, 2}, {3, 4}, {5, 6}}));
  const auto splits = split(CvSplitter::kfold(3), 7);
  EXPECT_EQ(splits[1].train, (std::vector<std::size_t>{0, 1, 2, 5, 6}));
}

TEST(Split, StratifiedDealsRoundRobinAcrossClasses) {
  const std::vector<double> y = {0, 1, 0, 1, 0, 0};
  EXPECT_EQ(test_sets(split(CvSplitter::stratified(2), 6, y)),
            (std::vector<std::vector<std::size_t>>{{0, 1, 4}, {2, 3, 5}}));
}

TEST(Split, LeaveOneOut) {
  const auto splits = split(CvSplitter::leave_one_out(), 4);
  ASSERT_EQ(splits.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(splits[i].test, std::vector<std::size_t>{i});
    EXPECT_EQ(splits[i].train.size(), 3u);
  }
  EXPECT_THROW(split(CvSplitter::leave_one_out(), 1), DataError);
}

TEST(Split, ShuffleIsSeededAndStillPartitions) {
  const auto a = split(CvSplitter::kfold(4, true, 9), 20);
  EXPECT_EQ(test_sets(a), test_sets(split(CvSplitter::kfold(4, true, 9), 20)));
  EXPECT_NE(test_sets(a), test_sets(split(CvSplitter::kfold(4), 20)));
  EXPECT_NE(test_sets(a), test_sets(split(CvSplitter::kfold(4, true, 10), 20)));
  std::vector<int> hits(20, 0);
  for (const auto& s : a) {
    EXPECT_TRUE(std::is_sorted(s.test.begin(), s.test.end()));
    for (auto i : s.test) ++hits[i];
  }
  EXPECT_EQ(hits, std::vector<int>(20, 1));
}

TEST(Split, Errors) {
  EXPECT_THROW(split(CvSplitter::kfold(1), 10), ParamError);
  EXPECT_THROW(split(CvSplitter::kfold(11), 10), DataError);
  const std::vector<double> y = {0, 0, 0, 0, 1};
  EXPECT_THROW(split(CvSplitter::stratified(2), 5, y), DataError);
  EXPECT_THROW(split(CvSplitter::stratified(2), 4, y), DataError);
}

TEST(Grid, LastKeyVariesFastestAndDuplicatesAreDropped) {
  const ParamGrid grid = {
      {{"a", {1, 2}}, {"b", {"x", "y"}}},
      {{"a", {1}}, {"b", {"x"}}},  // duplicate of the first candidate
      {{"c", {0.5}}},
  };
  const auto cands = expand_grid(grid);
  ASSERT_EQ(cands.size(), 5u);
  EXPECT_EQ(cands[0].to_string(), ParamMap({{"a", 1}, {"b", "x"}}).to_string());
  EXPECT_EQ(cands[1].to_string(), ParamMap({{"a", 1}, {"b", "y"}}).to_string());
  EXPECT_EQ(cands[2].to_string(), ParamMap({{"a", 2}, {"b", "x"}}).to_string());
  EXPECT_EQ(cands[4].to_string(), ParamMap({{"c", 0.5}}).to_string());
  EXPECT_THROW(expand_grid({}), ParamError);
  EXPECT_THROW(expand_grid({{{"a", ParamValue::List{}}}}), ParamError);
}

TEST(Sampling, IntegerUniformIsHalfOpen) {
  const auto draws = sample_params({{"k", Distribution::integer_uniform(2, 5)}}, 600, 1);
  std::map<std::int64_t, int> counts;
  for (const auto& d : draws) {
    ASSERT_EQ(d.at("k").type(), ParamType::integer);
    ++counts[d.at("k").as_int()];
  }
  EXPECT_EQ(counts.size(), 3u);
  EXPECT_EQ(counts.begin()->first, 2);
  EXPECT_EQ(counts.rbegin()->first, 4);
  for (const auto& [v, n] : counts) EXPECT_GT(n, 150) << v;
}

TEST(Sampling, LogUniformSpreadsEvenlyOverDecades) {
  const auto draws = sample_params({{"C", Distribution::log_uniform(1e-3, 1e3)}}, 6000, 2);
  std::vector<int> decade(6, 0);
  for (const auto& d : draws) {
    const double v = d.at("C").as_real();
    ASSERT_GE(v, 1e-3);
    ASSERT_LT(v, 1e3);
    ++decade[static_cast<std::size_t>(std::floor(std::log10(v) + 3))];
  }
  // 1000 expected per decade; 5 standard deviations is about 150.
  for (int n : decade) EXPECT_NEAR(n, 1000, 150);
}

TEST(Sampling, UniformChoiceAndSeeds) {
  const ParamDistributions dists = {{"x", Distribution::uniform(-1, 1)},
                                    {"kernel", Distribution::choice({"rbf", "linear"})}};
  const auto a = sample_params(dists, 50, 3);
  const auto b = sample_params(dists, 50, 3);
  const auto c = sample_params(dists, 50, 4);
  int rbf = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].to_string(), b[i].to_string());
    const double x = a[i].at("x").as_real();
    EXPECT_TRUE(x >= -1 && x < 1);
    rbf += a[i].at("kernel").as_string() == "rbf";
  }
  EXPECT_GT(rbf, 10);
  EXPECT_LT(rbf, 40);
  EXPECT_NE(a.front().to_string(), c.front().to_string());
  EXPECT_THROW(sample_params({{"C", Distribution::log_uniform(0, 1)}}, 1, 0), ParamError);
  EXPECT_THROW(sample_params(dists, 0, 0), ParamError);
}

TEST(Search, RefitFalseHasNoBestEstimator) {
  Rng rng(5);
  const auto data = testing::blobs(rng, 10, {{0, 0}, {3, 3}}, 1.0);
  SearchOptions options;
  options.refit = false;
  const auto result = grid_search(make("LogisticRegression"), {{{"C", {0.1, 1.0}}}}, data.X, data.y, options);
  EXPECT_EQ(result.candidates.size(), 2u);
  EXPECT_FALSE(result.best_estimator_.has_value());
  EXPECT_THROW(result.best_estimator(), NotFittedError);
  EXPECT_THROW(result.predict(data.X), NotFittedError);

  const auto refitted = grid_search(make("LogisticRegression"), {{{"C", {0.1, 1.0}}}}, data.X, data.y);
  Estimator direct = make("LogisticRegression", refitted.best_params_);
  direct.fit(data.X, data.y);
  EXPECT_EQ(refitted.predict(data.X), direct.predict(data.X));
  EXPECT_EQ(refitted.decision_function(data.X), direct.decision_function(data.X));
}

TEST(Search, FailuresNameTheCandidateAndFold) {
  Rng rng(6);
  const auto data = testing::blobs(rng, 10, {{0, 0}, {3, 3}}, 1.0);
  try {
    grid_search(make("LogisticRegression"), {{{"C", {1.0, -1.0}}}}, data.X, data.y);
    ADD_FAILURE() << "search accepted a negative C";
  } catch (const ParamError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("candidate 1"), std::string::npos) << what;
    EXPECT_NE(what.find("fold 0"), std::string::npos) << what;
  }
}

TEST(Search, ThreadCountDoesNotChangeResults) {
  Rng rng(7);
  const auto data = testing::blobs(rng, 15, {{0, 0}, {2, 2}}, 2.0);
  const ParamGrid grid = {{{"C", {0.1, 1.0, 10.0}}, {"kernel", {"rbf", "linear"}}}};
  SearchOptions serial;
  serial.cv = CvSplitter::stratified(3, true, 1);
  serial.scoring = Scorer("f1");
  SearchOptions parallel = serial;
  parallel.n_jobs = 4;
  EXPECT_EQ(grid_search(make("SVC"), grid, data.X, data.y, serial),
            grid_search(make("SVC"), grid, data.X, data.y, parallel));
}

TEST(Search, BestIsTheFirstMaximum) {
  Rng rng(8);
  const auto data = testing::blobs(rng, 10, {{0, 0}, {6, 6}}, 1.0);
  // Every C separates the blobs perfectly, so all means tie at 1.
  const auto result = grid_search(make("SVC", {{"kernel", "linear"}}), {{{"C", {10.0, 1.0, 100.0}}}},
                                  data.X, data.y);
  EXPECT_EQ(result.mean_scores, std::vector<double>(3, 1.0));
  EXPECT_EQ(result.best_index_, 0u);
  EXPECT_EQ(result.best_params_.at("C"), ParamValue(10.0));
}

TEST(Scorer, NamesAndDefaults) {
  EXPECT_THROW(Scorer("balanced_accuracy"), ParamError);
  Rng rng(9);
  const auto data = testing::blobs(rng, 10, {{0, 0}, {1, 1}}, 2.0);
  Estimator lr = make("LogisticRegression");
  lr.fit(data.X, data.y);
  EXPECT_EQ(Scorer()(lr, data.X, data.y), lr.score(data.X, data.y));
  EXPECT_EQ(Scorer("accuracy")(lr, data.X, data.y), metrics::accuracy(data.y, lr.predict(data.X)));
  EXPECT_EQ(Scorer("roc_auc")(lr, data.X, data.y),
            metrics::roc_auc(data.y, lr.decision_function(data.X).col(0)));
  const std::vector<double> truth = {1, 2, 3}, pred = {1, 2, 5};
  EXPECT_EQ(score_metric("neg_mean_squared_error", truth, pred), -4.0 / 3.0);
}

}  // namespace
}  // namespace estkit
