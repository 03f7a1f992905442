#include <gtest/gtest.h>

#include "estkit/estkit.hpp"
#include "support.hpp"

namespace estkit {
namespace {

using testing::same_data;

TEST(Pipeline, OnlyTheLastStepMayBeANonTransformer) {
  Rng rng(1);
  const auto data = testing::blobs(rng, 10, {{0, 0}, {3, 3}}, 1.0);
  Estimator bad = make_pipeline({{"lr", make("LogisticRegression")}, {"scale", make("StandardScaler")}});
  EXPECT_THROW(bad.fit(data.X, data.y), CapabilityError);
  EXPECT_THROW(make_pipeline({}).validate(), ParamError);
}

TEST(Pipeline, CapabilitiesFollowTheLastStep) {
  const Estimator classify = make_pipeline({{"s", make("StandardScaler")}, {"lr", make("LogisticRegression")}});
  const auto caps = classify.capabilities();
  EXPECT_TRUE(caps.predictor);
  EXPECT_TRUE(caps.probabilistic);
  EXPECT_TRUE(caps.supervised);
  EXPECT_FALSE(caps.transformer);
  EXPECT_EQ(caps.task, Task::classification);

  const Estimator reduce = make_pipeline({{"s", make("StandardScaler")}, {"pca", make("PCA")}});
  EXPECT_TRUE(reduce.capabilities().transformer);
  EXPECT_FALSE(reduce.capabilities().predictor);

  const Estimator text = make_pipeline({{"h", make("HashingVectorizer")}, {"km", make("KMeans")}});
  EXPECT_EQ(text.capabilities().input, InputKind::documents);
}

TEST(Pipeline, NestedParametersAndErrorContext) {
  Estimator pipe = make_pipeline({{"s", make("StandardScaler")}, {"lr", make("LogisticRegression")}});
  const ParamMap deep = pipe.get_params(true);
  EXPECT_TRUE(deep.contains("lr__C"));
  EXPECT_TRUE(deep.contains("s__with_mean"));
  const Estimator tuned = pipe.set_params({{"lr__C", 0.25}});
  EXPECT_EQ(tuned.get_params(true).at("lr__C"), ParamValue(0.25));
  EXPECT_EQ(pipe.get_params(true).at("lr__C"), ParamValue(1.0));
  EXPECT_THROW(pipe.set_params({{"nope__C", 1.0}}), ParamError);

  pipe = pipe.set_params({{"lr__C", -1.0}});
  try {
    Rng rng(2);
    const auto data = testing::blobs(rng, 5, {{0}, {1}}, 1.0);
    pipe.fit(data.X, data.y);
    ADD_FAILURE() << "fit accepted a negative C";
  } catch (const ParamError& e) {
    EXPECT_NE(std::string(e.what()).find("step 'lr'"), std::string::npos) << e.what();
  }
}

TEST(Pipeline, UnfittedPipelineRefusesToPredict) {
  const Estimator pipe = make_pipeline({{"s", make("StandardScaler")}, {"lr", make("LogisticRegression")}});
  EXPECT_THROW(pipe.predict(Matrix::from_rows({{1, 2}, {3, 4}})), NotFittedError);
}

TEST(Pipeline, FittedChildrenAreStoredByName) {
  Rng rng(3);
  const auto data = testing::blobs(rng, 10, {{0, 0}, {3, 3}}, 1.0);
  Estimator pipe = make_pipeline({{"s", make("StandardScaler")}, {"lr", make("LogisticRegression")}});
  pipe.fit(data.X, data.y);
  Estimator scaler = make("StandardScaler");
  scaler.fit(data.X);
  EXPECT_EQ(pipe.state().child("s").state().vector("mean_"), scaler.state().vector("mean_"));
  EXPECT_TRUE(pipe.state().child("lr").is_fitted());
}

TEST(FeatureUnion, ConcatenatesInListOrder) {
  Rng rng(4);
  const Matrix X = testing::random_matrix(rng, 12, 4);
  Estimator pca = make("PCA", {{"n_components", 2}});
  Estimator scaler = make("StandardScaler");
  Estimator u = make_union({{"pca", pca}, {"scale", scaler}});
  const Data out = u.fit_transform(X);
  EXPECT_TRUE(same_data(out, hstack(std::vector<Data>{pca.fit_transform(X), scaler.fit_transform(X)})));
  EXPECT_EQ(n_cols(out), 6u);
}

TEST(FeatureUnion, SparseMembersStaySparse) {
  Rng rng(5);
  const Documents docs = testing::random_documents(rng, 15, 30);
  Estimator a = make("HashingVectorizer", {{"n_features", 16}});
  Estimator b = make("HashingVectorizer", {{"n_features", 8}, {"norm", "none"}});
  Estimator u = make_union({{"a", a}, {"b", b}});
  const Data out = u.fit_transform(docs);
  ASSERT_TRUE(std::holds_alternative<SparseMatrix>(out));
  const Data expected = hstack(std::vector<Data>{a.fit_transform(docs), b.fit_transform(docs)});
  EXPECT_TRUE(same_data(out, expected));
}

TEST(FeatureUnion, MembersMustBeTransformers) {
  EXPECT_THROW(make_union({{"lr", make("LogisticRegression")}}).fit(Matrix::from_rows({{1}, {2}, {3}}), std::vector<double>{0, 1, 0}),
               CapabilityError);
  EXPECT_THROW(make_union({}).validate(), ParamError);
}

}  // namespace
}  // namespace estkit
