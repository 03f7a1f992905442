#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "estkit/estkit.hpp"
#include "estkit_cli/cli.hpp"
#include "estkit_cli/spec.hpp"
#include "support.hpp"

namespace estkit {
namespace {

namespace fs = std::filesystem;

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("estkit_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    // Two separable blobs with string labels.
    Rng rng(1);
    const auto data = testing::blobs(rng, 20, {{0, 0}, {3, 3}}, 1.5);
    X_ = data.X;
    y_ = data.y;
    std::ostringstream csv;
    csv << "x1,x2,label\n";
    for (std::size_t i = 0; i < X_.rows(); ++i) {
      csv << X_(i, 0) << "," << X_(i, 1) << "," << (y_[i] == 0 ? "cat" : "dog") << "\n";
    }
    write("train.csv", csv.str());
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  void write(const std::string& name, const std::string& text) const {
    std::ofstream(dir_ / name) << text;
  }
  std::string read(const std::string& name) const {
    std::ifstream in(dir_ / name);
    return {std::istreambuf_iterator<char>(in), {}};
  }
  int run(const std::vector<std::string>& args) {
    out_.str("");
    err_.str("");
    return cli::run(args, out_, err_);
  }

  fs::path dir_;
  Matrix X_;
  std::vector<double> y_;
  std::ostringstream out_, err_;
};

const char* pipeline_spec = R"({"estimator": {"kind": "Pipeline", "params": {"steps": [
    {"name": "scale", "estimator": {"kind": "StandardScaler"}},
    {"name": "clf", "estimator": {"kind": "LogisticRegression", "params": {"C": 0.5}}}]}}})";

TEST_F(Cli, FitPredictScoreMatchTheLibrary) {
  write("spec.json", pipeline_spec);
  ASSERT_EQ(run({"fit", "--spec", path("spec.json"), "--data", path("train.csv"), "--target-column",
                 "label", "--model", path("model.bin")}),
            cli::exit_ok)
      << err_.str();

  Estimator direct = make_pipeline({{"scale", make("StandardScaler")},
                                    {"clf", make("LogisticRegression", {{"C", 0.5}})}});
  direct.fit(X_, y_);

  ASSERT_EQ(run({"predict", "--model", path("model.bin"), "--data", path("train.csv"), "--out",
                 path("pred.csv")}),
            cli::exit_ok)
      << err_.str();
  std::string expected = "prediction\n";
  for (double p : direct.predict(X_)) expected += p == 0 ? "cat\n" : "dog\n";
  EXPECT_EQ(read("pred.csv"), expected);

  ASSERT_EQ(run({"score", "--model", path("model.bin"), "--data", path("train.csv")}), cli::exit_ok)
      << err_.str();
  EXPECT_EQ(std::stod(out_.str()), direct.score(X_, y_));
}

TEST_F(Cli, GridSearchReportAndModel) {
  write("spec.json", R"({"estimator": {"kind": "SVC"},
    "search": {"type": "grid",
               "param_grid": [{"C": [0.1, 1, 10, 100], "kernel": ["rbf", "linear"]},
                              {"C": [0.1, 1, 10, 100], "kernel": ["rbf"], "gamma": [0.5]}],
               "cv": {"scheme": "stratified_kfold", "k": 4},
               "scoring": "f1"}})");
  ASSERT_EQ(run({"search", "--spec", path("spec.json"), "--data", path("train.csv"), "--target-column",
                 "2", "--report", path("report.csv"), "--model", path("best.bin")}),
            cli::exit_ok)
      << err_.str();
  const auto summary = cli::json::parse(out_.str());
  EXPECT_EQ(summary["candidates"], 12);

  std::istringstream report(read("report.csv"));
  std::string line;
  std::getline(report, line);
  EXPECT_EQ(line, "candidate,params,split0_score,split1_score,split2_score,split3_score,mean_score,is_best");
  int rows = 0, best = 0;
  while (std::getline(report, line)) {
    ++rows;
    best += line.ends_with(",1");
  }
  EXPECT_EQ(rows, 12);
  EXPECT_EQ(best, 1);
  EXPECT_EQ(load(path("best.bin")).kind(), "SVC");
}

TEST_F(Cli, SeededRandomizedSearchIsReproducible) {
  write("spec.json", R"({"estimator": {"kind": "LogisticRegression"},
    "search": {"type": "randomized", "n_iter": 5,
               "param_distributions": {"C": {"log_uniform": [0.01, 100]},
                                       "penalty": {"choice": ["l1", "l2"]}},
               "cv": {"scheme": "kfold", "k": 3, "shuffle": true}}})");
  const std::vector<std::string> args = {"search", "--spec", path("spec.json"), "--data",
                                         path("train.csv"), "--target-column", "label", "--seed", "7"};
  ASSERT_EQ(run(args), cli::exit_ok) << err_.str();
  const std::string first = out_.str();
  ASSERT_EQ(run(args), cli::exit_ok);
  EXPECT_EQ(out_.str(), first);
  auto other = args;
  other.back() = "8";
  ASSERT_EQ(run(other), cli::exit_ok);
  EXPECT_NE(out_.str(), first);
}

TEST_F(Cli, ExitCodes) {
  write("spec.json", pipeline_spec);
  write("broken.json", "{\"estimator\": ");
  write("unknown.json", R"({"estimator": {"kind": "Forest"}})");
  write("badparam.json", R"({"estimator": {"kind": "SVC", "params": {"depth": 3}}})");
  write("one_class.csv", "a,b,label\n1,2,x\n3,4,x\n5,6,x\n");
  write("garbage.bin", "ESTK but not an archive");
  const std::string data = path("train.csv");

  EXPECT_EQ(run({"--help"}), cli::exit_ok);
  EXPECT_EQ(run({}), cli::exit_invalid);
  EXPECT_EQ(run({"fit", "--spec", path("spec.json"), "--data", data}), cli::exit_invalid);  // no --model
  EXPECT_EQ(run({"fit", "--spec", path("broken.json"), "--data", data, "--model", path("m")}), cli::exit_invalid);
  EXPECT_EQ(run({"fit", "--spec", path("unknown.json"), "--data", data, "--model", path("m")}), cli::exit_invalid);
  EXPECT_EQ(run({"fit", "--spec", path("badparam.json"), "--data", data, "--target-column", "label",
                 "--model", path("m")}),
            cli::exit_invalid);
  EXPECT_EQ(run({"search", "--spec", path("spec.json"), "--data", data, "--target-column", "label"}),
            cli::exit_invalid);  // no search block

  EXPECT_EQ(run({"fit", "--spec", path("spec.json"), "--data", path("missing.csv"), "--target-column",
                 "label", "--model", path("m")}),
            cli::exit_data);
  EXPECT_EQ(run({"fit", "--spec", path("spec.json"), "--data", data, "--model", path("m")}),
            cli::exit_data);  // supervised without a target
  EXPECT_EQ(run({"predict", "--model", path("garbage.bin"), "--data", data}), cli::exit_data);

  EXPECT_EQ(run({"fit", "--spec", path("spec.json"), "--data", path("one_class.csv"), "--target-column",
                 "label", "--model", path("m")}),
            cli::exit_fit);
  EXPECT_NE(err_.str().find("fit error"), std::string::npos) << err_.str();
}

}  // namespace
}  // namespace estkit
