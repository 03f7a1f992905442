#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "estkit/errors.hpp"
#include "estkit/io.hpp"

namespace estkit {
namespace {

class TempFile {
 public:
  explicit TempFile(const std::string& name, const std::string& text)
      : path_(std::filesystem::temp_directory_path() / ("estkit_io_" + name)) {
    std::ofstream(path_) << text;
  }
  ~TempFile() { std::filesystem::remove(path_); }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

TEST(Csv, HeaderDetection) {
  EXPECT_TRUE(csv_has_header(TempFile("h1.csv", "a,b,label\n1,2,x\n").path()));
  EXPECT_FALSE(csv_has_header(TempFile("h2.csv", "1,2,cat\n3,4,dog\n").path()));
  EXPECT_FALSE(csv_has_header(TempFile("h3.csv", "1,2\n3,4\n").path()));
  EXPECT_TRUE(csv_has_header(TempFile("h4.csv", "a,b\n").path()));
}

TEST(Csv, TargetByNameAndCategoricalCodes) {
  TempFile f("t1.csv", "x1,species,x2\n1.5,cat,2\n-1,dog,0\n3,cat,1e2\n");
  const Dataset ds = load_csv(f.path(), true, ColumnRef{std::string("species")});
  EXPECT_EQ(std::get<Matrix>(ds.X), Matrix::from_rows({{1.5, 2}, {-1, 0}, {3, 100}}));
  EXPECT_EQ(ds.y, (std::vector<double>{0, 1, 0}));
  EXPECT_EQ(ds.class_names, (std::vector<std::string>{"cat", "dog"}));
  EXPECT_EQ(ds.feature_names, (std::vector<std::string>{"x1", "x2"}));
}

TEST(Csv, TargetByIndexNumeric) {
  TempFile f("t2.csv", "1,2,0\n3,4,1\n");
  const Dataset ds = load_csv(f.path(), false, ColumnRef{std::size_t{2}});
  EXPECT_EQ(ds.y, (std::vector<double>{0, 1}));
  EXPECT_TRUE(ds.class_names.empty());
  EXPECT_THROW(load_csv(f.path(), false, ColumnRef{std::size_t{3}}), DataError);
}

TEST(Csv, ErrorsNameTheLine) {
  TempFile ragged("e1.csv", "1,2\n3\n");
  try {
    load_csv(ragged.path(), false);
    FAIL();
  } catch (const DataError& e) {
    EXPECT_NE(std::string(e.what()).find(":2:"), std::string::npos) << e.what();
  }
  TempFile text("e2.csv", "1,2\n3,abc\n");
  EXPECT_THROW(load_csv(text.path(), false), DataError);
  TempFile missing("e3.csv", "1,nan\n");
  EXPECT_THROW(load_csv(missing.path(), false), DataError);
  EXPECT_THROW(load_csv("/nonexistent/x.csv", false), DataError);
  TempFile header("e4.csv", "a,b\n1,2\n");
  EXPECT_THROW(load_csv(header.path(), true, ColumnRef{std::string("c")}), DataError);
}

TEST(SvmLight, SparseRowsAndComments) {
  TempFile f("s1.svm", "# comment\n1 1:0.5 3:2\n-1 2:1 # trailing\n\n0\n");
  const Dataset ds = load_svmlight(f.path());
  EXPECT_EQ(ds.y, (std::vector<double>{1, -1, 0}));
  ASSERT_TRUE(is_sparse(ds.X));
  EXPECT_EQ(to_dense(ds.X), Matrix::from_rows({{0.5, 0, 2}, {0, 1, 0}, {0, 0, 0}}));
}

TEST(SvmLight, MalformedInputIsRefused) {
  EXPECT_THROW(load_svmlight(TempFile("s2.svm", "1 2:1 1:1\n").path()), DataError);
  EXPECT_THROW(load_svmlight(TempFile("s3.svm", "1 0:1\n").path()), DataError);
  EXPECT_THROW(load_svmlight(TempFile("s4.svm", "x 1:1\n").path()), DataError);
  EXPECT_THROW(load_svmlight(TempFile("s5.svm", "1 1-1\n").path()), DataError);
}

}  // namespace
}  // namespace estkit
