#pragma once

#include <cstddef>
#include <initializer_list>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace estkit {

// Dense row-major matrix of 64-bit floats. Immutable after construction;
// copies share the underlying buffer.
class Matrix {
 public:
  Matrix();
  // Throws DataError unless values.size() == rows * cols.
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> values);
  static Matrix zeros(std::size_t rows, std::size_t cols);
  static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);
  static Matrix from_rows(const std::vector<std::vector<double>>& rows);
  // n x 1 column.
  static Matrix column(std::span<const double> values);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }

  double operator()(std::size_t r, std::size_t c) const { return (*values_)[r * cols_ + c]; }
  std::span<const double> row(std::size_t r) const {
    return {values_->data() + r * cols_, cols_};
  }
  std::span<const double> values() const { return *values_; }
  std::vector<double> col(std::size_t c) const;

  // Exact element-wise equality (NaN never equal); shapes must match.
  bool operator==(const Matrix& other) const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::shared_ptr<const std::vector<double>> values_;
};

struct Triplet {
  std::size_t row;
  std::size_t col;
  double value;
};

// Compressed sparse row matrix kept in canonical form: column indices
// strictly increasing within each row and no explicitly stored zeros.
class SparseMatrix {
 public:
  SparseMatrix();
  // Validates the canonical-form invariants; throws DataError otherwise.
  SparseMatrix(std::size_t rows, std::size_t cols, std::vector<std::size_t> indptr,
               std::vector<std::size_t> indices, std::vector<double> data);
  static SparseMatrix from_dense(const Matrix& dense);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t nnz() const { return storage_->data.size(); }

  std::span<const std::size_t> indptr() const { return storage_->indptr; }
  std::span<const std::size_t> indices() const { return storage_->indices; }
  std::span<const double> data() const { return storage_->data; }

  std::span<const std::size_t> row_indices(std::size_t r) const;
  std::span<const double> row_values(std::size_t r) const;

  // All stored entries in row-major order.
  std::vector<Triplet> triplets() const;
  Matrix to_dense() const;

  bool operator==(const SparseMatrix& other) const;

 private:
  struct Storage {
    std::vector<std::size_t> indptr;
    std::vector<std::size_t> indices;
    std::vector<double> data;
  };
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::shared_ptr<const Storage> storage_;
};

// Canonical CSR from COO triplets; duplicates are summed and resulting zeros
// dropped. Out-of-range indices throw DataError.
SparseMatrix csr_from_triplets(std::span<const Triplet> triplets, std::size_t rows,
                               std::size_t cols);

using Document = std::vector<std::string>;

// A batch of pre-tokenized documents, the input of text vectorizers.
class Documents {
 public:
  Documents();
  explicit Documents(std::vector<Document> docs);
  Documents(std::initializer_list<Document> docs);

  std::size_t size() const { return docs_->size(); }
  const Document& operator[](std::size_t i) const { return (*docs_)[i]; }
  auto begin() const { return docs_->begin(); }
  auto end() const { return docs_->end(); }

  bool operator==(const Documents& other) const { return *docs_ == *other.docs_; }

 private:
  std::shared_ptr<const std::vector<Document>> docs_;
};

// Everything an estimator can be fit on or applied to. Rows are samples.
using Data = std::variant<Matrix, SparseMatrix, Documents>;

std::size_t n_rows(const Data& data);
// Feature count of a matrix input; throws DataError for documents.
std::size_t n_cols(const Data& data);
bool is_sparse(const Data& data);
bool is_matrix(const Data& data);

// Dense view of a numeric input (sparse inputs are densified).
Matrix to_dense(const Data& data);

bool all_finite(const Matrix& m);
bool all_finite(const SparseMatrix& m);

// Row selection; duplicates allowed. Out-of-range indices throw DataError.
Matrix take_rows(const Matrix& m, std::span<const std::size_t> idx);
SparseMatrix take_rows(const SparseMatrix& m, std::span<const std::size_t> idx);
Documents take_rows(const Documents& d, std::span<const std::size_t> idx);
Data take_rows(const Data& d, std::span<const std::size_t> idx);
std::vector<double> take(std::span<const double> v, std::span<const std::size_t> idx);

// Column selection in the given order.
Matrix take_cols(const Matrix& m, std::span<const std::size_t> idx);
SparseMatrix take_cols(const SparseMatrix& m, std::span<const std::size_t> idx);

// Horizontal concatenation. The result is sparse iff any block is sparse.
// Throws DataError on row-count mismatch, empty input, or document blocks.
Data hstack(std::span<const Data> blocks);

Matrix vstack(const Matrix& top, const Matrix& bottom);
SparseMatrix vstack(const SparseMatrix& top, const SparseMatrix& bottom);

}  // namespace estkit
