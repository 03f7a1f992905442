#include "estkit/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "estkit/errors.hpp"

namespace estkit {

namespace {

const std::shared_ptr<const std::vector<double>>& empty_values() {
  static const auto kEmpty = std::make_shared<const std::vector<double>>();
  return kEmpty;
}

void check_index(std::size_t i, std::size_t n) {
  if (i >= n) {
    throw DataError("row index " + std::to_string(i) + " out of range for " +
                    std::to_string(n) + " rows");
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Matrix

Matrix::Matrix() : values_(empty_values()) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols) {
  if (values.size() != rows * cols) {
    throw DataError("matrix of shape " + std::to_string(rows) + "x" + std::to_string(cols) +
                    " needs " + std::to_string(rows * cols) + " values, got " +
                    std::to_string(values.size()));
  }
  values_ = std::make_shared<const std::vector<double>>(std::move(values));
}

Matrix Matrix::zeros(std::size_t rows, std::size_t cols) {
  return Matrix(rows, cols, std::vector<double>(rows * cols, 0.0));
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
  std::vector<std::vector<double>> copy;
  copy.reserve(rows.size());
  for (const auto& r : rows) copy.emplace_back(r);
  return from_rows(copy);
}

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) return Matrix();
  const std::size_t cols = rows.front().size();
  std::vector<double> values;
  values.reserve(rows.size() * cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != cols) {
      throw DataError("ragged row " + std::to_string(i) + ": expected " + std::to_string(cols) +
                      " values, got " + std::to_string(rows[i].size()));
    }
    values.insert(values.end(), rows[i].begin(), rows[i].end());
  }
  return Matrix(rows.size(), cols, std::move(values));
}

Matrix Matrix::column(std::span<const double> values) {
  return Matrix(values.size(), 1, std::vector<double>(values.begin(), values.end()));
}

std::vector<double> Matrix::col(std::size_t c) const {
  std::vector<double> out(rows_);
  for (std::size_t r = 0; r < rows_; ++r) out[r] = (*this)(r, c);
  return out;
}

bool Matrix::operator==(const Matrix& other) const {
  return rows_ == other.rows_ && cols_ == other.cols_ && *values_ == *other.values_;
}

// ---------------------------------------------------------------------------
// SparseMatrix

SparseMatrix::SparseMatrix()
    : storage_(std::make_shared<const Storage>(Storage{{0}, {}, {}})) {}

SparseMatrix::SparseMatrix(std::size_t rows, std::size_t cols, std::vector<std::size_t> indptr,
                           std::vector<std::size_t> indices, std::vector<double> data)
    : rows_(rows), cols_(cols) {
  if (indptr.size() != rows + 1 || indptr.front() != 0) {
    throw DataError("CSR indptr must have n_rows+1 entries starting at 0");
  }
  if (indices.size() != data.size() || indptr.back() != data.size()) {
    throw DataError("CSR indptr/indices/data lengths disagree");
  }
  for (std::size_t r = 0; r < rows; ++r) {
    if (indptr[r + 1] < indptr[r]) throw DataError("CSR indptr must be non-decreasing");
    for (std::size_t k = indptr[r]; k < indptr[r + 1]; ++k) {
      if (indices[k] >= cols) {
        throw DataError("CSR column index " + std::to_string(indices[k]) + " out of range");
      }
      if (k > indptr[r] && indices[k] <= indices[k - 1]) {
        throw DataError("CSR column indices must be strictly increasing within a row");
      }
      if (data[k] == 0.0) throw DataError("CSR must not store explicit zeros");
    }
  }
  storage_ = std::make_shared<const Storage>(
      Storage{std::move(indptr), std::move(indices), std::move(data)});
}

SparseMatrix SparseMatrix::from_dense(const Matrix& dense) {
  std::vector<std::size_t> indptr{0};
  std::vector<std::size_t> indices;
  std::vector<double> data;
  for (std::size_t r = 0; r < dense.rows(); ++r) {
    for (std::size_t c = 0; c < dense.cols(); ++c) {
      const double v = dense(r, c);
      if (v != 0.0) {
        indices.push_back(c);
        data.push_back(v);
      }
    }
    indptr.push_back(indices.size());
  }
  return SparseMatrix(dense.rows(), dense.cols(), std::move(indptr), std::move(indices),
                      std::move(data));
}

std::span<const std::size_t> SparseMatrix::row_indices(std::size_t r) const {
  const auto& s = *storage_;
  return std::span<const std::size_t>(s.indices).subspan(s.indptr[r],
                                                         s.indptr[r + 1] - s.indptr[r]);
}

std::span<const double> SparseMatrix::row_values(std::size_t r) const {
  const auto& s = *storage_;
  return std::span<const double>(s.data).subspan(s.indptr[r], s.indptr[r + 1] - s.indptr[r]);
}

std::vector<Triplet> SparseMatrix::triplets() const {
  std::vector<Triplet> out;
  out.reserve(nnz());
  for (std::size_t r = 0; r < rows_; ++r) {
    auto idx = row_indices(r);
    auto val = row_values(r);
    for (std::size_t k = 0; k < idx.size(); ++k) out.push_back({r, idx[k], val[k]});
  }
  return out;
}

Matrix SparseMatrix::to_dense() const {
  std::vector<double> values(rows_ * cols_, 0.0);
  for (std::size_t r = 0; r < rows_; ++r) {
    auto idx = row_indices(r);
    auto val = row_values(r);
    for (std::size_t k = 0; k < idx.size(); ++k) values[r * cols_ + idx[k]] = val[k];
  }
  return Matrix(rows_, cols_, std::move(values));
}

bool SparseMatrix::operator==(const SparseMatrix& other) const {
  return rows_ == other.rows_ && cols_ == other.cols_ &&
         storage_->indptr == other.storage_->indptr &&
         storage_->indices == other.storage_->indices && storage_->data == other.storage_->data;
}

SparseMatrix csr_from_triplets(std::span<const Triplet> triplets, std::size_t rows,
                               std::size_t cols) {
  for (const auto& t : triplets) {
    if (t.row >= rows || t.col >= cols) {
      throw DataError("triplet (" + std::to_string(t.row) + ", " + std::to_string(t.col) +
                      ") out of bounds for shape " + std::to_string(rows) + "x" +
                      std::to_string(cols));
    }
  }
  // Stable order keeps the summation order of duplicates equal to input order.
  std::vector<std::size_t> order(triplets.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    const auto& ta = triplets[a];
    const auto& tb = triplets[b];
    return ta.row != tb.row ? ta.row < tb.row : ta.col < tb.col;
  });

  std::vector<std::size_t> indptr(rows + 1, 0);
  std::vector<std::size_t> indices;
  std::vector<double> data;
  std::size_t k = 0;
  while (k < order.size()) {
    const auto& first = triplets[order[k]];
    double sum = 0.0;
    std::size_t j = k;
    while (j < order.size() && triplets[order[j]].row == first.row &&
           triplets[order[j]].col == first.col) {
      sum += triplets[order[j]].value;
      ++j;
    }
    if (sum != 0.0) {
      indices.push_back(first.col);
      data.push_back(sum);
      ++indptr[first.row + 1];
    }
    k = j;
  }
  std::partial_sum(indptr.begin(), indptr.end(), indptr.begin());
  return SparseMatrix(rows, cols, std::move(indptr), std::move(indices), std::move(data));
}

// ---------------------------------------------------------------------------
// Documents

Documents::Documents() : docs_(std::make_shared<const std::vector<Document>>()) {}

Documents::Documents(std::vector<Document> docs)
    : docs_(std::make_shared<const std::vector<Document>>(std::move(docs))) {}

Documents::Documents(std::initializer_list<Document> docs)
    : Documents(std::vector<Document>(docs)) {}

// ---------------------------------------------------------------------------
// Data helpers

std::size_t n_rows(const Data& data) {
  return std::visit(
      [](const auto& d) -> std::size_t {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Documents>) {
          return d.size();
        } else {
          return d.rows();
        }
      },
      data);
}

std::size_t n_cols(const Data& data) {
  if (const auto* m = std::get_if<Matrix>(&data)) return m->cols();
  if (const auto* s = std::get_if<SparseMatrix>(&data)) return s->cols();
  throw DataError("documents have no feature columns; vectorize them first");
}

bool is_sparse(const Data& data) { return std::holds_alternative<SparseMatrix>(data); }

bool is_matrix(const Data& data) { return !std::holds_alternative<Documents>(data); }

Matrix to_dense(const Data& data) {
  if (const auto* m = std::get_if<Matrix>(&data)) return *m;
  if (const auto* s = std::get_if<SparseMatrix>(&data)) return s->to_dense();
  throw DataError("expected a numeric matrix, got raw documents");
}

bool all_finite(const Matrix& m) {
  const auto v = m.values();
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

bool all_finite(const SparseMatrix& m) {
  const auto v = m.data();
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

Matrix take_rows(const Matrix& m, std::span<const std::size_t> idx) {
  std::vector<double> values;
  values.reserve(idx.size() * m.cols());
  for (std::size_t i : idx) {
    check_index(i, m.rows());
    auto r = m.row(i);
    values.insert(values.end(), r.begin(), r.end());
  }
  return Matrix(idx.size(), m.cols(), std::move(values));
}

SparseMatrix take_rows(const SparseMatrix& m, std::span<const std::size_t> idx) {
  std::vector<std::size_t> indptr{0};
  std::vector<std::size_t> indices;
  std::vector<double> data;
  for (std::size_t i : idx) {
    check_index(i, m.rows());
    auto ri = m.row_indices(i);
    auto rv = m.row_values(i);
    indices.insert(indices.end(), ri.begin(), ri.end());
    data.insert(data.end(), rv.begin(), rv.end());
    indptr.push_back(indices.size());
  }
  return SparseMatrix(idx.size(), m.cols(), std::move(indptr), std::move(indices),
                      std::move(data));
}

Documents take_rows(const Documents& d, std::span<const std::size_t> idx) {
  std::vector<Document> out;
  out.reserve(idx.size());
  for (std::size_t i : idx) {
    check_index(i, d.size());
    out.push_back(d[i]);
  }
  return Documents(std::move(out));
}

Data take_rows(const Data& d, std::span<const std::size_t> idx) {
  return std::visit([&](const auto& v) -> Data { return take_rows(v, idx); }, d);
}

std::vector<double> take(std::span<const double> v, std::span<const std::size_t> idx) {
  std::vector<double> out;
  out.reserve(idx.size());
  for (std::size_t i : idx) {
    check_index(i, v.size());
    out.push_back(v[i]);
  }
  return out;
}

Matrix take_cols(const Matrix& m, std::span<const std::size_t> idx) {
  for (std::size_t c : idx) {
    if (c >= m.cols()) throw DataError("column index " + std::to_string(c) + " out of range");
  }
  std::vector<double> values;
  values.reserve(m.rows() * idx.size());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c : idx) values.push_back(m(r, c));
  }
  return Matrix(m.rows(), idx.size(), std::move(values));
}

SparseMatrix take_cols(const SparseMatrix& m, std::span<const std::size_t> idx) {
  std::vector<Triplet> triplets;
  std::vector<std::vector<std::size_t>> targets(m.cols());
  for (std::size_t j = 0; j < idx.size(); ++j) {
    if (idx[j] >= m.cols()) {
      throw DataError("column index " + std::to_string(idx[j]) + " out of range");
    }
    targets[idx[j]].push_back(j);
  }
  for (const auto& t : m.triplets()) {
    for (std::size_t j : targets[t.col]) triplets.push_back({t.row, j, t.value});
  }
  return csr_from_triplets(triplets, m.rows(), idx.size());
}

Data hstack(std::span<const Data> blocks) {
  if (blocks.empty()) throw DataError("hstack needs at least one block");
  const std::size_t rows = n_rows(blocks.front());
  bool any_sparse = false;
  std::size_t total_cols = 0;
  for (const auto& b : blocks) {
    if (!is_matrix(b)) throw DataError("hstack accepts numeric matrices only");
    if (n_rows(b) != rows) {
      throw DataError("hstack row-count mismatch: " + std::to_string(rows) + " vs " +
                      std::to_string(n_rows(b)));
    }
    any_sparse = any_sparse || is_sparse(b);
    total_cols += n_cols(b);
  }
  if (blocks.size() == 1) return blocks.front();

  if (!any_sparse) {
    std::vector<double> values;
    values.reserve(rows * total_cols);
    for (std::size_t r = 0; r < rows; ++r) {
      for (const auto& b : blocks) {
        auto row = std::get<Matrix>(b).row(r);
        values.insert(values.end(), row.begin(), row.end());
      }
    }
    return Matrix(rows, total_cols, std::move(values));
  }

  std::vector<SparseMatrix> sparse;
  sparse.reserve(blocks.size());
  for (const auto& b : blocks) {
    if (const auto* s = std::get_if<SparseMatrix>(&b)) {
      sparse.push_back(*s);
    } else {
      sparse.push_back(SparseMatrix::from_dense(std::get<Matrix>(b)));
    }
  }
  std::vector<std::size_t> indptr{0};
  std::vector<std::size_t> indices;
  std::vector<double> data;
  for (std::size_t r = 0; r < rows; ++r) {
    std::size_t offset = 0;
    for (const auto& s : sparse) {
      auto ri = s.row_indices(r);
      auto rv = s.row_values(r);
      for (std::size_t k = 0; k < ri.size(); ++k) {
        indices.push_back(ri[k] + offset);
        data.push_back(rv[k]);
      }
      offset += s.cols();
    }
    indptr.push_back(indices.size());
  }
  return SparseMatrix(rows, total_cols, std::move(indptr), std::move(indices), std::move(data));
}

Matrix vstack(const Matrix& top, const Matrix& bottom) {
  if (top.rows() == 0) return bottom;
  if (bottom.rows() == 0) return top;
  if (top.cols() != bottom.cols()) throw DataError("vstack column-count mismatch");
  std::vector<double> values(top.values().begin(), top.values().end());
  values.insert(values.end(), bottom.values().begin(), bottom.values().end());
  return Matrix(top.rows() + bottom.rows(), top.cols(), std::move(values));
}

SparseMatrix vstack(const SparseMatrix& top, const SparseMatrix& bottom) {
  if (top.cols() != bottom.cols()) throw DataError("vstack column-count mismatch");
  std::vector<std::size_t> indptr(top.indptr().begin(), top.indptr().end());
  for (std::size_t k = 1; k < bottom.indptr().size(); ++k) {
    indptr.push_back(top.nnz() + bottom.indptr()[k]);
  }
  std::vector<std::size_t> indices(top.indices().begin(), top.indices().end());
  indices.insert(indices.end(), bottom.indices().begin(), bottom.indices().end());
  std::vector<double> data(top.data().begin(), top.data().end());
  data.insert(data.end(), bottom.data().begin(), bottom.data().end());
  return SparseMatrix(top.rows() + bottom.rows(), top.cols(), std::move(indptr),
                      std::move(indices), std::move(data));
}

}  // namespace estkit
