#include "estkit/transformers.hpp"

#include <Eigen/Dense>
#include <bit>
#include <limits>
#include <numeric>

#include "builtins.hpp"
#include "common.hpp"

namespace estkit {

namespace {

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Eigen::Map<const RowMajor> as_eigen(const Matrix& m) {
  return {m.values().data(), static_cast<Eigen::Index>(m.rows()),
          static_cast<Eigen::Index>(m.cols())};
}

// ---------------------------------------------------------------------------
// StandardScaler

FittedState scaler_fit(const Estimator& self, const Data& X, std::span<const double>) {
  const bool with_mean = detail::bool_param(self, "with_mean");
  const bool with_std = detail::bool_param(self, "with_std");
  if (is_sparse(X) && with_mean) {
    throw DataError(
        "StandardScaler cannot center sparse input (centering would densify it); "
        "use with_mean=false");
  }
  const Matrix dense = to_dense(X);
  const std::size_t n = dense.rows();
  const std::size_t p = dense.cols();
  std::vector<double> mean(p, 0.0), var(p, 0.0), scale(p, 1.0);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < p; ++c) mean[c] += dense(r, c);
  }
  for (auto& m : mean) m /= static_cast<double>(n);
  // Corrected two-pass: the residual sum fixes the rounding of the first
  // mean and enters the variance as well.
  std::vector<double> residual(p, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < p; ++c) {
      const double d = dense(r, c) - mean[c];
      residual[c] += d;
      var[c] += d * d;
    }
  }
  const double eps = std::numeric_limits<double>::epsilon();
  const double nd = static_cast<double>(n);
  for (std::size_t c = 0; c < p; ++c) {
    var[c] = std::max(0.0, (var[c] - residual[c] * residual[c] / nd) / nd);
    mean[c] += residual[c] / nd;
    // Variance indistinguishable from the rounding error of the mean is
    // treated as zero.
    const double bound = nd * eps * var[c] + (nd * mean[c] * eps) * (nd * mean[c] * eps);
    if (var[c] <= bound) var[c] = 0.0;
    if (with_std && var[c] > 0) scale[c] = std::sqrt(var[c]);
  }
  FittedState state;
  state.set_vector("mean_", std::move(mean));
  state.set_vector("var_", std::move(var));
  state.set_vector("scale_", std::move(scale));
  return state;
}

Data scaler_transform(const Estimator& self, const Data& X) {
  const auto& state = self.state();
  const bool with_mean = detail::bool_param(self, "with_mean");
  const auto mean = state.vector("mean_");
  const auto scale = state.vector("scale_");
  if (const auto* s = std::get_if<SparseMatrix>(&X)) {
    if (with_mean) {
      throw DataError("StandardScaler cannot center sparse input; use with_mean=false");
    }
    std::vector<Triplet> triplets = s->triplets();
    for (auto& t : triplets) t.value /= scale[t.col];
    return csr_from_triplets(triplets, s->rows(), s->cols());
  }
  const auto& m = std::get<Matrix>(X);
  std::vector<double> out(m.values().begin(), m.values().end());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) {
      double& v = out[r * m.cols() + c];
      if (with_mean) v -= mean[c];
      v /= scale[c];
    }
  }
  return Matrix(m.rows(), m.cols(), std::move(out));
}

// ---------------------------------------------------------------------------
// SelectKBest

FittedState select_fit(const Estimator& self, const Data& X, std::span<const double> y) {
  const Matrix dense = to_dense(X);
  auto scores = anova_f_scores(dense, y);
  const auto k = static_cast<std::size_t>(detail::int_param(self, "k"));

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  order.resize(std::min(k, order.size()));
  std::sort(order.begin(), order.end());

  FittedState state;
  state.set_vector("scores_", std::move(scores));
  state.set_vector("selected_", std::vector<double>(order.begin(), order.end()));
  return state;
}

Data select_transform(const Estimator& self, const Data& X) {
  const auto sel = self.state().vector("selected_");
  std::vector<std::size_t> cols(sel.begin(), sel.end());
  if (const auto* s = std::get_if<SparseMatrix>(&X)) return take_cols(*s, cols);
  return take_cols(std::get<Matrix>(X), cols);
}

// ---------------------------------------------------------------------------
// PCA

FittedState pca_fit(const Estimator& self, const Data& X, std::span<const double>) {
  if (is_sparse(X)) throw DataError("PCA requires dense input");
  const auto& m = std::get<Matrix>(X);
  const std::size_t n = m.rows();
  const std::size_t p = m.cols();
  if (n < 2) throw DataError("PCA needs at least 2 samples");
  const std::size_t max_components = std::min(n, p);
  const auto& nc = self.params().at("n_components");
  const std::size_t k = nc.is_none() ? max_components : static_cast<std::size_t>(nc.as_int());
  if (k > max_components) {
    throw ParamError("PCA: n_components=" + std::to_string(k) + " exceeds min(n_samples, " +
                     "n_features)=" + std::to_string(max_components));
  }

  std::vector<double> mean(p, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < p; ++c) mean[c] += m(r, c);
  }
  for (auto& v : mean) v /= static_cast<double>(n);

  RowMajor centered = as_eigen(m);
  for (std::size_t c = 0; c < p; ++c) {
    centered.col(static_cast<Eigen::Index>(c)).array() -= mean[c];
  }
  Eigen::BDCSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinV);
  const auto& sigma = svd.singularValues();
  const auto& V = svd.matrixV();

  const double dof = static_cast<double>(n - 1);
  double total_variance = 0;
  for (Eigen::Index i = 0; i < sigma.size(); ++i) total_variance += sigma[i] * sigma[i] / dof;

  std::vector<double> components(k * p), explained(k), ratio(k), singular(k);
  for (std::size_t i = 0; i < k; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    std::span<double> row(components.data() + i * p, p);
    for (std::size_t c = 0; c < p; ++c) row[c] = V(static_cast<Eigen::Index>(c), ii);
    detail::fix_sign(row);
    singular[i] = sigma[ii];
    explained[i] = sigma[ii] * sigma[ii] / dof;
    ratio[i] = total_variance > 0 ? explained[i] / total_variance : 0.0;
  }

  FittedState state;
  state.set_vector("mean_", std::move(mean));
  state.set_matrix("components_", Matrix(k, p, std::move(components)));
  state.set_vector("explained_variance_", std::move(explained));
  state.set_vector("explained_variance_ratio_", std::move(ratio));
  state.set_vector("singular_values_", std::move(singular));
  return state;
}

Data pca_transform(const Estimator& self, const Data& X) {
  if (is_sparse(X)) throw DataError("PCA requires dense input");
  const auto& m = std::get<Matrix>(X);
  const auto& state = self.state();
  const auto mean = state.vector("mean_");
  const Matrix comp = state.matrix("components_");
  const std::size_t k = comp.rows();
  std::vector<double> out(m.rows() * k, 0.0);
  std::vector<double> centered(m.cols());
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) centered[c] = m(r, c) - mean[c];
    for (std::size_t i = 0; i < k; ++i) out[r * k + i] = detail::dot(centered, comp.row(i));
  }
  return Matrix(m.rows(), k, std::move(out));
}

// ---------------------------------------------------------------------------
// KernelPCA

Matrix kernel_matrix(const std::string& kernel, const Matrix& A, const Matrix& B, double gamma) {
  return kernel == "rbf" ? rbf_kernel(A, B, gamma) : linear_kernel(A, B);
}

FittedState kpca_fit(const Estimator& self, const Data& X, std::span<const double>) {
  const Matrix m = to_dense(X);
  const std::size_t n = m.rows();
  const auto& kernel = detail::string_param(self, "kernel");
  const auto& g = self.params().at("gamma");
  const double gamma = g.is_none() ? 1.0 / static_cast<double>(m.cols()) : g.as_real();
  const auto& nc = self.params().at("n_components");
  if (!nc.is_none() && static_cast<std::size_t>(nc.as_int()) > n) {
    throw ParamError("KernelPCA: n_components=" + std::to_string(nc.as_int()) +
                     " exceeds n_samples=" + std::to_string(n));
  }

  const Matrix K = kernel_matrix(kernel, m, m, gamma);
  std::vector<double> col_mean(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) col_mean[j] += K(i, j);
  }
  for (auto& v : col_mean) v /= static_cast<double>(n);
  const double grand =
      std::accumulate(col_mean.begin(), col_mean.end(), 0.0) / static_cast<double>(n);

  Eigen::MatrixXd centered(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      centered(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          K(i, j) - col_mean[i] - col_mean[j] + grand;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(centered);
  const auto& values = eig.eigenvalues();  // ascending
  const auto& vectors = eig.eigenvectors();

  const double lambda_max = values[static_cast<Eigen::Index>(n) - 1];
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = static_cast<Eigen::Index>(n) - 1; i >= 0; --i) {
    if (values[i] > 0 && values[i] > 1e-10 * lambda_max) keep.push_back(i);
  }
  if (!(lambda_max > 0) || keep.empty()) {
    throw FitError("KernelPCA: degenerate kernel (no positive eigenvalue after centering)");
  }
  if (!nc.is_none()) keep.resize(std::min(keep.size(), static_cast<std::size_t>(nc.as_int())));

  const std::size_t k = keep.size();
  std::vector<double> alphas(n * k), lambdas(k);
  std::vector<double> column(n);
  for (std::size_t c = 0; c < k; ++c) {
    for (std::size_t i = 0; i < n; ++i) column[i] = vectors(static_cast<Eigen::Index>(i), keep[c]);
    detail::fix_sign(column);
    for (std::size_t i = 0; i < n; ++i) alphas[i * k + c] = column[i];
    lambdas[c] = values[keep[c]];
  }

  FittedState state;
  state.set_matrix("X_fit_", m);
  state.set_matrix("alphas_", Matrix(n, k, std::move(alphas)));
  state.set_vector("lambdas_", std::move(lambdas));
  state.set_vector("K_fit_rows_", std::move(col_mean));
  state.set_scalar("K_fit_all_", grand);
  state.set_scalar("gamma_", gamma);
  return state;
}

Data kpca_transform(const Estimator& self, const Data& X) {
  const Matrix z = to_dense(X);
  const auto& state = self.state();
  const Matrix fit_x = state.matrix("X_fit_");
  const Matrix alphas = state.matrix("alphas_");
  const auto lambdas = state.vector("lambdas_");
  const auto fit_rows = state.vector("K_fit_rows_");
  const double fit_all = state.scalar("K_fit_all_");
  const Matrix K =
      kernel_matrix(detail::string_param(self, "kernel"), z, fit_x, state.scalar("gamma_"));

  const std::size_t n = fit_x.rows();
  const std::size_t k = alphas.cols();
  std::vector<double> out(z.rows() * k, 0.0);
  std::vector<double> centered(n);
  for (std::size_t r = 0; r < z.rows(); ++r) {
    double row_mean = 0;
    for (std::size_t j = 0; j < n; ++j) row_mean += K(r, j);
    row_mean /= static_cast<double>(n);
    for (std::size_t j = 0; j < n; ++j) centered[j] = K(r, j) - row_mean - fit_rows[j] + fit_all;
    for (std::size_t c = 0; c < k; ++c) {
      double s = 0;
      for (std::size_t j = 0; j < n; ++j) s += centered[j] * alphas(j, c);
      out[r * k + c] = s / std::sqrt(lambdas[c]);
    }
  }
  return Matrix(z.rows(), k, std::move(out));
}

// ---------------------------------------------------------------------------
// HashingVectorizer

Data hashing_transform(const Estimator& self, const Data& X) {
  const auto& docs = std::get<Documents>(X);
  const auto n_features = static_cast<std::uint32_t>(detail::int_param(self, "n_features"));
  const std::uint32_t mask = n_features - 1;
  const int sign_shift = std::countr_zero(n_features);

  std::vector<Triplet> triplets;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    for (const auto& token : docs[i]) {
      const std::uint32_t h = fnv1a_32(token);
      const double sign = ((h >> sign_shift) & 1u) == 0 ? 1.0 : -1.0;
      triplets.push_back({i, h & mask, sign});
    }
  }
  SparseMatrix counts = csr_from_triplets(triplets, docs.size(), n_features);
  if (detail::string_param(self, "norm") == "none") return counts;

  std::vector<double> data(counts.data().begin(), counts.data().end());
  for (std::size_t r = 0; r < counts.rows(); ++r) {
    const auto values = counts.row_values(r);
    const double norm = std::sqrt(detail::dot(values, values));
    if (norm == 0) continue;
    for (std::size_t k = counts.indptr()[r]; k < counts.indptr()[r + 1]; ++k) data[k] /= norm;
  }
  return SparseMatrix(counts.rows(), counts.cols(),
                      std::vector<std::size_t>(counts.indptr().begin(), counts.indptr().end()),
                      std::vector<std::size_t>(counts.indices().begin(), counts.indices().end()),
                      std::move(data));
}

}  // namespace

std::vector<double> anova_f_scores(const Matrix& X, std::span<const double> y) {
  if (y.size() != X.rows()) throw DataError("anova_f_scores: y length does not match X");
  const auto classes = detail::unique_sorted(y);
  const std::size_t K = classes.size();
  if (K < 2) throw FitError("ANOVA F-test needs at least 2 classes");
  const std::size_t n = X.rows();
  const std::size_t p = X.cols();

  std::vector<std::size_t> label(n);
  std::vector<double> counts(K, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    label[i] = detail::class_index(classes, y[i]);
    counts[label[i]] += 1;
  }

  std::vector<double> scores(p);
  std::vector<double> class_mean(K);
  for (std::size_t c = 0; c < p; ++c) {
    double mean = 0;
    std::fill(class_mean.begin(), class_mean.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      mean += X(i, c);
      class_mean[label[i]] += X(i, c);
    }
    mean /= static_cast<double>(n);
    for (std::size_t g = 0; g < K; ++g) class_mean[g] /= counts[g];

    double between = 0;
    for (std::size_t g = 0; g < K; ++g) {
      between += counts[g] * (class_mean[g] - mean) * (class_mean[g] - mean);
    }
    double within = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = X(i, c) - class_mean[label[i]];
      within += d * d;
    }
    if (within == 0 || n == K) {
      scores[c] = between > 0 ? std::numeric_limits<double>::infinity() : 0.0;
    } else {
      scores[c] = (between / static_cast<double>(K - 1)) / (within / static_cast<double>(n - K));
    }
  }
  return scores;
}

std::uint32_t fnv1a_32(std::string_view bytes) {
  std::uint32_t h = 2166136261u;
  for (unsigned char b : bytes) {
    h ^= b;
    h *= 16777619u;
  }
  return h;
}

Matrix rbf_kernel(const Matrix& A, const Matrix& B, double gamma) {
  std::vector<double> out(A.rows() * B.rows());
  for (std::size_t i = 0; i < A.rows(); ++i) {
    for (std::size_t j = 0; j < B.rows(); ++j) {
      out[i * B.rows() + j] = std::exp(-gamma * detail::squared_distance(A.row(i), B.row(j)));
    }
  }
  return Matrix(A.rows(), B.rows(), std::move(out));
}

Matrix linear_kernel(const Matrix& A, const Matrix& B) {
  std::vector<double> out(A.rows() * B.rows());
  for (std::size_t i = 0; i < A.rows(); ++i) {
    for (std::size_t j = 0; j < B.rows(); ++j) {
      out[i * B.rows() + j] = detail::dot(A.row(i), B.row(j));
    }
  }
  return Matrix(A.rows(), B.rows(), std::move(out));
}

namespace detail {

void register_transformers(Registry& registry) {
  Capabilities transformer;
  transformer.transformer = true;

  {
    KindInfo info;
    info.name = "StandardScaler";
    info.schema = {{"with_mean", ParamType::boolean, true},
                   {"with_std", ParamType::boolean, true}};
    info.capabilities = transformer;
    info.fit = scaler_fit;
    info.transform = scaler_transform;
    registry.add(std::move(info));
  }
  {
    KindInfo info;
    info.name = "SelectKBest";
    info.schema = {{"k", ParamType::integer, 10}};
    info.capabilities = transformer;
    info.capabilities.supervised = true;
    info.validate = [](const Estimator& e) {
      if (int_param(e, "k") <= 0) {
        throw ParamError("SelectKBest: k must be positive, got " + std::to_string(int_param(e, "k")));
      }
    };
    info.fit = select_fit;
    info.transform = select_transform;
    registry.add(std::move(info));
  }
  {
    KindInfo info;
    info.name = "PCA";
    info.schema = {{"n_components", ParamType::integer, nullptr, true}};
    info.capabilities = transformer;
    info.validate = [](const Estimator& e) {
      const auto& nc = e.params().at("n_components");
      if (!nc.is_none() && nc.as_int() <= 0) {
        throw ParamError("PCA: n_components must be positive");
      }
    };
    info.fit = pca_fit;
    info.transform = pca_transform;
    registry.add(std::move(info));
  }
  {
    KindInfo info;
    info.name = "KernelPCA";
    info.schema = {{"n_components", ParamType::integer, nullptr, true},
                   {"kernel", ParamType::string, "linear"},
                   {"gamma", ParamType::real, nullptr, true}};
    info.capabilities = transformer;
    info.validate = [](const Estimator& e) {
      require_choice(e, "kernel", {"linear", "rbf"});
      require_positive(e, "gamma");
      const auto& nc = e.params().at("n_components");
      if (!nc.is_none() && nc.as_int() <= 0) {
        throw ParamError("KernelPCA: n_components must be positive");
      }
    };
    info.fit = kpca_fit;
    info.transform = kpca_transform;
    registry.add(std::move(info));
  }
  {
    KindInfo info;
    info.name = "HashingVectorizer";
    info.schema = {{"n_features", ParamType::integer, std::int64_t{1} << 20},
                   {"norm", ParamType::string, "l2"}};
    info.capabilities = transformer;
    info.capabilities.input = InputKind::documents;
    info.validate = [](const Estimator& e) {
      const auto n = int_param(e, "n_features");
      if (n < 2 || n > (std::int64_t{1} << 31) || !std::has_single_bit(static_cast<std::uint64_t>(n))) {
        throw ParamError("HashingVectorizer: n_features must be a power of two in [2, 2^31], got " +
                         std::to_string(n));
      }
      require_choice(e, "norm", {"l2", "none"});
    };
    info.fit = [](const Estimator&, const Data&, std::span<const double>) { return FittedState(); };
    info.transform = hashing_transform;
    registry.add(std::move(info));
  }
}

}  // namespace detail

}  // namespace estkit
