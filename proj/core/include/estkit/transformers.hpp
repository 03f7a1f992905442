#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include "estkit/matrix.hpp"

// Registered transformer kinds:
//
//   StandardScaler     with_mean=true, with_std=true
//                      fitted: mean_, var_, scale_
//   SelectKBest        k=10 (ANOVA F-test, supervised)
//                      fitted: scores_, selected_
//   PCA                n_components=null (keep min(n_samples, n_features))
//                      fitted: mean_, components_, explained_variance_,
//                              explained_variance_ratio_, singular_values_
//   KernelPCA          n_components=null, kernel="linear"|"rbf", gamma=null
//                      fitted: X_fit_, alphas_, lambdas_, K_fit_rows_,
//                              K_fit_all_, gamma_
//   HashingVectorizer  n_features=2^20, norm="l2"|"none" (stateless; input is
//                      tokenized Documents, output is sparse)

namespace estkit {

// One-way ANOVA F statistic per column of X for the class labels y. A
// feature with zero within-class variance scores +inf when the class means
// differ and 0 when the feature is constant.
std::vector<double> anova_f_scores(const Matrix& X, std::span<const double> y);

// 32-bit FNV-1a over the raw bytes.
std::uint32_t fnv1a_32(std::string_view bytes);

// exp(-gamma * ||a_i - b_j||^2) for every row pair.
Matrix rbf_kernel(const Matrix& A, const Matrix& B, double gamma);
Matrix linear_kernel(const Matrix& A, const Matrix& B);

}  // namespace estkit
