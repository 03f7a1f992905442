#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "estkit/matrix.hpp"

// Registered predictor kinds:
//
//   LogisticRegression  penalty="l2"|"l1", C=1.0, tol=1e-6, max_iter=1000,
//                       fit_intercept=true
//                       fitted: coef_ (1 x p binary, K x p otherwise),
//                               intercept_, classes_, n_iter_
//   SVC                 C=1.0, kernel="rbf"|"linear", gamma=null (1/n_features),
//                       tol=1e-3, max_iter=100000; binary only
//                       fitted: support_vectors_, support_, dual_coef_,
//                               intercept_, classes_, gamma_
//   KMeans              n_clusters=8, n_init=10, max_iter=300, tol=1e-6,
//                       random_seed=0
//                       fitted: cluster_centers_, inertia_, n_iter_, labels_
//
// The solvers are exposed below so their numerical properties can be
// checked directly.

namespace estkit::solvers {

enum class Penalty { l1, l2 };

// Binary logistic regression with labels in {-1, +1}, written as
//
//   F(w, b) = P(w) / (C n) + (1/n) sum_i log(1 + exp(-y_i (w.x_i + b)))
//
// with P(w) = |w|_2^2 / 2 or |w|_1. F is the textbook objective P + C*loss
// divided by C*n, so both have the same minimizer. theta is w followed by b
// when fit_intercept is set.
class LogisticObjective {
 public:
  LogisticObjective(const Data& X, std::span<const double> y_pm, double C, Penalty penalty,
                    bool fit_intercept);

  std::size_t n_params() const { return n_features_ + (fit_intercept_ ? 1 : 0); }
  std::size_t n_features() const { return n_features_; }
  Penalty penalty() const { return penalty_; }

  // Differentiable part (the loss plus the l2 term) and its gradient.
  double smooth(std::span<const double> theta, std::span<double> grad) const;
  double smooth(std::span<const double> theta) const;
  // l1 term; zero for l2.
  double nonsmooth(std::span<const double> theta) const;
  double value(std::span<const double> theta) const {
    return smooth(theta) + nonsmooth(theta);
  }
  // Weight of the l1 term, |w|_1 * l1_weight().
  double l1_weight() const { return 1.0 / (C_ * static_cast<double>(n_samples_)); }

  // w.x_i + b for every row.
  std::vector<double> margins(std::span<const double> theta) const;

 private:
  Data X_;
  std::vector<double> y_;
  double C_;
  Penalty penalty_;
  bool fit_intercept_;
  std::size_t n_samples_;
  std::size_t n_features_;
};

struct LogisticFit {
  std::vector<double> theta;
  std::vector<double> objective;  // value after every accepted step, starting at theta=0
  int n_iter = 0;
  bool converged = false;
};

// L-BFGS with backtracking for l2, proximal gradient with backtracking for
// l1. Both are monotone in F. Stops when the (proximal) gradient max-norm
// drops below tol.
LogisticFit fit_logistic(const LogisticObjective& objective, double tol, int max_iter);

// Soft-margin SVM dual for labels in {-1, +1} and a precomputed kernel:
//
//   min 1/2 a'Qa - sum a   s.t.  0 <= a_i <= C,  sum y_i a_i = 0
//
// with Q_ij = y_i y_j K_ij. Pairs are chosen by maximal violation with
// second-order gain; stops when the KKT gap is below tol.
struct SmoResult {
  std::vector<double> alpha;
  double b = 0;
  int n_iter = 0;
  bool converged = false;
};

SmoResult smo_solve(const Matrix& K, std::span<const double> y_pm, double C, double tol,
                    int max_iter);

// One k-means run from the given initial centers. Stops when the largest
// center move is below tol, after max_iter updates, or when an update would
// raise the inertia (which only rounding can cause); that update is dropped.
struct LloydResult {
  Matrix centers;
  std::vector<double> labels;
  double inertia = 0;
  int n_iter = 0;
  std::vector<double> inertia_trace;  // at the initial centers, then after every kept update
};

LloydResult lloyd(const Matrix& X, const Matrix& initial_centers, int max_iter, double tol);

// D^2 seeding.
Matrix kmeans_plus_plus(const Matrix& X, std::size_t k, std::uint64_t seed);

// sum_i min_c |x_i - center_c|^2, and the argmin (ties to the lowest index).
double inertia(const Matrix& X, const Matrix& centers, std::vector<double>* labels = nullptr);

}  // namespace estkit::solvers
