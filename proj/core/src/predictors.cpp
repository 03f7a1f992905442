#include "estkit/predictors.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>

#include "builtins.hpp"
#include "common.hpp"
#include "estkit/random.hpp"
#include "estkit/transformers.hpp"

namespace estkit {

namespace {

double row_dot(const Data& X, std::size_t r, std::span<const double> w) {
  if (const auto* s = std::get_if<SparseMatrix>(&X)) {
    const auto idx = s->row_indices(r);
    const auto val = s->row_values(r);
    double sum = 0;
    for (std::size_t k = 0; k < idx.size(); ++k) sum += val[k] * w[idx[k]];
    return sum;
  }
  return detail::dot(std::get<Matrix>(X).row(r), w);
}

// out += a * x_r
void row_axpy(const Data& X, std::size_t r, double a, std::span<double> out) {
  if (const auto* s = std::get_if<SparseMatrix>(&X)) {
    const auto idx = s->row_indices(r);
    const auto val = s->row_values(r);
    for (std::size_t k = 0; k < idx.size(); ++k) out[idx[k]] += a * val[k];
    return;
  }
  const auto row = std::get<Matrix>(X).row(r);
  for (std::size_t c = 0; c < row.size(); ++c) out[c] += a * row[c];
}

// log(1 + exp(-z)) without overflow.
double log1pexp_neg(double z) {
  return z > 0 ? std::log1p(std::exp(-z)) : -z + std::log1p(std::exp(z));
}

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double max_abs(std::span<const double> v) {
  double m = 0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

namespace solvers {

LogisticObjective::LogisticObjective(const Data& X, std::span<const double> y_pm, double C,
                                     Penalty penalty, bool fit_intercept)
    : X_(X),
      y_(y_pm.begin(), y_pm.end()),
      C_(C),
      penalty_(penalty),
      fit_intercept_(fit_intercept),
      n_samples_(n_rows(X)),
      n_features_(n_cols(X)) {
  if (y_.size() != n_samples_) throw DataError("logistic: y length does not match X");
}

std::vector<double> LogisticObjective::margins(std::span<const double> theta) const {
  const auto w = theta.first(n_features_);
  const double b = fit_intercept_ ? theta[n_features_] : 0.0;
  std::vector<double> out(n_samples_);
  for (std::size_t i = 0; i < n_samples_; ++i) out[i] = row_dot(X_, i, w) + b;
  return out;
}

double LogisticObjective::smooth(std::span<const double> theta, std::span<double> grad) const {
  const double n = static_cast<double>(n_samples_);
  const auto m = margins(theta);
  std::fill(grad.begin(), grad.end(), 0.0);
  double loss = 0;
  for (std::size_t i = 0; i < n_samples_; ++i) {
    const double z = y_[i] * m[i];
    loss += log1pexp_neg(z);
    // d/dm log(1 + exp(-y m)) = -y sigmoid(-z)
    const double d = -y_[i] * sigmoid(-z) / n;
    row_axpy(X_, i, d, grad.first(n_features_));
    if (fit_intercept_) grad[n_features_] += d;
  }
  double value = loss / n;
  if (penalty_ == Penalty::l2) {
    const double lambda = 1.0 / (C_ * n);
    for (std::size_t c = 0; c < n_features_; ++c) {
      value += 0.5 * lambda * theta[c] * theta[c];
      grad[c] += lambda * theta[c];
    }
  }
  return value;
}

double LogisticObjective::smooth(std::span<const double> theta) const {
  std::vector<double> grad(n_params());
  return smooth(theta, grad);
}

double LogisticObjective::nonsmooth(std::span<const double> theta) const {
  if (penalty_ != Penalty::l1) return 0.0;
  double s = 0;
  for (std::size_t c = 0; c < n_features_; ++c) s += std::abs(theta[c]);
  return s * l1_weight();
}

namespace {

LogisticFit lbfgs(const LogisticObjective& f, double tol, int max_iter) {
  constexpr std::size_t memory = 10;
  const std::size_t d = f.n_params();
  LogisticFit out;
  out.theta.assign(d, 0.0);
  std::vector<double> grad(d), trial(d), trial_grad(d), dir(d);
  double value = f.smooth(out.theta, grad);
  out.objective.push_back(value);

  std::deque<std::vector<double>> S, Y;
  std::deque<double> rho;
  while (out.n_iter < max_iter) {
    if (max_abs(grad) < tol) {
      out.converged = true;
      break;
    }
    // Two-loop recursion.
    for (std::size_t c = 0; c < d; ++c) dir[c] = -grad[c];
    std::vector<double> a(S.size());
    for (std::size_t k = S.size(); k-- > 0;) {
      a[k] = rho[k] * detail::dot(S[k], dir);
      for (std::size_t c = 0; c < d; ++c) dir[c] -= a[k] * Y[k][c];
    }
    if (!S.empty()) {
      const double gamma = detail::dot(S.back(), Y.back()) / detail::dot(Y.back(), Y.back());
      for (auto& v : dir) v *= gamma;
    }
    for (std::size_t k = 0; k < S.size(); ++k) {
      const double beta = rho[k] * detail::dot(Y[k], dir);
      for (std::size_t c = 0; c < d; ++c) dir[c] += (a[k] - beta) * S[k][c];
    }
    double slope = detail::dot(grad, dir);
    if (!(slope < 0)) {
      S.clear();
      Y.clear();
      rho.clear();
      for (std::size_t c = 0; c < d; ++c) dir[c] = -grad[c];
      slope = detail::dot(grad, dir);
    }

    double step = 1.0;
    bool accepted = false;
    for (int halvings = 0; halvings < 60; ++halvings, step *= 0.5) {
      for (std::size_t c = 0; c < d; ++c) trial[c] = out.theta[c] + step * dir[c];
      const double trial_value = f.smooth(trial, trial_grad);
      if (trial_value <= value + 1e-4 * step * slope) {
        std::vector<double> s(d), y(d);
        for (std::size_t c = 0; c < d; ++c) {
          s[c] = trial[c] - out.theta[c];
          y[c] = trial_grad[c] - grad[c];
        }
        const double sy = detail::dot(s, y);
        if (sy > 1e-12 * std::sqrt(detail::dot(s, s) * detail::dot(y, y))) {
          S.push_back(std::move(s));
          Y.push_back(std::move(y));
          rho.push_back(1.0 / sy);
          if (S.size() > memory) {
            S.pop_front();
            Y.pop_front();
            rho.pop_front();
          }
        }
        out.theta.swap(trial);
        grad.swap(trial_grad);
        value = trial_value;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;  // no representable decrease left
    ++out.n_iter;
    out.objective.push_back(value);
  }
  return out;
}

// Proximal gradient (ISTA) with backtracking on the step size. Every
// accepted step satisfies the majorization condition, which makes the full
// objective non-increasing.
LogisticFit proximal_gradient(const LogisticObjective& f, double tol, int max_iter) {
  const std::size_t d = f.n_params();
  const std::size_t p = f.n_features();
  LogisticFit out;
  out.theta.assign(d, 0.0);
  std::vector<double> grad(d), trial(d), trial_grad(d);
  double smooth_value = f.smooth(out.theta, grad);
  double value = smooth_value + f.nonsmooth(out.theta);
  out.objective.push_back(value);

  double step = 1.0;
  while (out.n_iter < max_iter) {
    bool accepted = false;
    double mapping_norm = 0;
    for (int halvings = 0; halvings < 60; ++halvings, step *= 0.5) {
      const double threshold = step * f.l1_weight();
      for (std::size_t c = 0; c < d; ++c) {
        const double v = out.theta[c] - step * grad[c];
        trial[c] = c < p ? std::copysign(std::max(std::abs(v) - threshold, 0.0), v) : v;
      }
      const double trial_smooth = f.smooth(trial, trial_grad);
      double linear = 0, quad = 0;
      mapping_norm = 0;
      for (std::size_t c = 0; c < d; ++c) {
        const double delta = trial[c] - out.theta[c];
        linear += grad[c] * delta;
        quad += delta * delta;
        mapping_norm = std::max(mapping_norm, std::abs(delta) / step);
      }
      if (mapping_norm < tol) {
        out.converged = true;
        break;
      }
      const double trial_value = trial_smooth + f.nonsmooth(trial);
      if (trial_smooth <= smooth_value + linear + quad / (2 * step) && trial_value <= value) {
        out.theta.swap(trial);
        grad.swap(trial_grad);
        smooth_value = trial_smooth;
        value = trial_value;
        accepted = true;
        break;
      }
    }
    if (out.converged || !accepted) break;
    ++out.n_iter;
    out.objective.push_back(value);
    step *= 2;  // let the step grow back after a conservative phase
  }
  return out;
}

}  // namespace

LogisticFit fit_logistic(const LogisticObjective& objective, double tol, int max_iter) {
  return objective.penalty() == Penalty::l2 ? lbfgs(objective, tol, max_iter)
                                            : proximal_gradient(objective, tol, max_iter);
}

SmoResult smo_solve(const Matrix& K, std::span<const double> y, double C, double tol,
                    int max_iter) {
  constexpr double tau = 1e-12;
  const std::size_t n = y.size();
  SmoResult out;
  out.alpha.assign(n, 0.0);
  auto& alpha = out.alpha;
  std::vector<double> G(n, -1.0);  // gradient of the dual, Q alpha - 1

  const auto in_up = [&](std::size_t t) {
    return (y[t] > 0 && alpha[t] < C) || (y[t] < 0 && alpha[t] > 0);
  };
  const auto in_low = [&](std::size_t t) {
    return (y[t] > 0 && alpha[t] > 0) || (y[t] < 0 && alpha[t] < C);
  };

  while (out.n_iter < max_iter) {
    double m = -std::numeric_limits<double>::infinity();
    double M = std::numeric_limits<double>::infinity();
    std::size_t i = n;
    for (std::size_t t = 0; t < n; ++t) {
      const double v = -y[t] * G[t];
      if (in_up(t) && v > m) {
        m = v;
        i = t;
      }
      if (in_low(t)) M = std::min(M, v);
    }
    if (i == n || m - M < tol) {
      out.converged = true;
      break;
    }
    std::size_t j = n;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < n; ++t) {
      if (!in_low(t)) continue;
      const double b = m + y[t] * G[t];
      if (b <= 0) continue;
      double a = K(i, i) + K(t, t) - 2 * K(i, t);
      if (a <= 0) a = tau;
      const double gain = -b * b / a;
      if (gain < best) {
        best = gain;
        j = t;
      }
    }
    if (j == n) {
      out.converged = true;
      break;
    }

    const double old_i = alpha[i];
    const double old_j = alpha[j];
    double quad = K(i, i) + K(j, j) - 2 * K(i, j);
    if (quad <= 0) quad = tau;
    if (y[i] != y[j]) {
      const double delta = (-G[i] - G[j]) / quad;
      const double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0) {
        if (alpha[j] < 0) {
          alpha[j] = 0;
          alpha[i] = diff;
        }
      } else if (alpha[i] < 0) {
        alpha[i] = 0;
        alpha[j] = -diff;
      }
      if (diff > 0) {
        if (alpha[i] > C) {
          alpha[i] = C;
          alpha[j] = C - diff;
        }
      } else if (alpha[j] > C) {
        alpha[j] = C;
        alpha[i] = C + diff;
      }
    } else {
      const double delta = (G[i] - G[j]) / quad;
      const double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > C) {
        if (alpha[i] > C) {
          alpha[i] = C;
          alpha[j] = sum - C;
        }
        if (alpha[j] > C) {
          alpha[j] = C;
          alpha[i] = sum - C;
        }
      } else {
        if (alpha[j] < 0) {
          alpha[j] = 0;
          alpha[i] = sum;
        }
        if (alpha[i] < 0) {
          alpha[i] = 0;
          alpha[j] = sum;
        }
      }
    }
    const double di = alpha[i] - old_i;
    const double dj = alpha[j] - old_j;
    for (std::size_t t = 0; t < n; ++t) {
      G[t] += y[t] * (y[i] * K(i, t) * di + y[j] * K(j, t) * dj);
    }
    ++out.n_iter;
  }

  // Bias: average over free vectors, else the midpoint of the feasible band.
  double ub = std::numeric_limits<double>::infinity();
  double lb = -std::numeric_limits<double>::infinity();
  double free_sum = 0;
  std::size_t n_free = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const double yG = y[t] * G[t];
    if (alpha[t] >= C) {
      if (y[t] < 0) ub = std::min(ub, yG); else lb = std::max(lb, yG);
    } else if (alpha[t] <= 0) {
      if (y[t] > 0) ub = std::min(ub, yG); else lb = std::max(lb, yG);
    } else {
      ++n_free;
      free_sum += yG;
    }
  }
  const double r = n_free > 0 ? free_sum / static_cast<double>(n_free) : (ub + lb) / 2;
  out.b = -r;
  return out;
}

double inertia(const Matrix& X, const Matrix& centers, std::vector<double>* labels) {
  if (labels) labels->assign(X.rows(), 0.0);
  double total = 0;
  for (std::size_t i = 0; i < X.rows(); ++i) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t arg = 0;
    for (std::size_t c = 0; c < centers.rows(); ++c) {
      const double d = detail::squared_distance(X.row(i), centers.row(c));
      if (d < best) {
        best = d;
        arg = c;
      }
    }
    total += best;
    if (labels) (*labels)[i] = static_cast<double>(arg);
  }
  return total;
}

Matrix kmeans_plus_plus(const Matrix& X, std::size_t k, std::uint64_t seed) {
  const std::size_t n = X.rows();
  const std::size_t p = X.cols();
  Rng rng(seed);
  std::vector<double> centers;
  centers.reserve(k * p);
  const auto add = [&](std::size_t row) {
    const auto r = X.row(row);
    centers.insert(centers.end(), r.begin(), r.end());
  };
  add(rng.index(n));
  std::vector<double> d2(n);
  for (std::size_t i = 0; i < n; ++i) {
    d2[i] = detail::squared_distance(X.row(i), std::span<const double>(centers.data(), p));
  }
  for (std::size_t c = 1; c < k; ++c) {
    const double total = std::accumulate(d2.begin(), d2.end(), 0.0);
    std::size_t pick = n - 1;
    if (total > 0) {
      const double target = rng.uniform() * total;
      double acc = 0;
      for (std::size_t i = 0; i < n; ++i) {
        acc += d2[i];
        if (target < acc) {
          pick = i;
          break;
        }
      }
      while (d2[pick] == 0) --pick;  // only reachable through rounding at the tail
    } else {
      pick = rng.index(n);
    }
    add(pick);
    const std::span<const double> last(centers.data() + c * p, p);
    for (std::size_t i = 0; i < n; ++i) {
      d2[i] = std::min(d2[i], detail::squared_distance(X.row(i), last));
    }
  }
  return Matrix(k, p, std::move(centers));
}

LloydResult lloyd(const Matrix& X, const Matrix& initial_centers, int max_iter, double tol) {
  const std::size_t n = X.rows();
  const std::size_t p = X.cols();
  const std::size_t k = initial_centers.rows();
  LloydResult out;
  out.centers = initial_centers;
  out.inertia = inertia(X, out.centers, &out.labels);
  out.inertia_trace.push_back(out.inertia);

  while (out.n_iter < max_iter) {
    // Running means: exact when a cluster holds identical rows.
    std::vector<double> sums(k * p, 0.0);
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto c = static_cast<std::size_t>(out.labels[i]);
      const double w = 1.0 / static_cast<double>(++counts[c]);
      const auto r = X.row(i);
      for (std::size_t f = 0; f < p; ++f) sums[c * p + f] += (r[f] - sums[c * p + f]) * w;
    }
    // Empty clusters take the points farthest from their new center.
    std::vector<bool> taken(n, false);
    for (std::size_t c = 0; c < k; ++c) {
      if (counts[c] != 0) continue;
      std::size_t far = n;
      double far_d = -1;
      for (std::size_t i = 0; i < n; ++i) {
        if (taken[i]) continue;
        const auto l = static_cast<std::size_t>(out.labels[i]);
        const double d = detail::squared_distance(
            X.row(i), std::span<const double>(sums.data() + l * p, p));
        if (counts[l] > 0 && d > far_d) {
          far_d = d;
          far = i;
        }
      }
      if (far == n) continue;
      taken[far] = true;
      const auto r = X.row(far);
      std::copy(r.begin(), r.end(), sums.begin() + static_cast<std::ptrdiff_t>(c * p));
    }

    double shift = 0;
    for (std::size_t c = 0; c < k; ++c) {
      shift = std::max(shift, detail::squared_distance(
                                  out.centers.row(c),
                                  std::span<const double>(sums.data() + c * p, p)));
    }
    Matrix centers(k, p, std::move(sums));
    std::vector<double> labels;
    const double value = inertia(X, centers, &labels);
    ++out.n_iter;
    // An exact Lloyd step never increases the inertia; an increase is
    // rounding noise at a fixed point.
    if (value > out.inertia) break;
    out.centers = std::move(centers);
    out.labels = std::move(labels);
    out.inertia = value;
    out.inertia_trace.push_back(value);
    if (std::sqrt(shift) < tol) break;
  }
  return out;
}

}  // namespace solvers

namespace {

using solvers::Penalty;

// Labels mapped to {-1, +1} with `positive` as +1.
std::vector<double> signed_labels(std::span<const double> y, double positive) {
  std::vector<double> out(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) out[i] = y[i] == positive ? 1.0 : -1.0;
  return out;
}

// ---------------------------------------------------------------------------
// LogisticRegression

FittedState logistic_fit(const Estimator& self, const Data& X, std::span<const double> y) {
  const auto classes = detail::unique_sorted(y);
  if (classes.size() < 2) throw FitError("LogisticRegression needs at least 2 classes in y");
  const double C = detail::real_param(self, "C");
  const double tol = detail::real_param(self, "tol");
  const auto max_iter = static_cast<int>(detail::int_param(self, "max_iter"));
  const bool intercept = detail::bool_param(self, "fit_intercept");
  const Penalty penalty =
      detail::string_param(self, "penalty") == "l1" ? Penalty::l1 : Penalty::l2;

  const std::size_t p = n_cols(X);
  // Binary problems fit one model for classes_[1]; otherwise one per class.
  const std::size_t n_models = classes.size() == 2 ? 1 : classes.size();
  std::vector<double> coef(n_models * p), bias(n_models, 0.0);
  int n_iter = 0;
  for (std::size_t m = 0; m < n_models; ++m) {
    const double positive = n_models == 1 ? classes[1] : classes[m];
    const solvers::LogisticObjective objective(X, signed_labels(y, positive), C, penalty,
                                               intercept);
    const auto result = solvers::fit_logistic(objective, tol, max_iter);
    std::copy_n(result.theta.begin(), p, coef.begin() + static_cast<std::ptrdiff_t>(m * p));
    if (intercept) bias[m] = result.theta[p];
    n_iter = std::max(n_iter, result.n_iter);
  }
  FittedState state;
  state.set_matrix("coef_", Matrix(n_models, p, std::move(coef)));
  state.set_vector("intercept_", std::move(bias));
  state.set_vector("classes_", classes);
  state.set_scalar("n_iter_", n_iter);
  return state;
}

Matrix logistic_decision(const Estimator& self, const Data& X) {
  const Matrix coef = self.state().matrix("coef_");
  const auto bias = self.state().vector("intercept_");
  const std::size_t n = n_rows(X);
  std::vector<double> out(n * coef.rows());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t m = 0; m < coef.rows(); ++m) {
      out[i * coef.rows() + m] = row_dot(X, i, coef.row(m)) + bias[m];
    }
  }
  return Matrix(n, coef.rows(), std::move(out));
}

Matrix logistic_proba(const Estimator& self, const Data& X) {
  const Matrix d = logistic_decision(self, X);
  const std::size_t n = d.rows();
  if (d.cols() == 1) {
    std::vector<double> out(n * 2);
    for (std::size_t i = 0; i < n; ++i) {
      const double p = sigmoid(d(i, 0));
      out[2 * i] = 1.0 - p;
      out[2 * i + 1] = p;
    }
    return Matrix(n, 2, std::move(out));
  }
  const std::size_t K = d.cols();
  std::vector<double> out(n * K);
  for (std::size_t i = 0; i < n; ++i) {
    double sum = 0;
    for (std::size_t k = 0; k < K; ++k) sum += out[i * K + k] = sigmoid(d(i, k));
    for (std::size_t k = 0; k < K; ++k) out[i * K + k] /= sum;
  }
  return Matrix(n, K, std::move(out));
}

// Binary: classes_[1] iff the margin is positive. Otherwise the largest
// margin, first class on ties.
std::vector<double> predict_from_decision(const Matrix& d, std::span<const double> classes) {
  std::vector<double> out(d.rows());
  for (std::size_t i = 0; i < d.rows(); ++i) {
    if (d.cols() == 1) {
      out[i] = d(i, 0) > 0 ? classes[1] : classes[0];
      continue;
    }
    const auto row = d.row(i);
    out[i] = classes[static_cast<std::size_t>(std::max_element(row.begin(), row.end()) -
                                              row.begin())];
  }
  return out;
}

std::vector<double> logistic_predict(const Estimator& self, const Data& X) {
  return predict_from_decision(logistic_decision(self, X), self.state().vector("classes_"));
}

// ---------------------------------------------------------------------------
// SVC

Matrix svc_kernel(const Estimator& self, const Matrix& A, const Matrix& B, double gamma) {
  return detail::string_param(self, "kernel") == "rbf" ? rbf_kernel(A, B, gamma)
                                                        : linear_kernel(A, B);
}

FittedState svc_fit(const Estimator& self, const Data& X, std::span<const double> y) {
  const auto classes = detail::unique_sorted(y);
  if (classes.size() < 2) throw FitError("SVC needs 2 classes in y, got 1");
  if (classes.size() > 2) {
    throw FitError("SVC is binary; wrap it in OneVsOneClassifier or OneVsRestClassifier for " +
                   std::to_string(classes.size()) + " classes");
  }
  const Matrix dense = to_dense(X);
  const auto& g = self.params().at("gamma");
  const double gamma = g.is_none() ? 1.0 / static_cast<double>(dense.cols()) : g.as_real();
  const auto y_pm = signed_labels(y, classes[1]);
  const auto result = solvers::smo_solve(svc_kernel(self, dense, dense, gamma), y_pm,
                                         detail::real_param(self, "C"),
                                         detail::real_param(self, "tol"),
                                         static_cast<int>(detail::int_param(self, "max_iter")));
  std::vector<std::size_t> support;
  std::vector<double> dual;
  for (std::size_t i = 0; i < result.alpha.size(); ++i) {
    if (result.alpha[i] > 0) {
      support.push_back(i);
      dual.push_back(y_pm[i] * result.alpha[i]);
    }
  }
  FittedState state;
  state.set_matrix("support_vectors_", take_rows(dense, support));
  state.set_vector("support_", std::vector<double>(support.begin(), support.end()));
  state.set_vector("dual_coef_", std::move(dual));
  state.set_scalar("intercept_", result.b);
  state.set_vector("classes_", classes);
  state.set_scalar("gamma_", gamma);
  return state;
}

Matrix svc_decision(const Estimator& self, const Data& X) {
  const auto& state = self.state();
  const Matrix K =
      svc_kernel(self, to_dense(X), state.matrix("support_vectors_"), state.scalar("gamma_"));
  const auto dual = state.vector("dual_coef_");
  const double b = state.scalar("intercept_");
  std::vector<double> out(K.rows());
  for (std::size_t i = 0; i < K.rows(); ++i) out[i] = detail::dot(K.row(i), dual) + b;
  return Matrix::column(out);
}

std::vector<double> svc_predict(const Estimator& self, const Data& X) {
  return predict_from_decision(svc_decision(self, X), self.state().vector("classes_"));
}

// ---------------------------------------------------------------------------
// KMeans

FittedState kmeans_fit(const Estimator& self, const Data& X, std::span<const double>) {
  const Matrix dense = to_dense(X);
  const auto k = static_cast<std::size_t>(detail::int_param(self, "n_clusters"));
  if (k > dense.rows()) {
    throw DataError("KMeans: n_clusters=" + std::to_string(k) + " exceeds n_samples=" +
                    std::to_string(dense.rows()));
  }
  const auto n_init = detail::int_param(self, "n_init");
  const auto max_iter = static_cast<int>(detail::int_param(self, "max_iter"));
  const double tol = detail::real_param(self, "tol");
  const auto seed = static_cast<std::uint64_t>(detail::int_param(self, "random_seed"));

  solvers::LloydResult best;
  for (std::int64_t r = 0; r < n_init; ++r) {
    const Matrix init =
        solvers::kmeans_plus_plus(dense, k, mix_seed(seed, static_cast<std::uint64_t>(r)));
    auto run = solvers::lloyd(dense, init, max_iter, tol);
    if (r == 0 || run.inertia < best.inertia) best = std::move(run);
  }
  FittedState state;
  state.set_matrix("cluster_centers_", best.centers);
  state.set_scalar("inertia_", best.inertia);
  state.set_scalar("n_iter_", best.n_iter);
  state.set_vector("labels_", std::move(best.labels));
  return state;
}

std::vector<double> kmeans_predict(const Estimator& self, const Data& X) {
  std::vector<double> labels;
  solvers::inertia(to_dense(X), self.state().matrix("cluster_centers_"), &labels);
  return labels;
}

double kmeans_score(const Estimator& self, const Data& X, std::span<const double>) {
  return -solvers::inertia(to_dense(X), self.state().matrix("cluster_centers_"));
}

void require_at_least(const Estimator& e, std::string_view name, std::int64_t low) {
  if (detail::int_param(e, name) < low) {
    throw ParamError(e.kind() + ": " + std::string(name) + " must be >= " + std::to_string(low) +
                     ", got " + std::to_string(detail::int_param(e, name)));
  }
}

}  // namespace

namespace detail {

void register_predictors(Registry& registry) {
  {
    KindInfo info;
    info.name = "LogisticRegression";
    info.schema = {{"penalty", ParamType::string, "l2"},
                   {"C", ParamType::real, 1.0},
                   {"tol", ParamType::real, 1e-6},
                   {"max_iter", ParamType::integer, 1000},
                   {"fit_intercept", ParamType::boolean, true}};
    info.capabilities.predictor = true;
    info.capabilities.probabilistic = true;
    info.capabilities.decision_function = true;
    info.capabilities.supervised = true;
    info.capabilities.task = Task::classification;
    info.validate = [](const Estimator& e) {
      require_choice(e, "penalty", {"l1", "l2"});
      require_positive(e, "C");
      require_positive(e, "tol");
      require_at_least(e, "max_iter", 1);
    };
    info.fit = logistic_fit;
    info.predict = logistic_predict;
    info.decision_function = logistic_decision;
    info.predict_proba = logistic_proba;
    registry.add(std::move(info));
  }
  {
    KindInfo info;
    info.name = "SVC";
    info.schema = {{"C", ParamType::real, 1.0},
                   {"kernel", ParamType::string, "rbf"},
                   {"gamma", ParamType::real, nullptr, true},
                   {"tol", ParamType::real, 1e-3},
                   {"max_iter", ParamType::integer, 100000}};
    info.capabilities.predictor = true;
    info.capabilities.decision_function = true;
    info.capabilities.supervised = true;
    info.capabilities.task = Task::classification;
    info.validate = [](const Estimator& e) {
      require_choice(e, "kernel", {"linear", "rbf"});
      require_positive(e, "C");
      require_positive(e, "gamma");
      require_positive(e, "tol");
      require_at_least(e, "max_iter", 1);
    };
    info.fit = svc_fit;
    info.predict = svc_predict;
    info.decision_function = svc_decision;
    registry.add(std::move(info));
  }
  {
    KindInfo info;
    info.name = "KMeans";
    info.schema = {{"n_clusters", ParamType::integer, 8},
                   {"n_init", ParamType::integer, 10},
                   {"max_iter", ParamType::integer, 300},
                   {"tol", ParamType::real, 1e-6},
                   {"random_seed", ParamType::integer, 0}};
    info.capabilities.predictor = true;
    info.capabilities.task = Task::clustering;
    info.validate = [](const Estimator& e) {
      require_at_least(e, "n_clusters", 1);
      require_at_least(e, "n_init", 1);
      require_at_least(e, "max_iter", 1);
      require_at_least(e, "random_seed", 0);
      if (!(real_param(e, "tol") >= 0)) throw ParamError("KMeans: tol must be >= 0");
    };
    info.fit = kmeans_fit;
    info.predict = kmeans_predict;
    info.score = kmeans_score;
    registry.add(std::move(info));
  }
}

}  // namespace detail

}  // namespace estkit
