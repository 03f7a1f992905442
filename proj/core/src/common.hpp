#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "estkit/errors.hpp"
#include "estkit/estimator.hpp"

namespace estkit::detail {

inline std::vector<double> unique_sorted(std::span<const double> y) {
  std::vector<double> out(y.begin(), y.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

inline std::size_t class_index(std::span<const double> classes, double label) {
  const auto it = std::lower_bound(classes.begin(), classes.end(), label);
  return static_cast<std::size_t>(it - classes.begin());
}

inline double real_param(const Estimator& e, std::string_view name) {
  return e.params().at(name).as_real();
}

inline std::int64_t int_param(const Estimator& e, std::string_view name) {
  return e.params().at(name).as_int();
}

inline const std::string& string_param(const Estimator& e, std::string_view name) {
  return e.params().at(name).as_string();
}

inline bool bool_param(const Estimator& e, std::string_view name) {
  return e.params().at(name).as_bool();
}

inline void require_choice(const Estimator& e, std::string_view name,
                           std::initializer_list<std::string_view> choices) {
  const auto& value = string_param(e, name);
  for (auto c : choices) {
    if (value == c) return;
  }
  std::string allowed;
  for (auto c : choices) {
    if (!allowed.empty()) allowed += ", ";
    allowed += "\"" + std::string(c) + "\"";
  }
  throw ParamError(e.kind() + ": " + std::string(name) + "=\"" + value + "\" is not one of " +
                   allowed);
}

inline void require_positive(const Estimator& e, std::string_view name) {
  const auto& v = e.params().at(name);
  if (v.is_none()) return;
  if (!(v.as_real() > 0)) {
    throw ParamError(e.kind() + ": " + std::string(name) + " must be positive, got " +
                     v.to_string());
  }
}

// Call from a catch block: rethrows the active library error as the same
// type with `context` prepended to its message.
[[noreturn]] inline void rethrow_with_context(const std::string& context) {
  try {
    throw;
  } catch (const ParamError& e) {
    throw ParamError(context + e.what());
  } catch (const DataError& e) {
    throw DataError(context + e.what());
  } catch (const CapabilityError& e) {
    throw CapabilityError(context + e.what());
  } catch (const NotFittedError& e) {
    throw NotFittedError(context + e.what());
  } catch (const FitError& e) {
    throw FitError(context + e.what());
  } catch (const ArchiveError& e) {
    throw ArchiveError(context + e.what());
  } catch (const Error& e) {
    throw Error(context + e.what());
  }
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double squared_distance(std::span<const double> a, std::span<const double> b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

// Flips a vector so that its largest-magnitude entry (first one on ties)
// is positive.
inline void fix_sign(std::span<double> v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (std::abs(v[i]) > std::abs(v[best])) best = i;
  }
  if (!v.empty() && v[best] < 0) {
    for (auto& x : v) x = -x;
  }
}

}  // namespace estkit::detail
