#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

// Acceptance checks. Each returns the number of individual assertions that
// ran, how many failed, and the first few failure messages. The acceptance
// binary folds them into one line per criterion; the unit tests call them
// one by one.

namespace estkit::acceptance {

struct Outcome {
  std::size_t checks = 0;
  std::size_t failures = 0;
  std::vector<std::string> messages;  // first few failures
  std::string note;                   // extra figures for the report line

  bool pass() const { return failures == 0 && checks > 0; }
  void expect(bool ok, const std::string& what);
  void merge(const Outcome& other);
  std::string summary() const;
};

// Snippet parity.
Outcome snippet_logistic_fit();
Outcome snippet_kmeans_predict();
Outcome snippet_scaler_chaining();
Outcome snippet_one_vs_one();
Outcome snippet_union_pipeline();
Outcome snippet_svc_grid_search();

// Contract suite; `cases` random cases per registered kind.
Outcome contract_fit_returns_receiver(std::size_t cases = 100);
Outcome contract_fit_transform(std::size_t cases = 100);
Outcome contract_fit_predict(std::size_t cases = 100);
Outcome contract_clone_unfitted(std::size_t cases = 100);
Outcome contract_constructor_no_data(std::size_t cases = 100);

// Oracle equivalence.
Outcome oracle_grid_search();
Outcome oracle_pipeline();
Outcome oracle_roc_auc();

// Numerical checks.
Outcome numeric_logistic_gradient();
Outcome numeric_smo_kkt();
Outcome numeric_lloyd_monotone();
Outcome numeric_scaler_moments();
Outcome numeric_pca();

// Split hygiene.
Outcome hygiene_no_test_rows_in_fit();
Outcome hygiene_partitions();

// Persistence.
Outcome persistence_round_trip();
Outcome persistence_refuses_bad_archives();
Outcome persistence_load_audit();

// Determinism.
Outcome determinism_two_runs();
// Hash of the seeded run artifacts, for comparing separate processes.
std::string determinism_digest();

struct Criterion {
  std::string name;
  std::vector<std::pair<std::string, std::function<Outcome()>>> parts;
};

std::vector<Criterion> primary_criteria();

}  // namespace estkit::acceptance
