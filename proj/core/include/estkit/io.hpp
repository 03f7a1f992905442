#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "estkit/matrix.hpp"

namespace estkit {

// A loaded dataset: samples in rows of X, optional targets.
struct Dataset {
  Data X;
  std::vector<double> y;  // empty when no target was requested
  std::vector<std::string> feature_names;
  // Original labels when the target column was categorical; y holds the
  // codes 0..K-1 assigned in first-appearance order.
  std::vector<std::string> class_names;

  bool has_target() const { return !y.empty(); }
};

// Target column selected by header name or by 0-based position.
using ColumnRef = std::variant<std::string, std::size_t>;

// Comma-separated numeric table with an optional single header line.
// Throws DataError naming the 1-based line on ragged rows, non-numeric or
// non-finite feature cells, or a missing target column.
Dataset load_csv(const std::filesystem::path& path, bool has_header,
                 std::optional<ColumnRef> target = std::nullopt);

// True when some column is non-numeric on the first line but numeric on
// the second (any non-numeric cell for single-line files).
bool csv_has_header(const std::filesystem::path& path);
// Names on the header line; empty without a header.
std::vector<std::string> csv_header(const std::filesystem::path& path);

// "label idx:val idx:val ..." lines with 1-based strictly ascending
// indices. X is sparse with n_cols equal to the largest index seen.
Dataset load_svmlight(const std::filesystem::path& path);

}  // namespace estkit
