#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "estkit/estimator.hpp"

// Model archive layout (all integers little-endian):
//
//   "ESTK" | u32 format_version | u64 len, metadata | u64 len, estimator | u64 checksum
//
//   metadata   u32 count, then (string key, string value) pairs; the first
//              key is "library_version"
//   estimator  string kind, params, u8 fitted, [arrays, children]
//   params     u32 count, then (string name, value)
//   value      u8 type tag, payload (bool u8, integer i64, real f64 bits,
//              string, list of values, estimator block, or u32 count of
//              (string name, estimator block))
//   arrays     u32 count, then (string name, u32 ndim, u64 dims..., f64 values...)
//   children   u32 count, then (string name, estimator block)
//   string     u32 byte length, bytes
//   checksum   64-bit FNV-1a of every preceding byte
//
// Loading only looks kinds up in the registry, runs their constructors and
// injects the stored arrays; nothing in the file is executed.

namespace estkit {

inline constexpr std::uint32_t archive_format_version = 1;
inline constexpr const char* library_version = "0.1.0";

using ArchiveMetadata = std::vector<std::pair<std::string, std::string>>;

// Throws NotFittedError for unfitted estimators.
std::vector<std::uint8_t> serialize(const Estimator& fitted, const ArchiveMetadata& extra = {});
// Throws ArchiveError on a bad magic, newer format version, checksum
// mismatch, truncated or malformed payload, or unknown kind.
Estimator deserialize(std::span<const std::uint8_t> bytes, ArchiveMetadata* metadata = nullptr);

void save(const Estimator& fitted, const std::filesystem::path& path,
          const ArchiveMetadata& extra = {});
Estimator load(const std::filesystem::path& path, ArchiveMetadata* metadata = nullptr);

std::uint64_t fnv1a_64(std::span<const std::uint8_t> bytes);

}  // namespace estkit
