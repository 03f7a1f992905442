#include "estkit/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <string_view>

#include "estkit/errors.hpp"

namespace estkit {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(trim(line.substr(start)));
      return out;
    }
    out.push_back(trim(line.substr(start, pos - start)));
    start = pos + 1;
  }
}

std::optional<double> parse_number(std::string_view s) {
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return value;
}

std::ifstream open(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open data file '" + path.string() + "'");
  return in;
}

std::string at_line(const std::filesystem::path& path, std::size_t line) {
  return path.filename().string() + ":" + std::to_string(line) + ": ";
}

}  // namespace

bool csv_has_header(const std::filesystem::path& path) {
  auto in = open(path);
  std::vector<std::string> lines;
  std::string line;
  while (lines.size() < 2 && std::getline(in, line)) {
    if (!trim(line).empty()) lines.push_back(line);
  }
  if (lines.empty()) return false;
  const auto first = split(lines[0], ',');
  if (lines.size() == 2) {
    const auto second = split(lines[1], ',');
    if (second.size() == first.size()) {
      // A column that is numeric below a non-numeric first cell. String
      // label columns are non-numeric on every line and do not count.
      for (std::size_t c = 0; c < first.size(); ++c) {
        if (!parse_number(first[c]) && parse_number(second[c])) return true;
      }
      return false;
    }
  }
  for (auto cell : first) {
    if (!parse_number(cell)) return true;
  }
  return false;
}

std::vector<std::string> csv_header(const std::filesystem::path& path) {
  if (!csv_has_header(path)) return {};
  auto in = open(path);
  std::string line;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    std::vector<std::string> names;
    for (auto cell : split(line, ',')) names.emplace_back(cell);
    return names;
  }
  return {};
}

Dataset load_csv(const std::filesystem::path& path, bool has_header,
                 std::optional<ColumnRef> target) {
  auto in = open(path);
  std::string line;
  std::size_t line_no = 0;
  std::vector<std::string> header;
  std::size_t width = 0;
  bool width_known = false;

  if (has_header) {
    while (std::getline(in, line)) {
      ++line_no;
      if (trim(line).empty()) continue;
      for (auto cell : split(line, ',')) header.emplace_back(cell);
      width = header.size();
      width_known = true;
      break;
    }
  }

  std::optional<std::size_t> target_index;
  auto resolve_target = [&]() {
    if (!target) return;
    if (const auto* name = std::get_if<std::string>(&*target)) {
      for (std::size_t j = 0; j < header.size(); ++j) {
        if (header[j] == *name) target_index = j;
      }
      if (!target_index) {
        throw DataError(path.filename().string() + ": target column '" + *name +
                        "' not found in header");
      }
    } else {
      target_index = std::get<std::size_t>(*target);
      if (target_index >= width) {
        throw DataError(path.filename().string() + ": target column index " +
                        std::to_string(*target_index) + " out of range for " +
                        std::to_string(width) + " columns");
      }
    }
  };
  if (width_known) resolve_target();

  std::vector<double> values;
  std::vector<std::string> raw_targets;
  std::vector<std::size_t> target_lines;
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const auto cells = split(line, ',');
    if (!width_known) {
      width = cells.size();
      width_known = true;
      resolve_target();
    }
    if (cells.size() != width) {
      throw DataError(at_line(path, line_no) + "expected " + std::to_string(width) +
                      " fields, got " + std::to_string(cells.size()));
    }
    for (std::size_t j = 0; j < cells.size(); ++j) {
      if (target_index && j == *target_index) {
        raw_targets.emplace_back(cells[j]);
        target_lines.push_back(line_no);
        continue;
      }
      const auto v = parse_number(cells[j]);
      if (!v) {
        throw DataError(at_line(path, line_no) + "non-numeric value '" + std::string(cells[j]) +
                        "' in column " + std::to_string(j));
      }
      if (!std::isfinite(*v)) {
        throw DataError(at_line(path, line_no) + "non-finite value in column " +
                        std::to_string(j) + " (missing values are not supported)");
      }
      values.push_back(*v);
    }
    ++rows;
  }
  if (target && !width_known) {
    throw DataError(path.filename().string() + ": empty file has no target column");
  }

  Dataset ds;
  const std::size_t n_features = target_index ? width - 1 : width;
  ds.X = Matrix(rows, n_features, std::move(values));
  for (std::size_t j = 0; j < header.size(); ++j) {
    if (!target_index || j != *target_index) ds.feature_names.push_back(header[j]);
  }

  if (target_index) {
    bool numeric = true;
    std::vector<double> parsed;
    parsed.reserve(raw_targets.size());
    for (const auto& t : raw_targets) {
      const auto v = parse_number(t);
      if (!v) {
        numeric = false;
        break;
      }
      parsed.push_back(*v);
    }
    if (numeric) {
      for (std::size_t i = 0; i < parsed.size(); ++i) {
        if (!std::isfinite(parsed[i])) {
          throw DataError(at_line(path, target_lines[i]) + "non-finite target value");
        }
      }
      ds.y = std::move(parsed);
    } else {
      std::map<std::string, double> codes;
      for (const auto& t : raw_targets) {
        auto [it, inserted] = codes.try_emplace(t, static_cast<double>(ds.class_names.size()));
        if (inserted) ds.class_names.push_back(t);
        ds.y.push_back(it->second);
      }
    }
  }
  return ds;
}

Dataset load_svmlight(const std::filesystem::path& path) {
  auto in = open(path);
  std::string line;
  std::size_t line_no = 0;
  std::vector<Triplet> triplets;
  std::vector<double> labels;
  std::size_t max_col = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view body(line);
    if (const auto hash = body.find('#'); hash != std::string_view::npos) {
      body = body.substr(0, hash);
    }
    body = trim(body);
    if (body.empty()) continue;

    std::vector<std::string_view> tokens;
    std::size_t pos = 0;
    while (pos < body.size()) {
      while (pos < body.size() && (body[pos] == ' ' || body[pos] == '\t')) ++pos;
      std::size_t end = pos;
      while (end < body.size() && body[end] != ' ' && body[end] != '\t') ++end;
      if (end > pos) tokens.push_back(body.substr(pos, end - pos));
      pos = end;
    }

    const auto label = parse_number(tokens.front());
    if (!label || !std::isfinite(*label)) {
      throw DataError(at_line(path, line_no) + "malformed label '" +
                      std::string(tokens.front()) + "'");
    }
    const std::size_t row = labels.size();
    labels.push_back(*label);

    std::size_t prev = 0;
    for (std::size_t t = 1; t < tokens.size(); ++t) {
      const auto colon = tokens[t].find(':');
      if (colon == std::string_view::npos) {
        throw DataError(at_line(path, line_no) + "malformed pair '" + std::string(tokens[t]) +
                        "'");
      }
      const auto idx_text = tokens[t].substr(0, colon);
      std::size_t idx = 0;
      const auto [ptr, ec] =
          std::from_chars(idx_text.data(), idx_text.data() + idx_text.size(), idx);
      const auto value = parse_number(tokens[t].substr(colon + 1));
      if (ec != std::errc() || ptr != idx_text.data() + idx_text.size() || idx == 0 || !value ||
          !std::isfinite(*value)) {
        throw DataError(at_line(path, line_no) + "malformed pair '" + std::string(tokens[t]) +
                        "'");
      }
      if (idx <= prev) {
        throw DataError(at_line(path, line_no) + "feature indices must be strictly ascending");
      }
      prev = idx;
      max_col = std::max(max_col, idx);
      triplets.push_back({row, idx - 1, *value});
    }
  }
  Dataset ds;
  ds.X = csr_from_triplets(triplets, labels.size(), max_col);
  ds.y = std::move(labels);
  return ds;
}

}  // namespace estkit
