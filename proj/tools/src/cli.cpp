#include "estkit_cli/cli.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <optional>

#include "CLI11.hpp"
#include "estkit/errors.hpp"
#include "estkit/io.hpp"
#include "estkit/persistence.hpp"
#include "estkit_cli/spec.hpp"

namespace estkit::cli {

namespace {

namespace fs = std::filesystem;

struct Options {
  std::string spec;
  std::string data;
  std::string target_column;
  std::string model;
  std::string out;
  std::string report;
  std::optional<std::uint64_t> seed;
};

std::string format_number(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return {buf, res.ptr};
}

bool is_svmlight(const fs::path& path) {
  const auto ext = path.extension().string();
  return ext == ".svm" || ext == ".svmlight" || ext == ".libsvm";
}

bool all_digits(const std::string& s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

// Header names win over positions, so a column literally named "3" is
// selected by name when present.
std::optional<ColumnRef> column_ref(const std::string& target,
                                    const std::vector<std::string>& header) {
  if (target.empty()) return std::nullopt;
  if (std::find(header.begin(), header.end(), target) != header.end() || !all_digits(target)) {
    return ColumnRef{target};
  }
  return ColumnRef{static_cast<std::size_t>(std::stoull(target))};
}

std::size_t csv_width(const fs::path& path) {
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    return static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) + 1;
  }
  return 0;
}

Dataset load_data(const std::string& path, const std::string& target) {
  if (path.empty()) throw ParamError("--data is required");
  if (!fs::exists(path)) throw DataError("data file '" + path + "' does not exist");
  if (is_svmlight(path)) return load_svmlight(path);
  const bool header = csv_has_header(path);
  return load_csv(path, header, column_ref(target, csv_header(path)));
}

// Sets every (possibly nested) random_seed parameter.
Estimator apply_seed(const Estimator& e, std::optional<std::uint64_t> seed) {
  if (!seed) return e;
  ParamMap updates;
  for (const auto& [key, _] : e.get_params(true)) {
    if (key == "random_seed" || key.ends_with("__random_seed")) {
      updates.set(key, static_cast<std::int64_t>(*seed));
    }
  }
  return updates.empty() ? e : e.set_params(updates);
}

std::string json_strings(const std::vector<std::string>& values) {
  return json(values).dump();
}

std::vector<std::string> parse_strings(const std::string& text) {
  try {
    return json::parse(text).get<std::vector<std::string>>();
  } catch (const json::exception&) {
    throw ArchiveError("archive metadata is malformed");
  }
}

const std::string* find_meta(const ArchiveMetadata& meta, std::string_view key) {
  for (const auto& [k, v] : meta) {
    if (k == key) return &v;
  }
  return nullptr;
}

ArchiveMetadata training_metadata(const Dataset& ds, const std::string& target) {
  ArchiveMetadata meta;
  if (!target.empty()) meta.emplace_back("target_column", target);
  if (!ds.class_names.empty()) meta.emplace_back("class_names", json_strings(ds.class_names));
  return meta;
}

void require_target(const Estimator& e, const Dataset& ds) {
  if (e.capabilities().supervised && !ds.has_target()) {
    throw DataError(e.kind() + " is supervised; pass --target-column (or use SVMlight data)");
  }
}

// Test-time features: the stored target column is dropped when present,
// and sparse inputs are widened to the training width.
Data prediction_features(const Estimator& model, const ArchiveMetadata& meta,
                         const Options& opt) {
  if (opt.data.empty()) throw ParamError("--data is required");
  if (!fs::exists(opt.data)) throw DataError("data file '" + opt.data + "' does not exist");
  const auto& state = model.state();
  const std::size_t width = state.contains("n_features_in_")
                                ? static_cast<std::size_t>(state.scalar("n_features_in_"))
                                : 0;
  if (is_svmlight(opt.data)) {
    Data X = load_svmlight(opt.data).X;
    const auto& s = std::get<SparseMatrix>(X);
    if (width > s.cols()) {
      const auto ip = s.indptr(), ix = s.indices();
      const auto dv = s.data();
      return SparseMatrix(s.rows(), width, {ip.begin(), ip.end()}, {ix.begin(), ix.end()},
                          {dv.begin(), dv.end()});
    }
    return X;
  }
  const bool header = csv_has_header(opt.data);
  const auto names = csv_header(opt.data);
  std::string target = opt.target_column;
  if (target.empty()) {
    if (const auto* t = find_meta(meta, "target_column")) {
      const bool named = header && std::find(names.begin(), names.end(), *t) != names.end();
      const bool positional = all_digits(*t) && !named;
      if (named) target = *t;
      if (positional) {
        if (csv_width(opt.data) == width + 1) target = *t;
      }
    }
  }
  return load_csv(opt.data, header, column_ref(target, names)).X;
}

// Maps test labels onto the training label codes.
std::vector<double> encode_like_training(const Dataset& ds, const ArchiveMetadata& meta) {
  const auto* stored = find_meta(meta, "class_names");
  if (ds.class_names.empty()) {
    if (stored) throw DataError("targets are numeric but the model was trained on string labels");
    return ds.y;
  }
  if (!stored) throw DataError("targets are strings but the model was trained on numeric labels");
  const auto train = parse_strings(*stored);
  std::vector<double> out(ds.y.size());
  for (std::size_t i = 0; i < ds.y.size(); ++i) {
    const auto& name = ds.class_names[static_cast<std::size_t>(ds.y[i])];
    const auto it = std::find(train.begin(), train.end(), name);
    if (it == train.end()) throw DataError("label '" + name + "' was not seen during training");
    out[i] = static_cast<double>(it - train.begin());
  }
  return out;
}

void write_text(const std::string& path, const std::string& text, std::ostream& fallback) {
  if (path.empty()) {
    fallback << text;
    return;
  }
  std::ofstream f(path, std::ios::trunc);
  if (!f) throw DataError("cannot open '" + path + "' for writing");
  f << text;
  if (!f) throw DataError("failed writing '" + path + "'");
}

std::string csv_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string search_report(const SearchResult& r) {
  const std::size_t folds = r.fold_scores.empty() ? 0 : r.fold_scores[0].size();
  std::string out = "candidate,params";
  for (std::size_t f = 0; f < folds; ++f) out += ",split" + std::to_string(f) + "_score";
  out += ",mean_score,is_best\n";
  for (std::size_t c = 0; c < r.candidates.size(); ++c) {
    out += std::to_string(c) + "," + csv_quote(params_to_json(r.candidates[c]).dump());
    for (double s : r.fold_scores[c]) out += "," + format_number(s);
    out += "," + format_number(r.mean_scores[c]) + "," + (c == r.best_index_ ? "1" : "0") + "\n";
  }
  return out;
}

int cmd_fit(const Options& opt, std::ostream& out) {
  if (opt.spec.empty()) throw ParamError("--spec is required");
  if (opt.model.empty()) throw ParamError("--model is required");
  // Validate the spec before any data is read.
  Estimator e = apply_seed(read_spec(opt.spec).estimator, opt.seed);
  const Dataset ds = load_data(opt.data, opt.target_column);
  require_target(e, ds);
  e.fit(ds.X, ds.y);
  save(e, opt.model, training_metadata(ds, opt.target_column));
  out << "fitted " << e.kind() << " on " << n_rows(ds.X) << " samples; model written to "
      << opt.model << "\n";
  return exit_ok;
}

int cmd_predict(const Options& opt, std::ostream& out) {
  if (opt.model.empty()) throw ParamError("--model is required");
  ArchiveMetadata meta;
  const Estimator model = load(opt.model, &meta);
  if (!model.capabilities().predictor) {
    throw CapabilityError(model.kind() + " does not implement predict");
  }
  const Data X = prediction_features(model, meta, opt);
  const auto pred = model.predict(X);
  std::vector<std::string> names;
  if (const auto* stored = find_meta(meta, "class_names")) names = parse_strings(*stored);
  std::string text = "prediction\n";
  for (double p : pred) {
    const auto idx = static_cast<std::size_t>(p);
    const bool decode = !names.empty() && p >= 0 && p == static_cast<double>(idx) && idx < names.size();
    text += (decode ? names[idx] : format_number(p)) + "\n";
  }
  write_text(opt.out, text, out);
  return exit_ok;
}

int cmd_score(const Options& opt, std::ostream& out) {
  if (opt.model.empty()) throw ParamError("--model is required");
  ArchiveMetadata meta;
  const Estimator model = load(opt.model, &meta);
  std::string target = opt.target_column;
  if (target.empty()) {
    if (const auto* t = find_meta(meta, "target_column")) target = *t;
  }
  const Dataset ds = load_data(opt.data, target);
  const double score = model.score(ds.X, encode_like_training(ds, meta));
  write_text(opt.out, format_number(score) + "\n", out);
  return exit_ok;
}

int cmd_search(const Options& opt, std::ostream& out) {
  if (opt.spec.empty()) throw ParamError("--spec is required");
  Spec spec = read_spec(opt.spec);
  if (!spec.search) throw ParamError("spec has no \"search\" block");
  SearchSpec& s = *spec.search;
  if (opt.seed) {
    s.seed = *opt.seed;
    s.options.cv.random_seed = *opt.seed;
  }
  if (!opt.model.empty() && !s.options.refit) {
    throw ParamError("--model needs refit=true in the search block");
  }
  const Estimator base = apply_seed(spec.estimator, opt.seed);
  const Dataset ds = load_data(opt.data, opt.target_column);
  require_target(base, ds);
  const SearchResult r =
      s.type == "grid"
          ? grid_search(base, s.grid, ds.X, ds.y, s.options)
          : randomized_search(base, s.distributions, s.n_iter, s.seed, ds.X, ds.y, s.options);
  if (!opt.report.empty()) write_text(opt.report, search_report(r), out);
  if (!opt.model.empty()) save(*r.best_estimator_, opt.model, training_metadata(ds, opt.target_column));
  json summary = {{"candidates", r.candidates.size()},
                  {"best_index", r.best_index_},
                  {"best_score", r.best_score_},
                  {"best_params", params_to_json(r.best_params_)}};
  out << summary.dump() << "\n";
  return exit_ok;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fit, apply and tune estimators described by JSON spec files", "estkit"};
  app.require_subcommand(1);
  Options opt;
  std::uint64_t seed = 0;

  auto* fit = app.add_subcommand("fit", "Fit the spec's estimator and save the model");
  auto* predict = app.add_subcommand("predict", "Write one prediction per row as CSV");
  auto* score = app.add_subcommand("score", "Print the model's score on labeled data");
  auto* search = app.add_subcommand("search", "Run the spec's search and save the best model");

  for (auto* sub : {fit, search}) {
    sub->add_option("--spec", opt.spec, "JSON spec file")->required();
    sub->add_option("--seed", seed, "Overrides random seeds in the spec");
  }
  for (auto* sub : {fit, predict, score, search}) {
    sub->add_option("--data", opt.data, "CSV or SVMlight (.svm) data file")->required();
    sub->add_option("--target-column", opt.target_column, "Target column name or 0-based index");
  }
  fit->add_option("--model", opt.model, "Output model archive")->required();
  search->add_option("--model", opt.model, "Output archive of the refit best model");
  search->add_option("--report", opt.report, "Per-candidate CSV report");
  for (auto* sub : {predict, score}) {
    sub->add_option("--model", opt.model, "Model archive")->required();
    sub->add_option("--out", opt.out, "Output file (default: standard output)");
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? exit_ok : exit_invalid;
  }
  if (fit->parsed() && fit->count("--seed")) opt.seed = seed;
  if (search->parsed() && search->count("--seed")) opt.seed = seed;

  try {
    if (fit->parsed()) return cmd_fit(opt, out);
    if (predict->parsed()) return cmd_predict(opt, out);
    if (score->parsed()) return cmd_score(opt, out);
    return cmd_search(opt, out);
  } catch (const ParamError& e) {
    err << "error: " << e.what() << "\n";
    return exit_invalid;
  } catch (const CapabilityError& e) {
    err << "error: " << e.what() << "\n";
    return exit_invalid;
  } catch (const NotFittedError& e) {
    err << "error: " << e.what() << "\n";
    return exit_invalid;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << "\n";
    return exit_data;
  } catch (const ArchiveError& e) {
    err << "archive error: " << e.what() << "\n";
    return exit_data;
  } catch (const FitError& e) {
    err << "fit error: " << e.what() << "\n";
    return exit_fit;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return exit_fit;
  }
}

}  // namespace estkit::cli
