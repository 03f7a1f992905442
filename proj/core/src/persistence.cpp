#include "estkit/persistence.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include "estkit/errors.hpp"
#include "estkit/registry.hpp"

namespace estkit {

namespace {

constexpr char magic[4] = {'E', 'S', 'T', 'K'};
constexpr int max_depth = 64;

class Writer {
 public:
  void bytes(const void* p, std::size_t n) {
    const auto* b = static_cast<const std::uint8_t*>(p);
    out_.insert(out_.end(), b, b + n);
  }
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void count(std::size_t n) {
    if (n > 0xffffffffu) throw ArchiveError("archive section too large");
    u32(static_cast<std::uint32_t>(n));
  }
  void string(std::string_view s) {
    count(s.size());
    bytes(s.data(), s.size());
  }
  // Appends another buffer as a u64-length-prefixed section.
  void section(const std::vector<std::uint8_t>& body) {
    u64(body.size());
    out_.insert(out_.end(), body.begin(), body.end());
  }
  std::vector<std::uint8_t>& buffer() { return out_; }

 private:
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}

  std::span<const std::uint8_t> take(std::size_t n) {
    if (n > in_.size() - pos_) throw ArchiveError("archive is truncated or malformed");
    auto out = in_.subspan(pos_, n);
    pos_ += n;
    return out;
  }
  std::uint8_t u8() { return take(1)[0]; }
  std::uint32_t u32() {
    const auto b = take(4);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    const auto b = take(8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string string() {
    const auto b = take(u32());
    return {b.begin(), b.end()};
  }
  Reader section() {
    const std::uint64_t n = u64();
    if (n > in_.size() - pos_) throw ArchiveError("archive is truncated or malformed");
    return Reader(take(static_cast<std::size_t>(n)));
  }
  bool done() const { return pos_ == in_.size(); }
  std::size_t remaining() const { return in_.size() - pos_; }

 private:
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

void write_estimator(Writer& w, const Estimator& e, bool with_state);

void write_value(Writer& w, const ParamValue& v) {
  const ParamType type = v.type();
  w.u8(static_cast<std::uint8_t>(type));
  switch (type) {
    case ParamType::none: break;
    case ParamType::boolean: w.u8(v.as_bool() ? 1 : 0); break;
    case ParamType::integer: w.u64(static_cast<std::uint64_t>(v.as_int())); break;
    case ParamType::real: w.f64(v.as_real()); break;
    case ParamType::string: w.string(v.as_string()); break;
    case ParamType::list:
      w.count(v.as_list().size());
      for (const auto& item : v.as_list()) write_value(w, item);
      break;
    case ParamType::estimator: write_estimator(w, v.as_estimator(), false); break;
    case ParamType::estimator_list:
      w.count(v.as_estimator_list().size());
      for (const auto& m : v.as_estimator_list()) {
        w.string(m.name);
        write_estimator(w, *m.estimator, false);
      }
      break;
  }
}

void write_estimator(Writer& w, const Estimator& e, bool with_state) {
  w.string(e.kind());
  w.count(e.params().size());
  for (const auto& [name, value] : e.params()) {
    w.string(name);
    write_value(w, value);
  }
  w.u8(with_state ? 1 : 0);
  if (!with_state) return;
  const FittedState& state = e.state();
  w.count(state.arrays().size());
  for (const auto& [name, array] : state.arrays()) {
    w.string(name);
    w.count(array.shape.size());
    for (auto d : array.shape) w.u64(d);
    for (double v : array.values) w.f64(v);
  }
  w.count(state.children().size());
  for (const auto& child : state.children()) {
    w.string(child.name);
    write_estimator(w, *child.estimator, true);
  }
}

Estimator read_estimator(Reader& r, int depth);

ParamValue read_value(Reader& r, int depth) {
  const std::uint8_t tag = r.u8();
  switch (static_cast<ParamType>(tag)) {
    case ParamType::none: return {};
    case ParamType::boolean: {
      const auto b = r.u8();
      if (b > 1) throw ArchiveError("archive holds an invalid boolean");
      return b == 1;
    }
    case ParamType::integer: return static_cast<std::int64_t>(r.u64());
    case ParamType::real: return r.f64();
    case ParamType::string: return r.string();
    case ParamType::list: {
      const std::uint32_t n = r.u32();
      ParamValue::List items;
      for (std::uint32_t i = 0; i < n; ++i) items.push_back(read_value(r, depth + 1));
      return items;
    }
    case ParamType::estimator: return read_estimator(r, depth + 1);
    case ParamType::estimator_list: {
      const std::uint32_t n = r.u32();
      EstimatorList list;
      for (std::uint32_t i = 0; i < n; ++i) {
        std::string name = r.string();
        list.emplace_back(std::move(name), read_estimator(r, depth + 1));
      }
      return list;
    }
  }
  throw ArchiveError("archive holds an unknown parameter type tag " + std::to_string(tag));
}

Estimator read_estimator(Reader& r, int depth) {
  if (depth > max_depth) throw ArchiveError("archive nesting is too deep");
  const std::string kind = r.string();
  if (!Registry::global().contains(kind)) {
    throw ArchiveError("archive refers to unknown estimator kind '" + kind +
                       "'; register it before loading");
  }
  const std::uint32_t n_params = r.u32();
  ParamMap params;
  for (std::uint32_t i = 0; i < n_params; ++i) {
    std::string name = r.string();
    params.set(std::move(name), read_value(r, depth));
  }
  const std::uint8_t fitted = r.u8();
  try {
    if (fitted == 0) return Estimator(kind, params);
    if (fitted != 1) throw ArchiveError("archive holds an invalid fitted flag");

    FittedState state;
    const std::uint32_t n_arrays = r.u32();
    for (std::uint32_t i = 0; i < n_arrays; ++i) {
      Array array;
      std::string name = r.string();
      const std::uint32_t ndim = r.u32();
      std::size_t size = 1;
      for (std::uint32_t d = 0; d < ndim; ++d) {
        const std::uint64_t dim = r.u64();
        if (dim != 0 && size > r.remaining() / 8 / dim) {
          throw ArchiveError("archive array '" + name + "' exceeds the payload");
        }
        array.shape.push_back(static_cast<std::size_t>(dim));
        size *= static_cast<std::size_t>(dim);
      }
      if (size > r.remaining() / 8) {
        throw ArchiveError("archive array '" + name + "' exceeds the payload");
      }
      array.values.resize(size);
      for (auto& v : array.values) v = r.f64();
      state.set(std::move(name), std::move(array));
    }
    const std::uint32_t n_children = r.u32();
    for (std::uint32_t i = 0; i < n_children; ++i) {
      std::string name = r.string();
      state.add_child(std::move(name), read_estimator(r, depth + 1));
    }
    return Estimator::restore(kind, params, std::move(state));
  } catch (const ArchiveError&) {
    throw;
  } catch (const Error& e) {
    throw ArchiveError("archive entry for " + kind + " is invalid: " + e.what());
  }
}

}  // namespace

std::uint64_t fnv1a_64(std::span<const std::uint8_t> bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (auto b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::vector<std::uint8_t> serialize(const Estimator& fitted, const ArchiveMetadata& extra) {
  if (!fitted.is_fitted()) {
    throw NotFittedError("cannot save an unfitted " + fitted.kind() +
                         "; save its parameters instead or fit it first");
  }
  Writer meta;
  meta.count(extra.size() + 1);
  meta.string("library_version");
  meta.string(library_version);
  for (const auto& [k, v] : extra) {
    meta.string(k);
    meta.string(v);
  }
  Writer body;
  write_estimator(body, fitted, true);

  Writer out;
  out.bytes(magic, sizeof magic);
  out.u32(archive_format_version);
  out.section(meta.buffer());
  out.section(body.buffer());
  out.u64(fnv1a_64(out.buffer()));
  return std::move(out.buffer());
}

Estimator deserialize(std::span<const std::uint8_t> bytes, ArchiveMetadata* metadata) {
  if (bytes.size() < sizeof magic + 4 + 8 || std::memcmp(bytes.data(), magic, sizeof magic) != 0) {
    throw ArchiveError("not a model archive (bad magic)");
  }
  Reader header(bytes.subspan(sizeof magic, 4));
  const std::uint32_t version = header.u32();
  if (version > archive_format_version) {
    throw ArchiveError("archive format version " + std::to_string(version) +
                       " is newer than the supported version " +
                       std::to_string(archive_format_version));
  }
  if (version == 0) throw ArchiveError("archive format version 0 is invalid");
  const auto payload = bytes.first(bytes.size() - 8);
  Reader trailer(bytes.last(8));
  if (trailer.u64() != fnv1a_64(payload)) {
    throw ArchiveError("archive checksum mismatch; the file is corrupt");
  }

  Reader r(payload.subspan(sizeof magic + 4));
  Reader meta = r.section();
  ArchiveMetadata entries;
  const std::uint32_t n_meta = meta.u32();
  for (std::uint32_t i = 0; i < n_meta; ++i) {
    std::string k = meta.string();
    std::string v = meta.string();
    entries.emplace_back(std::move(k), std::move(v));
  }
  Reader body = r.section();
  Estimator out = read_estimator(body, 0);
  if (!body.done() || !r.done() || !meta.done()) {
    throw ArchiveError("archive has trailing bytes");
  }
  if (metadata) *metadata = std::move(entries);
  return out;
}

void save(const Estimator& fitted, const std::filesystem::path& path,
          const ArchiveMetadata& extra) {
  const auto bytes = serialize(fitted, extra);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw ArchiveError("cannot open '" + path.string() + "' for writing");
  f.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw ArchiveError("failed writing '" + path.string() + "'");
}

Estimator load(const std::filesystem::path& path, ArchiveMetadata* metadata) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ArchiveError("cannot open model archive '" + path.string() + "'");
  const std::vector<std::uint8_t> bytes{std::istreambuf_iterator<char>(f),
                                        std::istreambuf_iterator<char>()};
  return deserialize(bytes, metadata);
}

}  // namespace estkit
