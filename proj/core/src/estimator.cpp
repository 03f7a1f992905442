#include "estkit/estimator.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <set>

#include "builtins.hpp"
#include "estkit/errors.hpp"
#include "estkit/metrics.hpp"
#include "estkit/registry.hpp"

namespace estkit {

namespace {

std::string format_real(double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  std::string out(buf, ptr);
  if (out.find_first_of(".eEn") == std::string::npos) out += ".0";
  return out;
}

void check_child_names(const EstimatorList& list, std::string_view param, std::string_view kind) {
  std::set<std::string_view> seen;
  for (const auto& child : list) {
    if (child.name.empty()) {
      throw ParamError(std::string(kind) + "." + std::string(param) + ": empty component name");
    }
    if (child.name.find("__") != std::string::npos) {
      throw ParamError(std::string(kind) + "." + std::string(param) + ": component name '" +
                       child.name + "' must not contain '__'");
    }
    if (!seen.insert(child.name).second) {
      throw ParamError(std::string(kind) + "." + std::string(param) +
                       ": duplicate component name '" + child.name + "'");
    }
    if (!child.estimator) {
      throw ParamError(std::string(kind) + "." + std::string(param) + ": component '" +
                       child.name + "' is empty");
    }
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// ParamValue / ParamMap

std::string_view to_string(ParamType type) {
  switch (type) {
    case ParamType::none: return "none";
    case ParamType::boolean: return "bool";
    case ParamType::integer: return "int";
    case ParamType::real: return "float";
    case ParamType::string: return "string";
    case ParamType::list: return "list";
    case ParamType::estimator: return "estimator";
    case ParamType::estimator_list: return "estimator list";
  }
  return "?";
}

NamedEstimator::NamedEstimator(std::string n, std::shared_ptr<const Estimator> e)
    : name(std::move(n)), estimator(std::move(e)) {}

bool NamedEstimator::operator==(const NamedEstimator& other) const {
  return name == other.name && estimator && other.estimator &&
         estimator->same_config(*other.estimator);
}

ParamValue::ParamValue(const Estimator& e)
    : value_(std::make_shared<const Estimator>(e.clone())) {}

ParamValue::ParamValue(EstimatorList v) {
  for (auto& child : v) {
    if (child.estimator && child.estimator->is_fitted()) {
      child.estimator = std::make_shared<const Estimator>(child.estimator->clone());
    }
  }
  value_ = std::move(v);
}

ParamType ParamValue::type() const {
  return static_cast<ParamType>(value_.index());
}

bool ParamValue::as_bool() const {
  if (const auto* v = std::get_if<bool>(&value_)) return *v;
  throw ParamError("expected bool, got " + std::string(estkit::to_string(type())));
}

std::int64_t ParamValue::as_int() const {
  if (const auto* v = std::get_if<std::int64_t>(&value_)) return *v;
  throw ParamError("expected int, got " + std::string(estkit::to_string(type())));
}

double ParamValue::as_real() const {
  if (const auto* v = std::get_if<double>(&value_)) return *v;
  if (const auto* v = std::get_if<std::int64_t>(&value_)) return static_cast<double>(*v);
  throw ParamError("expected float, got " + std::string(estkit::to_string(type())));
}

const std::string& ParamValue::as_string() const {
  if (const auto* v = std::get_if<std::string>(&value_)) return *v;
  throw ParamError("expected string, got " + std::string(estkit::to_string(type())));
}

const ParamValue::List& ParamValue::as_list() const {
  if (const auto* v = std::get_if<List>(&value_)) return *v;
  throw ParamError("expected list, got " + std::string(estkit::to_string(type())));
}

const Estimator& ParamValue::as_estimator() const {
  if (const auto* v = std::get_if<std::shared_ptr<const Estimator>>(&value_)) return **v;
  throw ParamError("expected estimator, got " + std::string(estkit::to_string(type())));
}

const EstimatorList& ParamValue::as_estimator_list() const {
  if (const auto* v = std::get_if<EstimatorList>(&value_)) return *v;
  throw ParamError("expected estimator list, got " + std::string(estkit::to_string(type())));
}

std::string ParamValue::to_string() const {
  return std::visit(
      [](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
          return "null";
        } else if constexpr (std::is_same_v<T, bool>) {
          return v ? "true" : "false";
        } else if constexpr (std::is_same_v<T, std::int64_t>) {
          return std::to_string(v);
        } else if constexpr (std::is_same_v<T, double>) {
          return format_real(v);
        } else if constexpr (std::is_same_v<T, std::string>) {
          return "\"" + v + "\"";
        } else if constexpr (std::is_same_v<T, List>) {
          std::string out = "[";
          for (std::size_t i = 0; i < v.size(); ++i) {
            if (i) out += ", ";
            out += v[i].to_string();
          }
          return out + "]";
        } else if constexpr (std::is_same_v<T, std::shared_ptr<const Estimator>>) {
          return v->kind() + "(" + v->params().to_string() + ")";
        } else {
          std::string out = "[";
          for (std::size_t i = 0; i < v.size(); ++i) {
            if (i) out += ", ";
            out += "(" + v[i].name + ", " + v[i].estimator->kind() + "(" +
                   v[i].estimator->params().to_string() + "))";
          }
          return out + "]";
        }
      },
      value_);
}

bool ParamValue::operator==(const ParamValue& other) const {
  if (value_.index() != other.value_.index()) return false;
  return std::visit(
      [&](const auto& v) -> bool {
        using T = std::decay_t<decltype(v)>;
        const auto& w = std::get<T>(other.value_);
        if constexpr (std::is_same_v<T, std::shared_ptr<const Estimator>>) {
          return v->same_config(*w);
        } else {
          return v == w;
        }
      },
      value_);
}

ParamMap::ParamMap(std::initializer_list<Entry> entries) {
  for (const auto& [name, value] : entries) set(name, value);
}

const ParamValue* ParamMap::find(std::string_view name) const {
  for (const auto& [k, v] : entries_) {
    if (k == name) return &v;
  }
  return nullptr;
}

const ParamValue& ParamMap::at(std::string_view name) const {
  if (const auto* v = find(name)) return *v;
  throw ParamError("no parameter named '" + std::string(name) + "'");
}

void ParamMap::set(std::string name, ParamValue value) {
  for (auto& [k, v] : entries_) {
    if (k == name) {
      v = std::move(value);
      return;
    }
  }
  entries_.emplace_back(std::move(name), std::move(value));
}

ParamMap ParamMap::subset(const ParamMap& keys) const {
  ParamMap out;
  for (const auto& [k, v] : entries_) {
    if (keys.contains(k)) out.set(k, v);
  }
  return out;
}

std::string ParamMap::to_string() const {
  std::string out;
  for (const auto& [k, v] : entries_) {
    if (!out.empty()) out += ", ";
    out += k + "=" + v.to_string();
  }
  return out;
}

ParamValue coerce(const ParamSpec& spec, const ParamValue& value, std::string_view kind) {
  const auto fail = [&]() -> ParamError {
    return ParamError(std::string(kind) + ": parameter '" + spec.name + "' expects " +
                      std::string(to_string(spec.type)) + (spec.nullable ? " or null" : "") +
                      ", got " + std::string(to_string(value.type())) + " " + value.to_string());
  };
  if (value.is_none()) {
    if (spec.nullable || spec.type == ParamType::none) return value;
    throw fail();
  }
  if (spec.type == ParamType::real && value.type() == ParamType::integer) {
    return ParamValue(value.as_real());
  }
  if (value.type() != spec.type) throw fail();
  if (spec.type == ParamType::estimator_list) {
    check_child_names(value.as_estimator_list(), spec.name, kind);
  }
  return value;
}

// ---------------------------------------------------------------------------
// FittedState

void FittedState::set(std::string name, Array array) {
  if (name.empty() || name.back() != '_') {
    throw Error("fitted attribute '" + name + "' must end with '_'");
  }
  std::size_t expected = 1;
  for (auto d : array.shape) expected *= d;
  if (expected != array.values.size()) {
    throw Error("fitted attribute '" + name + "' shape does not match its value count");
  }
  for (auto& [k, v] : arrays_) {
    if (k == name) {
      v = std::move(array);
      return;
    }
  }
  arrays_.emplace_back(std::move(name), std::move(array));
}

void FittedState::set_matrix(std::string name, const Matrix& m) {
  set(std::move(name),
      Array{{m.rows(), m.cols()}, std::vector<double>(m.values().begin(), m.values().end())});
}

void FittedState::set_vector(std::string name, std::vector<double> v) {
  const std::size_t n = v.size();
  set(std::move(name), Array{{n}, std::move(v)});
}

void FittedState::set_scalar(std::string name, double v) { set(std::move(name), Array{{}, {v}}); }

bool FittedState::contains(std::string_view name) const {
  return std::any_of(arrays_.begin(), arrays_.end(),
                     [&](const auto& e) { return e.first == name; });
}

const Array& FittedState::array(std::string_view name) const {
  for (const auto& [k, v] : arrays_) {
    if (k == name) return v;
  }
  throw Error("no fitted attribute '" + std::string(name) + "'");
}

Matrix FittedState::matrix(std::string_view name) const {
  const auto& a = array(name);
  if (a.shape.size() != 2) throw Error("fitted attribute '" + std::string(name) + "' is not 2-D");
  return Matrix(a.shape[0], a.shape[1], a.values);
}

std::vector<double> FittedState::vector(std::string_view name) const { return array(name).values; }

double FittedState::scalar(std::string_view name) const {
  const auto& a = array(name);
  if (a.values.size() != 1) throw Error("fitted attribute '" + std::string(name) + "' is not scalar");
  return a.values.front();
}

void FittedState::add_child(std::string name, Estimator fitted) {
  children_.emplace_back(std::move(name), std::make_shared<const Estimator>(std::move(fitted)));
}

void FittedState::add_child(NamedEstimator child) { children_.push_back(std::move(child)); }

const Estimator& FittedState::child(std::string_view name) const {
  for (const auto& c : children_) {
    if (c.name == name) return *c.estimator;
  }
  throw Error("no fitted component '" + std::string(name) + "'");
}

const Estimator& FittedState::child(std::size_t i) const {
  if (i >= children_.size()) throw Error("fitted component index out of range");
  return *children_[i].estimator;
}

bool FittedState::operator==(const FittedState& other) const {
  if (arrays_ != other.arrays_ || children_.size() != other.children_.size()) return false;
  for (std::size_t i = 0; i < children_.size(); ++i) {
    const auto& a = *children_[i].estimator;
    const auto& b = *other.children_[i].estimator;
    if (children_[i].name != other.children_[i].name || !a.same_config(b) ||
        a.is_fitted() != b.is_fitted()) {
      return false;
    }
    if (a.is_fitted() && !(a.state() == b.state())) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// KindInfo / Estimator

const ParamSpec* KindInfo::param(std::string_view n) const {
  for (const auto& p : schema) {
    if (p.name == n) return &p;
  }
  return nullptr;
}

Estimator::Estimator(std::string_view kind, const ParamMap& overrides)
    : info_(&Registry::global().at(kind)) {
  Registry::global().audit("construct", info_->name);
  for (const auto& spec : info_->schema) params_.set(spec.name, spec.default_value);
  for (const auto& [name, value] : overrides) {
    const auto* spec = info_->param(name);
    if (!spec) {
      throw ParamError("unknown parameter '" + name + "' for " + info_->name);
    }
    params_.set(name, coerce(*spec, value, info_->name));
  }
}

const std::string& Estimator::kind() const { return info_->name; }

Capabilities Estimator::capabilities() const {
  return info_->dynamic_capabilities ? info_->dynamic_capabilities(*this) : info_->capabilities;
}

ParamMap Estimator::get_params(bool deep) const {
  ParamMap out;
  for (const auto& [name, value] : params_) {
    out.set(name, value);
    if (!deep) continue;
    if (value.type() == ParamType::estimator) {
      for (const auto& [k, v] : value.as_estimator().get_params(true)) {
        out.set(name + "__" + k, v);
      }
    } else if (value.type() == ParamType::estimator_list) {
      for (const auto& child : value.as_estimator_list()) {
        out.set(child.name, ParamValue(*child.estimator));
        for (const auto& [k, v] : child.estimator->get_params(true)) {
          out.set(child.name + "__" + k, v);
        }
      }
    }
  }
  return out;
}

Estimator Estimator::set_params(const ParamMap& updates) const {
  Estimator out = clone();
  for (const auto& [key, value] : updates) {
    const auto sep = key.find("__");
    const std::string head = key.substr(0, sep);
    const std::string rest = sep == std::string::npos ? std::string() : key.substr(sep + 2);

    if (const auto* spec = info_->param(head)) {
      if (sep == std::string::npos) {
        out.params_.set(head, coerce(*spec, value, kind()));
        continue;
      }
      const auto& current = out.params_.at(head);
      if (current.type() == ParamType::estimator) {
        out.params_.set(head, ParamValue(current.as_estimator().set_params({{rest, value}})));
        continue;
      }
      throw ParamError("cannot resolve parameter path '" + key + "': '" + head +
                       "' is not an estimator in " + kind());
    }

    bool resolved = false;
    for (const auto& [pname, pvalue] : out.params_) {
      if (pvalue.type() != ParamType::estimator_list) continue;
      auto list = pvalue.as_estimator_list();
      for (auto& child : list) {
        if (child.name != head) continue;
        if (sep == std::string::npos) {
          child.estimator = std::make_shared<const Estimator>(value.as_estimator().clone());
        } else {
          child.estimator =
              std::make_shared<const Estimator>(child.estimator->set_params({{rest, value}}));
        }
        resolved = true;
        break;
      }
      if (resolved) {
        out.params_.set(pname, ParamValue(std::move(list)));
        break;
      }
    }
    if (!resolved) {
      if (sep == std::string::npos) {
        throw ParamError("unknown parameter '" + key + "' for " + kind());
      }
      throw ParamError("cannot resolve parameter path '" + key + "': no component named '" +
                       head + "' in " + kind());
    }
  }
  return out;
}

Estimator Estimator::clone() const {
  Estimator out = *this;
  out.state_.reset();
  return out;
}

void Estimator::validate() const {
  Registry::global().audit("validate", kind());
  if (info_->validate) info_->validate(*this);
}

void Estimator::check_input(const Data& X, bool fitting) const {
  const auto caps = capabilities();
  if (caps.input == InputKind::documents && is_matrix(X)) {
    throw DataError(kind() + " expects tokenized documents, got a numeric matrix");
  }
  if (caps.input == InputKind::matrix && !is_matrix(X)) {
    throw DataError(kind() + " expects a numeric matrix, got raw documents");
  }
  if (fitting && n_rows(X) == 0) throw DataError(kind() + ": cannot fit on an empty dataset");
  if (const auto* m = std::get_if<Matrix>(&X); m && !all_finite(*m)) {
    throw DataError(kind() + ": input contains NaN or infinity");
  }
  if (const auto* s = std::get_if<SparseMatrix>(&X); s && !all_finite(*s)) {
    throw DataError(kind() + ": input contains NaN or infinity");
  }
  if (!fitting && state_ && is_matrix(X) && state_->contains("n_features_in_")) {
    const auto expected = static_cast<std::size_t>(state_->scalar("n_features_in_"));
    if (n_cols(X) != expected) {
      throw DataError(kind() + ": X has " + std::to_string(n_cols(X)) +
                      " features, but the model was fit on " + std::to_string(expected));
    }
  }
}

void Estimator::require_fitted(std::string_view method) const {
  if (!state_) {
    throw NotFittedError(kind() + " is not fitted; call fit before " + std::string(method));
  }
}

Estimator& Estimator::fit(const Data& X, std::span<const double> y) {
  state_.reset();
  validate();
  check_input(X, true);
  const auto caps = capabilities();
  if (caps.supervised && y.empty()) {
    throw DataError(kind() + " is supervised; fit requires targets y");
  }
  if (!y.empty()) {
    if (y.size() != n_rows(X)) {
      throw DataError(kind() + ": y has " + std::to_string(y.size()) + " entries but X has " +
                      std::to_string(n_rows(X)) + " rows");
    }
    if (!std::all_of(y.begin(), y.end(), [](double v) { return std::isfinite(v); })) {
      throw DataError(kind() + ": y contains NaN or infinity");
    }
  }
  Registry::global().audit("fit", kind());
  FittedState state = info_->fit(*this, X, y);
  if (is_matrix(X) && !state.contains("n_features_in_")) {
    state.set_scalar("n_features_in_", static_cast<double>(n_cols(X)));
  }
  state_ = std::make_shared<const FittedState>(std::move(state));
  return *this;
}

Data Estimator::fit_transform(const Data& X, std::span<const double> y) {
  if (!capabilities().transformer) {
    throw CapabilityError(kind() + " does not implement transform");
  }
  if (!info_->fit_transform) return fit(X, y).transform(X);

  state_.reset();
  validate();
  check_input(X, true);
  if (capabilities().supervised && y.empty()) {
    throw DataError(kind() + " is supervised; fit requires targets y");
  }
  if (!y.empty() && y.size() != n_rows(X)) {
    throw DataError(kind() + ": y length does not match X");
  }
  Registry::global().audit("fit", kind());
  auto [state, out] = info_->fit_transform(*this, X, y);
  if (is_matrix(X) && !state.contains("n_features_in_")) {
    state.set_scalar("n_features_in_", static_cast<double>(n_cols(X)));
  }
  state_ = std::make_shared<const FittedState>(std::move(state));
  return out;
}

std::vector<double> Estimator::fit_predict(const Data& X, std::span<const double> y) {
  if (!capabilities().predictor) throw CapabilityError(kind() + " does not implement predict");
  return fit(X, y).predict(X);
}

const FittedState& Estimator::state() const {
  require_fitted("inspecting fitted attributes");
  return *state_;
}

std::vector<double> Estimator::predict(const Data& X) const {
  if (!capabilities().predictor || !info_->predict) {
    throw CapabilityError(kind() + " does not implement predict");
  }
  require_fitted("predict");
  check_input(X, false);
  Registry::global().audit("predict", kind());
  return info_->predict(*this, X);
}

Matrix Estimator::decision_function(const Data& X) const {
  if (!capabilities().decision_function || !info_->decision_function) {
    throw CapabilityError(kind() + " does not implement decision_function");
  }
  require_fitted("decision_function");
  check_input(X, false);
  Registry::global().audit("decision_function", kind());
  return info_->decision_function(*this, X);
}

Matrix Estimator::predict_proba(const Data& X) const {
  if (!capabilities().probabilistic || !info_->predict_proba) {
    throw CapabilityError(kind() + " does not implement predict_proba");
  }
  require_fitted("predict_proba");
  check_input(X, false);
  Registry::global().audit("predict_proba", kind());
  return info_->predict_proba(*this, X);
}

Data Estimator::transform(const Data& X) const {
  if (!capabilities().transformer || !info_->transform) {
    throw CapabilityError(kind() + " does not implement transform");
  }
  require_fitted("transform");
  check_input(X, false);
  Registry::global().audit("transform", kind());
  return info_->transform(*this, X);
}

double Estimator::score(const Data& X, std::span<const double> y) const {
  const auto caps = capabilities();
  if (!caps.predictor) throw CapabilityError(kind() + " does not implement score");
  require_fitted("score");
  if (info_->score) {
    check_input(X, false);
    Registry::global().audit("score", kind());
    return info_->score(*this, X, y);
  }
  if (y.empty()) throw DataError(kind() + ": score requires targets y");
  if (y.size() != n_rows(X)) throw DataError(kind() + ": y length does not match X");
  switch (caps.task) {
    case Task::classification: return metrics::accuracy(y, predict(X));
    case Task::regression: return metrics::r2(y, predict(X));
    default: break;
  }
  throw CapabilityError(kind() + " has no default score");
}

bool Estimator::same_config(const Estimator& other) const {
  return info_ == other.info_ && params_ == other.params_;
}

Estimator Estimator::restore(std::string_view kind, const ParamMap& params, FittedState state) {
  Estimator out(kind, params);
  out.state_ = std::make_shared<const FittedState>(std::move(state));
  return out;
}

// ---------------------------------------------------------------------------
// Registry

Registry& Registry::global() {
  static Registry* instance = [] {
    auto* r = new Registry();
    detail::register_builtins(*r);
    return r;
  }();
  return *instance;
}

void Registry::add(KindInfo info) {
  if (info.name.empty()) throw ParamError("estimator kind needs a name");
  if (!info.fit) throw ParamError("estimator kind '" + info.name + "' has no fit hook");
  for (const auto& spec : info.schema) {
    coerce(spec, spec.default_value, info.name);
  }
  std::unique_lock lock(mutex_);
  if (kinds_.contains(info.name)) {
    throw ParamError("estimator kind '" + info.name + "' is already registered");
  }
  auto name = info.name;
  kinds_.emplace(std::move(name), std::make_unique<const KindInfo>(std::move(info)));
}

bool Registry::contains(std::string_view kind) const {
  std::shared_lock lock(mutex_);
  return kinds_.find(kind) != kinds_.end();
}

const KindInfo& Registry::at(std::string_view kind) const {
  std::shared_lock lock(mutex_);
  const auto it = kinds_.find(kind);
  if (it == kinds_.end()) {
    throw ParamError("unknown estimator kind '" + std::string(kind) + "'");
  }
  return *it->second;
}

std::vector<std::string> Registry::kinds() const {
  std::shared_lock lock(mutex_);
  std::vector<std::string> out;
  for (const auto& [name, info] : kinds_) out.push_back(name);
  return out;
}

void Registry::set_audit(AuditHook hook) {
  std::lock_guard lock(audit_mutex_);
  audit_enabled_ = static_cast<bool>(hook);
  audit_ = std::move(hook);
}

void Registry::audit(std::string_view op, std::string_view kind) const {
  if (!audit_enabled_) return;
  std::lock_guard lock(audit_mutex_);
  if (audit_) audit_(op, kind);
}

AuditLog::AuditLog() {
  Registry::global().set_audit([this](std::string_view op, std::string_view kind) {
    std::lock_guard lock(mutex_);
    entries_.push_back(std::string(op) + ":" + std::string(kind));
  });
}

AuditLog::~AuditLog() { Registry::global().set_audit(nullptr); }

std::vector<std::string> AuditLog::entries() const {
  std::lock_guard lock(mutex_);
  return entries_;
}

}  // namespace estkit
