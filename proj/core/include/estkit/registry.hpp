#pragma once

#include <atomic>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "estkit/estimator.hpp"

namespace estkit {

// Receives every dispatched estimator operation as (operation, kind), e.g.
// ("construct", "PCA") or ("fit", "SVC").
using AuditHook = std::function<void(std::string_view, std::string_view)>;

// Kind name -> implementation hooks. Built-in kinds are registered on first
// access; external code adds its own with add(). Registered kinds are
// usable everywhere built-ins are.
class Registry {
 public:
  static Registry& global();

  // Throws ParamError on a duplicate name, a missing fit hook, or a schema
  // default that does not match its declared type.
  void add(KindInfo info);
  bool contains(std::string_view kind) const;
  // Throws ParamError for unknown kinds.
  const KindInfo& at(std::string_view kind) const;
  std::vector<std::string> kinds() const;

  // Installs (or with nullptr removes) the audit hook.
  void set_audit(AuditHook hook);
  void audit(std::string_view op, std::string_view kind) const;

 private:
  Registry() = default;

  mutable std::shared_mutex mutex_;
  std::map<std::string, std::unique_ptr<const KindInfo>, std::less<>> kinds_;
  mutable std::mutex audit_mutex_;
  AuditHook audit_;
  std::atomic<bool> audit_enabled_{false};
};

// Scoped audit recorder; collects "op:kind" strings while alive.
class AuditLog {
 public:
  AuditLog();
  ~AuditLog();
  AuditLog(const AuditLog&) = delete;
  AuditLog& operator=(const AuditLog&) = delete;

  std::vector<std::string> entries() const;

 private:
  mutable std::mutex mutex_;
  std::vector<std::string> entries_;
};

}  // namespace estkit
