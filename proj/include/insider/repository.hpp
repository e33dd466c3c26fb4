#pragma once

/// @file repository.hpp
/// In-memory store of reusable per-component failure logic.

#include <map>
#include <string>
#include <vector>

#include "insider/error.hpp"
#include "insider/safety_model.hpp"

namespace insider {

/// Keys are a component name with an optional version label, e.g. "c1" or
/// "c1@v1". Keys double as file names on disk, so path separators and
/// whitespace are rejected.
inline bool IsRepositoryKey(const std::string& key) {
  if (key.empty() || key == "." || key == "..") return false;
  for (unsigned char ch : key)
    if (ch <= ' ' || ch == '/' || ch == '\\' || ch == 0x7f) return false;
  return true;
}

class ComponentRepository {
 public:
  /// Stores a canonicalized copy. Throws InvalidComponent if @p component is
  /// not valid on its own, InvalidIdentifier for a malformed key.
  void store(SamComponent component, const std::string& key) {
    if (!IsRepositoryKey(key))
      throw Error(ErrorCode::kInvalidIdentifier, "repository key '" + key + "'");
    auto issues = ValidateSamComponent(component);
    if (!issues.empty()) {
      issues.insert(issues.begin(), {ErrorCode::kInvalidComponent,
                                     "component '" + component.name + "' cannot be stored"});
      throw Error(std::move(issues));
    }
    detail::Canonicalize(component);
    entries_[key] = std::move(component);
  }

  /// Throws UnknownKey.
  const SamComponent& fetch(const std::string& key) const {
    auto it = entries_.find(key);
    if (it == entries_.end())
      throw Error(ErrorCode::kUnknownKey, "repository has no entry '" + key + "'");
    return it->second;
  }

  const SamComponent* find(const std::string& key) const {
    auto it = entries_.find(key);
    return it == entries_.end() ? nullptr : &it->second;
  }

  bool contains(const std::string& key) const { return entries_.count(key) > 0; }
  bool empty() const { return entries_.empty(); }
  const std::map<std::string, SamComponent>& entries() const { return entries_; }

  friend bool operator==(const ComponentRepository&, const ComponentRepository&) = default;

 private:
  std::map<std::string, SamComponent> entries_;
};

inline ComponentRepository RepoStore(ComponentRepository repo, const SamComponent& component,
                                     const std::string& key) {
  repo.store(component, key);
  return repo;
}

inline SamComponent RepoFetch(const ComponentRepository& repo, const std::string& key) {
  return repo.fetch(key);
}

}  // namespace insider
