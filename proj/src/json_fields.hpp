#pragma once

// Strict reader for JSON objects: optional keys, type-checked, with unknown
// keys rejected. Error messages carry the dotted path of the offending key.

#include <cstdint>
#include <set>
#include <string>
#include <type_traits>

#include <json.hpp>

#include "reticula/error.hpp"

namespace reticula::detail {

class ObjectReader {
 public:
  ObjectReader(const nlohmann::json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ValidationError(path_ + ": expected a JSON object");
  }

  std::string at(const std::string& key) const { return path_ + "." + key; }

  // Also registers key as known for reject_unknown().
  bool has(const char* key) const {
    used_.insert(key);
    return j_.contains(key) && !j_[key].is_null();
  }

  // Returns a nested object; callers check has(key) first.
  const nlohmann::json& child(const char* key) {
    used_.insert(key);
    return j_.at(key);
  }

  template <typename T>
  void read(const char* key, T& out) {
    used_.insert(key);
    if (!has(key)) return;
    const auto& v = j_[key];
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) fail(key, "expected a boolean");
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) fail(key, "expected an integer");
      if constexpr (std::is_unsigned_v<T>) {
        if (v.is_number_unsigned()) {
          out = v.get<T>();
          return;
        }
        if (v.get<std::int64_t>() < 0) fail(key, "must be non-negative");
      }
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) fail(key, "expected a number");
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) fail(key, "expected a string");
    }
    out = v.get<T>();
  }

  // Reads a two-element [min, max] array.
  template <typename T>
  void read_range(const char* key, T& lo, T& hi) {
    used_.insert(key);
    if (!has(key)) return;
    const auto& v = j_[key];
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
      fail(key, "expected [min, max]");
    }
    if constexpr (std::is_integral_v<T>) {
      if (!v[0].is_number_integer() || !v[1].is_number_integer()) {
        fail(key, "expected integer [min, max]");
      }
    }
    lo = v[0].get<T>();
    hi = v[1].get<T>();
  }

  void require(bool ok, const char* key, const std::string& what) const {
    if (!ok) fail(key, what);
  }

  void reject_unknown() const {
    for (const auto& [key, value] : j_.items()) {
      if (!used_.contains(key)) throw ValidationError(at(key) + ": unknown key");
    }
  }

  [[noreturn]] void fail(const char* key, const std::string& what) const {
    throw ValidationError(at(key) + ": " + what);
  }

 private:
  const nlohmann::json& j_;
  std::string path_;
  mutable std::set<std::string> used_;
};

}  // namespace reticula::detail
