#pragma once

#include <set>
#include <string>
#include <type_traits>
#include <vector>

#include <json.hpp>

#include "tenrl/errors.hpp"

namespace tenrl {

/// Reads fields from a JSON object while remembering which keys were used, so
/// that finish() can reject anything left over (typically a misspelt key).
class ObjectReader {
 public:
  ObjectReader(const nlohmann::json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_, "expected an object");
  }

  std::string path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  bool has(const std::string& key) const { return j_.contains(key); }

  const nlohmann::json& child(const std::string& key) {
    if (!j_.contains(key)) throw ConfigError(path(key), "missing required field");
    used_.insert(key);
    return j_.at(key);
  }

  template <class T>
  T get(const std::string& key, T fallback) {
    if (!j_.contains(key)) return fallback;
    return convert<T>(child(key), path(key));
  }

  template <class T>
  T require(const std::string& key) {
    return convert<T>(child(key), path(key));
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!used_.count(it.key())) throw ConfigError(path(it.key()), "unknown field");
    }
  }

  template <class T>
  static T convert(const nlohmann::json& v, const std::string& where) {
    if constexpr (std::is_same_v<T, bool>) {
      if (!v.is_boolean()) throw ConfigError(where, "expected a boolean");
      return v.get<bool>();
    } else if constexpr (std::is_integral_v<T> && std::is_unsigned_v<T>) {
      if (!v.is_number_integer() || (v.is_number_integer() && !v.is_number_unsigned() && v.get<long long>() < 0)) {
        throw ConfigError(where, "expected a non-negative integer");
      }
      return v.get<T>();
    } else if constexpr (std::is_integral_v<T>) {
      if (!v.is_number_integer()) throw ConfigError(where, "expected an integer");
      return v.get<T>();
    } else if constexpr (std::is_floating_point_v<T>) {
      if (!v.is_number()) throw ConfigError(where, "expected a number");
      return v.get<T>();
    } else if constexpr (std::is_same_v<T, std::string>) {
      if (!v.is_string()) throw ConfigError(where, "expected a string");
      return v.get<std::string>();
    } else {
      if (!v.is_array()) throw ConfigError(where, "expected an array");
      T out;
      for (std::size_t i = 0; i < v.size(); ++i) {
        out.push_back(convert<typename T::value_type>(v[i], where + "[" + std::to_string(i) + "]"));
      }
      return out;
    }
  }

 private:
  const nlohmann::json& j_;
  std::string path_;
  std::set<std::string> used_;
};

}  // namespace tenrl
