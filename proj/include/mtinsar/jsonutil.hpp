#pragma once

#include <initializer_list>
#include <string>

#include <json.hpp>

#include "mtinsar/errors.hpp"

namespace mtinsar {

using Json = nlohmann::json;

/// Reject unknown keys: silent typos in a science run are worse than a
/// hard failure.
inline void check_keys(const Json& obj, const std::string& context,
                       std::initializer_list<const char*> allowed) {
  if (!obj.is_object())
    throw Error(ErrorCode::InvalidConfig, context + " must be an object");
  for (const auto& [key, value] : obj.items()) {
    bool ok = false;
    for (const char* a : allowed)
      if (key == a) {
        ok = true;
        break;
      }
    if (!ok)
      throw Error(ErrorCode::InvalidConfig,
                  "unknown key '" + key + "' in " + context);
  }
}

template <class T>
T get_req(const Json& obj, const std::string& context, const char* key) {
  if (!obj.contains(key))
    throw Error(ErrorCode::InvalidConfig,
                context + " is missing required key '" + key + "'");
  try {
    return obj.at(key).get<T>();
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::InvalidConfig,
                context + "." + key + ": " + e.what());
  }
}

template <class T>
T get_or(const Json& obj, const std::string& context, const char* key,
         T fallback) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const Json::exception& e) {
    throw Error(ErrorCode::InvalidConfig,
                context + "." + key + ": " + e.what());
  }
}

inline void require_positive(double v, const std::string& field) {
  if (!(v > 0.0))
    throw Error(ErrorCode::InvalidConfig, field + " must be > 0");
}

inline void require_nonnegative(double v, const std::string& field) {
  if (!(v >= 0.0))
    throw Error(ErrorCode::InvalidConfig, field + " must be >= 0");
}

}  // namespace mtinsar
