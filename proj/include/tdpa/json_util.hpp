#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

#include <json.hpp>

#include "tdpa/errors.hpp"
#include "tdpa/geometry.hpp"

namespace tdpa::jsonu {

using Json = nlohmann::ordered_json;

/// Every key must be known and every non-optional key present; typos in
/// hand-written files fail loudly instead of silently falling back to
/// defaults.
inline void require_keys(const Json& j, const std::string& context,
                         std::initializer_list<const char*> required,
                         std::initializer_list<const char*> optional = {}) {
  if (!j.is_object()) throw ValidationError(context + ": expected a JSON object");
  for (const char* key : required) {
    if (!j.contains(key)) throw ValidationError(context + ": missing key '" + key + "'");
  }
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const char* k : required) known = known || key == k;
    for (const char* k : optional) known = known || key == k;
    if (!known) throw ValidationError(context + ": unknown key '" + key + "'");
  }
}

inline double get_finite(const Json& j, const char* key, const std::string& context) {
  const Json& v = j.at(key);
  if (!v.is_number()) throw ValidationError(context + ": '" + key + "' must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ValidationError(context + ": '" + key + "' must be finite");
  return d;
}

inline std::int64_t get_int(const Json& j, const char* key, const std::string& context) {
  const Json& v = j.at(key);
  if (!v.is_number_integer()) throw ValidationError(context + ": '" + key + "' must be an integer");
  return v.get<std::int64_t>();
}

inline bool get_bool(const Json& j, const char* key, const std::string& context) {
  const Json& v = j.at(key);
  if (!v.is_boolean()) throw ValidationError(context + ": '" + key + "' must be a boolean");
  return v.get<bool>();
}

inline std::string get_string(const Json& j, const char* key, const std::string& context) {
  const Json& v = j.at(key);
  if (!v.is_string()) throw ValidationError(context + ": '" + key + "' must be a string");
  return v.get<std::string>();
}

inline BBox get_box(const Json& j, const char* key, const std::string& context) {
  const Json& v = j.at(key);
  if (!v.is_array() || v.size() != 4) {
    throw ValidationError(context + ": '" + key + "' must be [x, y, w, h]");
  }
  for (const Json& c : v) {
    if (!c.is_number()) throw ValidationError(context + ": '" + key + "' components must be numbers");
  }
  return BBox(v[0].get<double>(), v[1].get<double>(), v[2].get<double>(), v[3].get<double>());
}

inline Json box_json(const BBox& b) { return Json::array({b.x, b.y, b.w, b.h}); }

inline std::vector<float> get_floats(const Json& j, const char* key, const std::string& context) {
  const Json& v = j.at(key);
  if (!v.is_array() || v.empty()) throw ValidationError(context + ": '" + key + "' must be a non-empty array");
  std::vector<float> out;
  out.reserve(v.size());
  for (const Json& c : v) {
    if (!c.is_number()) throw ValidationError(context + ": '" + key + "' components must be numbers");
    const double d = c.get<double>();
    if (!std::isfinite(d)) throw ValidationError(context + ": '" + key + "' must be finite");
    out.push_back(static_cast<float>(d));
  }
  return out;
}

inline Json floats_json(const std::vector<float>& v) {
  Json arr = Json::array();
  for (float f : v) arr.push_back(static_cast<double>(f));
  return arr;
}

inline Json parse_line(const std::string& line, std::size_t line_no, const std::string& context) {
  try {
    return Json::parse(line);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(context + " line " + std::to_string(line_no) + ": malformed JSON (" + e.what() + ")");
  }
}

}  // namespace tdpa::jsonu
