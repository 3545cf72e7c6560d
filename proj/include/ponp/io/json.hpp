#pragma once

// JSON helpers: complex numbers as [re, im] pairs and a validator for the
// subset of JSON Schema used by the emitted artifacts (type, required,
// properties, items, minItems, minimum, enum).

#include <complex>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ponp/error.hpp"
#include "ponp/series.hpp"

namespace ponp::io {

using json = nlohmann::json;

inline json to_json_cplx(cplx z) { return json::array({z.real(), z.imag()}); }

/// Accepts a number or a two-element array [re, im].
inline cplx cplx_from_json(const json& j, const std::string& where) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  throw Error(ErrorKind::config, where + ": expected a number or [re, im]");
}

/// Nonzero modes of a circle series as [[k, re, im], ...], dropping |c| <= threshold.
inline json circle_table(const CircleSeries& c, double threshold) {
  json rows = json::array();
  for (int k = -c.bandwidth(); k <= c.bandwidth(); ++k)
    if (std::abs(c[k]) > threshold) rows.push_back(json::array({k, c[k].real(), c[k].imag()}));
  return rows;
}

namespace detail {

inline bool type_matches(const json& v, const std::string& type) {
  if (type == "object") return v.is_object();
  if (type == "array") return v.is_array();
  if (type == "number") return v.is_number();
  if (type == "integer") return v.is_number_integer();
  if (type == "string") return v.is_string();
  if (type == "boolean") return v.is_boolean();
  if (type == "null") return v.is_null();
  return false;
}

inline void validate_into(const json& v, const json& schema, const std::string& path, std::vector<std::string>& out) {
  if (schema.contains("type")) {
    const json& t = schema["type"];
    bool ok = false;
    if (t.is_string())
      ok = type_matches(v, t.get<std::string>());
    else
      for (const auto& alt : t) ok = ok || type_matches(v, alt.get<std::string>());
    if (!ok) {
      out.push_back(path + ": expected type " + t.dump());
      return;
    }
  }
  if (schema.contains("enum")) {
    bool found = false;
    for (const auto& e : schema["enum"]) found = found || e == v;
    if (!found) out.push_back(path + ": value not in enum");
  }
  if (schema.contains("minimum") && v.is_number() && v.get<double>() < schema["minimum"].get<double>())
    out.push_back(path + ": below minimum");
  if (v.is_object()) {
    if (schema.contains("required"))
      for (const auto& r : schema["required"])
        if (!v.contains(r.get<std::string>())) out.push_back(path + ": missing required field '" + r.get<std::string>() + "'");
    if (schema.contains("properties"))
      for (const auto& [key, sub] : schema["properties"].items())
        if (v.contains(key)) validate_into(v[key], sub, path + "." + key, out);
  }
  if (v.is_array()) {
    if (schema.contains("minItems") && v.size() < schema["minItems"].get<std::size_t>())
      out.push_back(path + ": fewer than " + schema["minItems"].dump() + " items");
    if (schema.contains("items"))
      for (std::size_t i = 0; i < v.size(); ++i)
        validate_into(v[i], schema["items"], path + "[" + std::to_string(i) + "]", out);
  }
}

}  // namespace detail

/// Human-readable violations; empty when the document conforms.
inline std::vector<std::string> validate_schema(const json& doc, const json& schema) {
  std::vector<std::string> out;
  detail::validate_into(doc, schema, "$", out);
  return out;
}

}  // namespace ponp::io
