#pragma once

// Serialization of models and oracle results, plus the schemas every emitted
// JSON document conforms to.

#include <string>

#include "ponp/expansion.hpp"
#include "ponp/hierarchy.hpp"
#include "ponp/io/config.hpp"
#include "ponp/io/json.hpp"
#include "ponp/oracle.hpp"

namespace ponp::io {

/// Coefficients at or below this magnitude are omitted from mode tables.
constexpr double kTableThreshold = 1e-14;

inline json map_to_json(const ExteriorMap& map) {
  json tail = json::array();
  for (cplx c : map.tail()) tail.push_back(to_json_cplx(c));
  return {{"cap", map.cap()}, {"tail", tail}, {"univalence_radius", map.univalence_radius()}};
}

inline json model_to_json(const ExpansionModel& model, const ExperimentConfig& cfg) {
  json X = json::array();
  for (const auto& x : model.coeffs.X) X.push_back(circle_table(x, kTableThreshold));
  json residuals = json::array();
  for (int p = 1; p <= model.coeffs.order; ++p) residuals.push_back(hierarchy_residual(model.coeffs, model.szego, p));
  const double omega_res = omega_circle_residual(model.szego);
  return {
      {"schema", "ponp.model/1"},
      {"map", map_to_json(model.map)},
      {"weight", {{"kind", cfg.weight.kind}, {"fit_residual", model.weight.fit_residual}, {"floor", model.weight.floor}}},
      {"rho", model.szego.inner_radius()},
      {"M", model.szego.bidegree()},
      {"K", cfg.K},
      {"kappa", model.order},
      {"szego", {{"V_inf", model.szego.V_inf}, {"V", circle_table(model.szego.V_ext, kTableThreshold)}}},
      {"hierarchy", {{"X", X}, {"table_threshold", kTableThreshold}}},
      {"norm", {{"d", model.norm.d}, {"c", model.norm.c}}},
      {"diagnostics", {{"omega_circle_residual", omega_res}, {"hierarchy_residuals", residuals}}},
  };
}

inline json oracle_to_json(const OraclePolynomials& polys, const QuadratureRule& rule) {
  json coeffs = json::array();
  for (const auto& row : polys.coefficients) {
    json r = json::array();
    for (cplx c : row) r.push_back(to_json_cplx(c));
    coeffs.push_back(r);
  }
  return {
      {"schema", "ponp.oracle/1"},
      {"degree", polys.degree},
      {"kappa", polys.kappa},
      {"coefficients", coeffs},
      {"gram_residual", polys.gram_residual},
      {"gram_row_residual", polys.gram_row_residual},
      {"rule",
       {{"nodes", rule.nodes.size()},
        {"angular", rule.resolution.angular},
        {"radial_levels", rule.resolution.radial_levels},
        {"radial_nodes", rule.resolution.radial_nodes},
        {"mass", rule.total_mass()},
        {"declared_accuracy", rule.declared_accuracy},
        {"center", to_json_cplx(rule.center)}}},
  };
}

// ---------------------------------------------------------------------------
// Schemas

namespace schema_detail {

inline json number() { return {{"type", "number"}}; }
inline json integer() { return {{"type", "integer"}}; }
inline json cplx_pair() { return {{"type", "array"}, {"items", number()}, {"minItems", 2}}; }
inline json array_of(const json& item) { return {{"type", "array"}, {"items", item}}; }
inline json object(const json& props, const json& required) {
  return {{"type", "object"}, {"properties", props}, {"required", required}};
}
inline json mode_table() { return array_of({{"type", "array"}, {"items", number()}, {"minItems", 3}}); }

}  // namespace schema_detail

inline json model_schema() {
  using namespace schema_detail;
  return object(
      {{"schema", {{"type", "string"}, {"enum", {"ponp.model/1"}}}},
       {"map", object({{"cap", number()}, {"tail", array_of(cplx_pair())}, {"univalence_radius", number()}},
                      {"cap", "tail", "univalence_radius"})},
       {"weight", object({{"kind", {{"type", "string"}}}, {"fit_residual", number()}, {"floor", number()}},
                         {"kind", "fit_residual", "floor"})},
       {"rho", number()},
       {"M", integer()},
       {"K", integer()},
       {"kappa", integer()},
       {"szego", object({{"V_inf", number()}, {"V", mode_table()}}, {"V_inf", "V"})},
       {"hierarchy", object({{"X", {{"type", "array"}, {"items", mode_table()}, {"minItems", 1}}},
                             {"table_threshold", number()}},
                            {"X", "table_threshold"})},
       {"norm", object({{"d", array_of(number())}, {"c", array_of(number())}}, {"d", "c"})},
       {"diagnostics", object({{"omega_circle_residual", number()}, {"hierarchy_residuals", array_of(number())}},
                              {"omega_circle_residual", "hierarchy_residuals"})}},
      {"schema", "map", "weight", "rho", "M", "K", "kappa", "szego", "hierarchy", "norm", "diagnostics"});
}

inline json oracle_schema() {
  using namespace schema_detail;
  return object({{"schema", {{"type", "string"}, {"enum", {"ponp.oracle/1"}}}},
                 {"degree", integer()},
                 {"kappa", array_of(number())},
                 {"coefficients", array_of(array_of(cplx_pair()))},
                 {"gram_residual", number()},
                 {"gram_row_residual", array_of(number())},
                 {"rule", object({{"nodes", integer()},
                                  {"angular", integer()},
                                  {"radial_levels", integer()},
                                  {"radial_nodes", integer()},
                                  {"mass", number()},
                                  {"declared_accuracy", number()},
                                  {"center", cplx_pair()}},
                                 {"nodes", "angular", "radial_levels", "radial_nodes", "mass", "declared_accuracy",
                                  "center"})}},
                {"schema", "degree", "kappa", "coefficients", "gram_residual", "rule"});
}

inline json eval_schema() {
  using namespace schema_detail;
  const json row = object({{"N", integer()},
                           {"z", cplx_pair()},
                           {"phi_abs", {{"type", {"number", "null"}}}},
                           {"valid", {{"type", "boolean"}}},
                           {"monic", {{"type", {"array", "null"}}}},
                           {"normalized", {{"type", {"array", "null"}}}},
                           {"leading_coeff", {{"type", {"number", "null"}}}}},
                          {"N", "z", "phi_abs", "valid", "monic", "normalized", "leading_coeff"});
  return object({{"schema", {{"type", "string"}, {"enum", {"ponp.eval/1"}}}},
                 {"kappa", integer()},
                 {"rows", array_of(row)},
                 {"flagged", integer()}},
                {"schema", "kappa", "rows", "flagged"});
}

inline json verify_schema() {
  using namespace schema_detail;
  const json check = object({{"name", {{"type", "string"}}},
                             {"value", {{"type", {"number", "null"}}}},
                             {"expected", {{"type", "string"}}},
                             {"pass", {{"type", "boolean"}}}},
                            {"name", "value", "expected", "pass"});
  const json slope = object({{"kappa", integer()},
                             {"pointwise", {{"type", {"number", "null"}}}},
                             {"l2", {{"type", {"number", "null"}}}},
                             {"leading", {{"type", {"number", "null"}}}}},
                            {"kappa", "pointwise", "l2", "leading"});
  return object({{"schema", {{"type", "string"}, {"enum", {"ponp.verify/1"}}}},
                 {"point", cplx_pair()},
                 {"n", array_of(integer())},
                 {"carleman", {{"type", "boolean"}}},
                 {"slopes", array_of(slope)},
                 {"checks", array_of(check)},
                 {"pass", {{"type", "boolean"}}}},
                {"schema", "point", "n", "carleman", "slopes", "checks", "pass"});
}

inline json distributional_schema() {
  using namespace schema_detail;
  const json term = object({{"nu", integer()}, {"j", integer()}, {"k", integer()}, {"value", cplx_pair()}},
                           {"nu", "j", "k", "value"});
  const json row = object({{"N", integer()},
                           {"oracle", cplx_pair()},
                           {"expansion", array_of(cplx_pair())},
                           {"errors", array_of(number())},
                           {"terms", array_of(term)}},
                          {"N", "oracle", "expansion", "errors", "terms"});
  return object({{"schema", {{"type", "string"}, {"enum", {"ponp.distributional/1"}}}},
                 {"kappa", integer()},
                 {"leading_value", cplx_pair()},
                 {"rows", array_of(row)},
                 {"error_slopes", array_of({{"type", {"number", "null"}}})}},
                {"schema", "kappa", "leading_value", "rows", "error_slopes"});
}

inline json kernel_schema() {
  using namespace schema_detail;
  const json row = object({{"N", integer()},
                           {"z", cplx_pair()},
                           {"oracle", cplx_pair()},
                           {"leading", cplx_pair()},
                           {"modulus_ratio_minus_one", number()},
                           {"phase_difference", number()}},
                          {"N", "z", "oracle", "leading", "modulus_ratio_minus_one", "phase_difference"});
  const json bw = object({{"N", integer()}, {"sup_over_N2", number()}}, {"N", "sup_over_N2"});
  return object({{"schema", {{"type", "string"}, {"enum", {"ponp.kernel/1"}}}},
                 {"w", cplx_pair()},
                 {"phi_w", cplx_pair()},
                 {"rows", array_of(row)},
                 {"ratio_reduction", array_of(number())},
                 {"bernstein_walsh", object({{"rho", number()},
                                             {"rho1", number()},
                                             {"rows", array_of(bw)},
                                             {"variation", number()}},
                                            {"rho", "rho1", "rows", "variation"})}},
                {"schema", "w", "phi_w", "rows", "ratio_reduction", "bernstein_walsh"});
}

}  // namespace ponp::io
