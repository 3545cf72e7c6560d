#pragma once

// Experiment configuration: parsing, validation and construction of the map,
// weight, model and test function it describes.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "ponp/distributional.hpp"
#include "ponp/expansion.hpp"
#include "ponp/geometry.hpp"
#include "ponp/io/json.hpp"
#include "ponp/quadrature.hpp"

namespace ponp::io {

constexpr int kMaxKappa = 8;

/// Samples of a positive weight on a tensor grid of first-kind Chebyshev points,
/// interpolated barycentrically in each coordinate.
class ChebyshevGridWeight {
 public:
  ChebyshevGridWeight() = default;
  ChebyshevGridWeight(double x0, double x1, double y0, double y1, int nx, int ny, std::vector<double> values)
      : x0_(x0), x1_(x1), y0_(y0), y1_(y1), nx_(nx), ny_(ny), values_(std::move(values)) {
    if (!(x1 > x0 && y1 > y0)) throw Error(ErrorKind::config, "weight.box must satisfy xmin < xmax, ymin < ymax");
    if (nx < 2 || ny < 2) throw Error(ErrorKind::config, "weight.n needs at least 2 points per direction");
    if (values_.size() != static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny))
      throw Error(ErrorKind::config, "weight.values must hold nx * ny samples");
    for (double v : values_)
      if (!(v > 0.0) || !std::isfinite(v)) throw Error(ErrorKind::positivity, "weight.values must be positive");
  }

  /// Chebyshev point i of n on [a, b].
  static double node(double a, double b, int n, int i) {
    return 0.5 * (a + b) - 0.5 * (b - a) * std::cos(std::numbers::pi * (i + 0.5) / n);
  }

  double operator()(cplx z) const {
    const double x = z.real(), y = z.imag();
    if (x < x0_ || x > x1_ || y < y0_ || y > y1_)
      throw Error(ErrorKind::domain, "custom weight evaluated outside its sample box");
    const auto wx = weights(x0_, x1_, nx_, x);
    const auto wy = weights(y0_, y1_, ny_, y);
    double s = 0.0;
    for (int i = 0; i < nx_; ++i) {
      if (wx[static_cast<std::size_t>(i)] == 0.0) continue;
      double row = 0.0;
      for (int j = 0; j < ny_; ++j)
        row += wy[static_cast<std::size_t>(j)] * values_[static_cast<std::size_t>(i) * static_cast<std::size_t>(ny_) +
                                                         static_cast<std::size_t>(j)];
      s += wx[static_cast<std::size_t>(i)] * row;
    }
    return s;
  }

 private:
  // Normalized barycentric weights; a node hit exactly gets weight one.
  static std::vector<double> weights(double a, double b, int n, double x) {
    std::vector<double> w(static_cast<std::size_t>(n));
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      const double xi = node(a, b, n, i);
      if (x == xi) {
        std::fill(w.begin(), w.end(), 0.0);
        w[static_cast<std::size_t>(i)] = 1.0;
        return w;
      }
      const double lam = (i % 2 == 0 ? 1.0 : -1.0) * std::sin(std::numbers::pi * (i + 0.5) / n);
      w[static_cast<std::size_t>(i)] = lam / (x - xi);
      total += w[static_cast<std::size_t>(i)];
    }
    for (auto& v : w) v /= total;
    return w;
  }

  double x0_ = -1, x1_ = 1, y0_ = -1, y1_ = 1;
  int nx_ = 0, ny_ = 0;
  std::vector<double> values_;
};

struct WeightConfig {
  std::string kind = "const";
  LogPolynomialWeight log_polynomial = LogPolynomialWeight::constant(1.0);
  ChebyshevGridWeight samples;
};

struct TestFunctionConfig {
  std::string kind = "polynomial";
  std::vector<PolynomialTerm> terms{{0, 0, 1.0}};
  int k = 1;
  double cut_lo = 0.0;  // offsets above the inner radius; 0 selects the defaults
  double cut_hi = 0.0;
};

struct KernelConfig {
  std::optional<cplx> w;
  double delta = 0.0;
  double bw_rho = 0.5;
  double bw_rho1 = 0.7;
};

struct Tolerances {
  double slope = 0.35;
  double gram = 1e-8;
};

struct ExperimentConfig {
  json map_source;
  ExteriorMap map = ExteriorMap::identity();
  WeightConfig weight;
  double rho = 0.7;
  int M = 24;
  int K = 48;
  int kappa = 2;
  std::vector<int> n{8, 16, 32};
  std::vector<cplx> points;
  QuadratureResolution oracle;
  Tolerances tol;
  std::string out = "ponp-out";
  TestFunctionConfig test_function;
  KernelConfig kernel;
  double validity_A = 1.0;
};

namespace detail {

template <class T>
T get_or(const json& j, const char* key, T fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorKind::config, where + "." + key + ": wrong type");
  }
}

inline std::vector<cplx> cplx_list(const json& j, const std::string& where) {
  if (!j.is_array()) throw Error(ErrorKind::config, where + ": expected an array");
  std::vector<cplx> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(cplx_from_json(j[i], where + "[" + std::to_string(i) + "]"));
  return out;
}

inline ExteriorMap parse_map(const json& m) {
  if (!m.is_object()) throw Error(ErrorKind::config, "map: expected an object");
  if (m.contains("preset")) {
    const auto preset = get_or<std::string>(m, "preset", "", "map");
    if (preset == "disk")
      return ExteriorMap::disk(get_or(m, "radius", 1.0, "map"),
                               m.contains("center") ? cplx_from_json(m["center"], "map.center") : cplx{});
    if (preset == "ellipse") return ExteriorMap::ellipse(get_or(m, "a", 2.0, "map"), get_or(m, "b", 1.0, "map"));
    if (preset == "perturbed-disk")
      return ExteriorMap::perturbed_disk(m.contains("eps") ? cplx_from_json(m["eps"], "map.eps") : cplx(0.1),
                                         get_or(m, "k", 3, "map"));
    throw Error(ErrorKind::config, "map.preset: unknown preset '" + preset + "'");
  }
  if (!m.contains("cap")) throw Error(ErrorKind::config, "map: needs 'cap' and 'tail' or a 'preset'");
  const double cap = get_or(m, "cap", 0.0, "map");
  const auto tail = m.contains("tail") ? cplx_list(m["tail"], "map.tail") : std::vector<cplx>{0.0};
  std::optional<double> ru;
  if (m.contains("univalence_radius")) ru = get_or(m, "univalence_radius", 0.0, "map");
  return ExteriorMap(cap, tail, ru);
}

inline WeightConfig parse_weight(const json& w) {
  WeightConfig out;
  if (w.is_null()) return out;
  if (!w.is_object()) throw Error(ErrorKind::config, "weight: expected an object");
  out.kind = get_or<std::string>(w, "kind", "const", "weight");
  const double scale = get_or(w, "scale", 1.0, "weight");
  if (out.kind == "const") {
    out.log_polynomial = LogPolynomialWeight::constant(get_or(w, "value", scale, "weight"));
  } else if (out.kind == "exp-re-linear") {
    if (!w.contains("alpha")) throw Error(ErrorKind::config, "weight.alpha is required for exp-re-linear");
    out.log_polynomial = LogPolynomialWeight::exp_re_linear(cplx_from_json(w["alpha"], "weight.alpha"), scale);
  } else if (out.kind == "exp-re-poly") {
    if (!(scale > 0.0)) throw Error(ErrorKind::config, "weight.scale must be positive");
    if (!w.contains("terms") || !w["terms"].is_array())
      throw Error(ErrorKind::config, "weight.terms is required for exp-re-poly");
    LogPolynomialWeight lp{{}, std::log(scale)};
    for (std::size_t i = 0; i < w["terms"].size(); ++i) {
      const json& t = w["terms"][i];
      const std::string where = "weight.terms[" + std::to_string(i) + "]";
      LogPolynomialWeight::Term term{get_or(t, "p", 0, where), get_or(t, "q", 0, where),
                                     t.contains("coeff") ? cplx_from_json(t["coeff"], where + ".coeff") : cplx{}};
      if (term.p < 0 || term.q < 0) throw Error(ErrorKind::config, where + ": exponents must be nonnegative");
      lp.terms.push_back(term);
    }
    out.log_polynomial = lp;
  } else if (out.kind == "custom-samples") {
    if (!w.contains("box") || !w["box"].is_array() || w["box"].size() != 4)
      throw Error(ErrorKind::config, "weight.box must be [xmin, xmax, ymin, ymax]");
    if (!w.contains("n") || !w["n"].is_array() || w["n"].size() != 2)
      throw Error(ErrorKind::config, "weight.n must be [nx, ny]");
    if (!w.contains("values") || !w["values"].is_array())
      throw Error(ErrorKind::config, "weight.values must be an array");
    try {
      const auto box = w["box"].get<std::vector<double>>();
      const auto n = w["n"].get<std::vector<int>>();
      out.samples = ChebyshevGridWeight(box[0], box[1], box[2], box[3], n[0], n[1], w["values"].get<std::vector<double>>());
    } catch (const json::exception&) {
      throw Error(ErrorKind::config, "weight: custom-samples fields have the wrong type");
    }
  } else {
    throw Error(ErrorKind::config, "weight.kind: unknown kind '" + out.kind + "'");
  }
  return out;
}

inline TestFunctionConfig parse_test_function(const json& t) {
  TestFunctionConfig out;
  if (t.is_null()) return out;
  if (!t.is_object()) throw Error(ErrorKind::config, "test_function: expected an object");
  out.kind = get_or<std::string>(t, "kind", "polynomial", "test_function");
  if (out.kind == "constant") {
    out.kind = "polynomial";
    out.terms = {{0, 0, t.contains("value") ? cplx_from_json(t["value"], "test_function.value") : cplx(1.0)}};
  } else if (out.kind == "polynomial") {
    if (!t.contains("terms") || !t["terms"].is_array() || t["terms"].empty())
      throw Error(ErrorKind::config, "test_function.terms must be a nonempty array");
    out.terms.clear();
    for (std::size_t i = 0; i < t["terms"].size(); ++i) {
      const json& e = t["terms"][i];
      const std::string where = "test_function.terms[" + std::to_string(i) + "]";
      PolynomialTerm term{get_or(e, "p", 0, where), get_or(e, "q", 0, where),
                          e.contains("coeff") ? cplx_from_json(e["coeff"], where + ".coeff") : cplx(1.0)};
      if (term.p < 0 || term.q < 0) throw Error(ErrorKind::config, where + ": exponents must be nonnegative");
      out.terms.push_back(term);
    }
  } else if (out.kind == "exterior-power") {
    out.k = get_or(t, "k", 1, "test_function");
    out.cut_lo = get_or(t, "cut_lo", 0.0, "test_function");
    out.cut_hi = get_or(t, "cut_hi", 0.0, "test_function");
    if (out.k < 1) throw Error(ErrorKind::config, "test_function.k must be >= 1");
  } else {
    throw Error(ErrorKind::config, "test_function.kind: unknown kind '" + out.kind + "'");
  }
  return out;
}

}  // namespace detail

/// Validates and fills defaults. Every violation is a config error (exit code 2).
inline ExperimentConfig parse_config(const json& j) {
  if (!j.is_object()) throw Error(ErrorKind::config, "config root must be an object");
  if (!j.contains("map")) throw Error(ErrorKind::config, "config needs a 'map' section");
  ExperimentConfig c;
  c.map_source = j["map"];
  c.map = detail::parse_map(j["map"]);
  c.weight = detail::parse_weight(j.contains("weight") ? j["weight"] : json());

  c.rho = detail::get_or(j, "rho", std::max(0.7, c.map.univalence_radius() + 0.05), "config");
  if (!(c.rho > c.map.univalence_radius() && c.rho < 1.0))
    throw Error(ErrorKind::config, "rho must lie between the univalence radius " +
                                       std::to_string(c.map.univalence_radius()) + " and 1");
  c.M = detail::get_or(j, "M", 24, "config");
  if (c.M < 1) throw Error(ErrorKind::config, "M must be >= 1");
  c.K = detail::get_or(j, "K", 2 * c.M, "config");
  if (c.K < 2 * c.M) throw Error(ErrorKind::config, "K must be >= 2M");
  c.kappa = detail::get_or(j, "kappa", 2, "config");
  if (c.kappa < 0 || c.kappa > kMaxKappa)
    throw Error(ErrorKind::config, "kappa must lie in 0.." + std::to_string(kMaxKappa));

  if (j.contains("n")) {
    try {
      c.n = j["n"].get<std::vector<int>>();
    } catch (const json::exception&) {
      throw Error(ErrorKind::config, "n must be a list of integers");
    }
  }
  if (c.n.empty()) throw Error(ErrorKind::config, "n list is empty");
  if (!std::is_sorted(c.n.begin(), c.n.end()) || std::adjacent_find(c.n.begin(), c.n.end()) != c.n.end())
    throw Error(ErrorKind::config, "n list must be strictly ascending");
  if (c.n.front() < 1) throw Error(ErrorKind::config, "n values must be >= 1");

  c.points = j.contains("points") ? detail::cplx_list(j["points"], "points") : std::vector<cplx>{c.map.psi(2.0)};
  if (c.points.empty()) throw Error(ErrorKind::config, "points list is empty");

  if (j.contains("oracle")) {
    const json& o = j["oracle"];
    c.oracle.angular = detail::get_or(o, "angular", c.oracle.angular, "oracle");
    c.oracle.radial_levels = detail::get_or(o, "radial_levels", c.oracle.radial_levels, "oracle");
    c.oracle.radial_nodes = detail::get_or(o, "radial_nodes", c.oracle.radial_nodes, "oracle");
    if (c.oracle.angular < 8 || c.oracle.radial_levels < 1 || c.oracle.radial_nodes < 2)
      throw Error(ErrorKind::config, "oracle resolution too small");
  }
  if (j.contains("tolerances")) {
    c.tol.slope = detail::get_or(j["tolerances"], "slope", c.tol.slope, "tolerances");
    c.tol.gram = detail::get_or(j["tolerances"], "gram", c.tol.gram, "tolerances");
    if (!(c.tol.slope > 0.0 && c.tol.gram > 0.0)) throw Error(ErrorKind::config, "tolerances must be positive");
  }
  c.out = detail::get_or<std::string>(j, "out", c.out, "config");
  c.test_function = detail::parse_test_function(j.contains("test_function") ? j["test_function"] : json());
  if (j.contains("kernel")) {
    const json& k = j["kernel"];
    if (k.contains("w")) c.kernel.w = cplx_from_json(k["w"], "kernel.w");
    c.kernel.delta = detail::get_or(k, "delta", 0.0, "kernel");
    c.kernel.bw_rho = detail::get_or(k, "bw_rho", c.kernel.bw_rho, "kernel");
    c.kernel.bw_rho1 = detail::get_or(k, "bw_rho1", c.kernel.bw_rho1, "kernel");
    if (!(c.kernel.bw_rho > 0.0 && c.kernel.bw_rho < c.kernel.bw_rho1 && c.kernel.bw_rho1 < 1.0))
      throw Error(ErrorKind::config, "kernel needs 0 < bw_rho < bw_rho1 < 1");
  }
  if (j.contains("validity")) c.validity_A = detail::get_or(j["validity"], "A", 1.0, "validity");
  if (!(c.validity_A > 0.0)) throw Error(ErrorKind::config, "validity.A must be positive");
  return c;
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::config, "cannot open config file " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw Error(ErrorKind::config, "malformed JSON in " + path.string() + ": " + e.what());
  }
  return parse_config(j);
}

/// Global weight evaluator on the closed domain.
inline std::function<double(cplx)> weight_function(const ExperimentConfig& c) {
  if (c.weight.kind == "custom-samples") return c.weight.samples;
  const LogPolynomialWeight lp = c.weight.log_polynomial;
  return [lp](cplx z) { return std::exp(lp.log_value(z)); };
}

inline WeightSpec build_weight(const ExperimentConfig& c) {
  if (c.weight.kind == "custom-samples") return pullback_weight(c.map, c.weight.samples, c.M, c.rho);
  return pullback_log_polynomial(c.map, c.weight.log_polynomial, c.M, c.rho);
}

inline ExpansionModel build_model(const ExperimentConfig& c, int order) {
  ExpansionModel m = build_expansion_model(c.map, build_weight(c), order);
  m.validity.A = c.validity_A;
  return m;
}

inline TestFunction build_test_function(const ExperimentConfig& c) {
  const auto& t = c.test_function;
  if (t.kind == "exterior-power") {
    const double lo = c.rho + (t.cut_lo > 0.0 ? t.cut_lo : 0.05);
    const double hi = c.rho + (t.cut_hi > 0.0 ? t.cut_hi : 0.15);
    if (!(lo < hi && hi < 1.0)) throw Error(ErrorKind::config, "test_function cutoff must satisfy rho < lo < hi < 1");
    return exterior_power_test_function(c.map, t.k, c.M, c.rho, lo, hi);
  }
  return polynomial_test_function(c.map, t.terms, c.M, c.rho);
}

}  // namespace ponp::io
