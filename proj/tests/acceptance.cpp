// Acceptance suite: one PASS/FAIL line per criterion, exit code 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "ponp/io/io.hpp"
#include "support.hpp"

using namespace ponp;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double time_limit_s;  // 0 means no runtime requirement
  std::function<Outcome()> run;
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0, double d = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d);
  return buf;
}

std::vector<io::ExperimentConfig> shipped_configs() {
  std::vector<std::filesystem::path> paths;
  for (const auto& e : std::filesystem::directory_iterator(PONP_CONFIG_DIR))
    if (e.path().extension() == ".json") paths.push_back(e.path());
  std::sort(paths.begin(), paths.end());
  std::vector<io::ExperimentConfig> out;
  for (const auto& p : paths) out.push_back(io::load_config(p));
  return out;
}

Outcome carleman_degeneration() {
  double worst = 0.0;
  for (const auto& map : {ExteriorMap::identity(), ExteriorMap::ellipse(2.0, 1.0)}) {
    const double rho = std::max(0.7, map.univalence_radius() + 0.05);
    const auto s = szego(testing_support::unit_weight(map, testing_support::kM, rho));
    const auto h = hierarchy_solve(s, 4);
    for (int j = 1; j <= 4; ++j) worst = std::max(worst, h.X[static_cast<std::size_t>(j)].max_abs());
  }
  return {worst <= 1e-12, fmt("max |X_j| = %.2e (<= 1e-12)", worst)};
}

Outcome carleman_formula() {
  const auto map = ExteriorMap::ellipse(2.0, 1.0);
  const auto model = build_expansion_model(map, testing_support::unit_weight(map, 24, 0.75), 4);
  const auto rule = build_quadrature(map, [](cplx) { return 1.0; });
  const auto polys = oracle_onps(rule, 30);
  const int N = 30;
  const cplx z = 3.0;
  const ExteriorFrame fr = exterior_frame(model, z);
  const cplx P = polys.eval(N, z);
  const double e_formula = std::abs(P / (std::sqrt(N + 1.0) * fr.dphi * std::pow(fr.phi, N)) - 1.0);
  const double e_expansion = std::abs(normalized_eval(model, N, 4, z) / P - 1.0);
  return {e_formula <= 1e-5 && e_expansion <= 1e-5,
          fmt("oracle vs formula %.2e, expansion vs oracle %.2e (<= 1e-5)", e_formula, e_expansion)};
}

Outcome rate_law() {
  const auto model = testing_support::disk_alpha_model(2);
  const auto rule = build_quadrature(model.map, model.weight.omega);
  const auto polys = oracle_onps(rule, 40);
  const cplx z = 2.0;
  std::vector<double> x;
  std::vector<std::vector<double>> err(3);
  for (int N = 8; N <= 40; N += 4) {
    x.push_back(N);
    const ExteriorFrame fr = exterior_frame(model, z);
    const double scale = std::abs(constant_CN(model, N) * fr.dphi * std::pow(fr.phi, N) * fr.expV);
    const cplx pi_oracle = polys.monic(N, z);
    for (int k = 0; k <= 2; ++k)
      err[static_cast<std::size_t>(k)].push_back(std::abs(pi_oracle - monic_eval(model, N, k, z)) / scale);
  }
  bool ok = true;
  double s[3];
  for (int k = 0; k <= 2; ++k) {
    s[k] = testing_support::loglog_slope(x, err[static_cast<std::size_t>(k)]);
    ok = ok && std::abs(s[k] + (k + 1)) <= 0.35;
  }
  return {ok, fmt("slopes %.3f, %.3f, %.3f (targets -1, -2, -3 +/- 0.35)", s[0], s[1], s[2])};
}

Outcome l2_law() {
  const auto model = testing_support::disk_alpha_model(1);
  const auto rule = build_quadrature(model.map, model.weight.omega);
  const auto polys = oracle_onps(rule, 24);
  const double d12 = l2_discrepancy(model, rule, polys, 12, 1);
  const double d24 = l2_discrepancy(model, rule, polys, 24, 1);
  const double ratio = d24 / d12;
  const bool ok = ratio >= 0.25 / 1.6 && ratio <= 0.25 * 1.6;
  return {ok, fmt("d(12) = %.3e, d(24) = %.3e, ratio %.4f", d12, d24, ratio) +
                  fmt(" (target [%.4f, %.4f])", 0.25 / 1.6, 0.25 * 1.6)};
}

Outcome hierarchy_residuals() {
  double worst_res = 0.0, worst_alt = 0.0;
  int count = 0;
  for (const auto& cfg : shipped_configs()) {
    const auto s = szego(io::build_weight(cfg));
    const auto h = hierarchy_solve(s, 4);
    const auto a = hierarchy_solve_alt(s, 4);
    for (int p = 1; p <= 4; ++p) {
      worst_res = std::max(worst_res, hierarchy_residual(h, s, p));
      worst_alt = std::max(worst_alt, (h.X[static_cast<std::size_t>(p)] - a.X[static_cast<std::size_t>(p)]).max_abs());
    }
    ++count;
  }
  return {worst_res <= 1e-9 && worst_alt <= 1e-10 && count > 0,
          fmt("%g weights: residual %.2e (<= 1e-9), solver agreement %.2e (<= 1e-10)", count, worst_res, worst_alt)};
}

Outcome szego_normalization() {
  double worst = 0.0;
  int count = 0;
  for (const auto& cfg : shipped_configs()) {
    worst = std::max(worst, omega_circle_residual(szego(io::build_weight(cfg)), 256));
    ++count;
  }
  return {worst <= 1e-10 && count > 0, fmt("%g weights: max |Omega - 1| = %.2e (<= 1e-10)", count, worst)};
}

Outcome leading_coefficient() {
  const auto model =
      build_expansion_model(ExteriorMap::identity(), testing_support::unit_weight(ExteriorMap::identity()), 2);
  const double e = std::abs(leading_coeff(model, 24, 2) - 5.0) / 5.0;
  const double e1 = std::abs(model.norm.d[1] - 0.5), e2 = std::abs(model.norm.d[2] + 0.125);
  return {e <= 2e-4 && e1 <= 1e-10 && e2 <= 1e-10,
          fmt("rel. error %.2e (<= 2e-4), |d1 - 1/2| = %.1e, |d2 + 1/8| = %.1e", e, e1, e2)};
}

Outcome harmonic_measure() {
  const auto model = testing_support::disk_alpha_model(1);
  const auto rule = build_quadrature(model.map, model.weight.omega);
  const auto polys = oracle_onps(rule, 32);
  const auto tf = polynomial_test_function(model.map, {{0, 0, 1.0}, {1, 1, -1.0}}, testing_support::kM,
                                           testing_support::kRho);
  const auto split = split_test_function(tf.g);
  const cplx boundary = split.g_plus_inf + split.g_minus_inf;
  double dev[2], err[2];
  const int Ns[2] = {16, 32};
  for (int i = 0; i < 2; ++i) {
    cplx integral{};
    for (std::size_t q = 0; q < rule.nodes.size(); ++q)
      integral += rule.weights[q] * tf.G(rule.nodes[q]) * std::norm(polys.eval(Ns[i], rule.nodes[q]));
    dev[i] = std::abs(integral - boundary);
    err[i] = std::abs(integral - distributional_expectation(model, split, Ns[i], 1));
  }
  const double halving = dev[0] / dev[1], order = err[0] / err[1];
  const bool ok = halving >= 2.0 / 1.6 && halving <= 2.0 * 1.6 && order >= std::pow(2.0, 1.5);
  return {ok, fmt("deviation ratio %.3f (target [1.25, 3.2]), kappa=1 error ratio %.3f (>= 2.83)", halving, order)};
}

Outcome off_spectral() {
  const auto model = testing_support::disk_alpha_model(0);
  const auto rule = build_quadrature(model.map, model.weight.omega);
  const auto polys = oracle_onps(rule, 32);
  const auto point = make_offspectral_point(model.map, 2.0);
  const cplx z = 2.5;
  double dev[2];
  const int Ns[2] = {16, 32};
  for (int i = 0; i < 2; ++i) {
    const int N = Ns[i];
    const cplx k = oracle_kernel(polys, z, point.w, N) / std::sqrt(oracle_kernel(polys, point.w, point.w, N).real());
    dev[i] = std::abs(std::abs(k) / std::abs(offspectral_leading(model, point, N, z)) - 1.0);
  }
  const double factor = dev[0] / dev[1];
  return {factor >= 1.4 && factor <= 2.8,
          fmt("|ratio - 1| = %.3e -> %.3e, factor %.3f (target [1.4, 2.8])", dev[0], dev[1], factor)};
}

Outcome bernstein_walsh() {
  double lo = INFINITY, hi = 0.0;
  for (int N : {10, 20, 40, 80}) {
    const double s = io::bw_band_sup(ExteriorMap::identity(), 0.5, 0.7, N);
    lo = std::min(lo, s);
    hi = std::max(hi, s);
  }
  const double variation = (hi - lo) / hi;
  return {variation < 0.25, fmt("sup K_N/N^2 in [%.4f, %.4f], variation %.1f%% (< 25%%)", lo, hi, 100.0 * variation)};
}

Outcome watson_engine() {
  double worst = 0.0;
  bool ok = true;
  for (double lambda : {5.0, 10.0, 20.0, 40.0}) {
    JetAtZero jet;
    for (int j = 0; j <= 4; ++j) jet.derivatives.push_back(j % 2 == 0 ? 1.0 : -1.0);
    jet.next_derivative_bound = 1.0;
    const auto r = watson_sum(jet, lambda);
    const double e = std::abs(r.value - 1.0 / (lambda + 1.0));
    ok = ok && e <= r.error_bound;
    worst = std::max(worst, e / r.error_bound);
  }
  return {ok, fmt("max error / bound = %.3f (<= 1)", worst)};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "Carleman degeneration", 1.0, carleman_degeneration},
      {2, "Carleman formula", 30.0, carleman_formula},
      {3, "pointwise rate law", 120.0, rate_law},
      {4, "L2 discrepancy law", 120.0, l2_law},
      {5, "hierarchy residuals", 0.0, hierarchy_residuals},
      {6, "Szego normalization", 0.0, szego_normalization},
      {7, "leading coefficient", 0.0, leading_coefficient},
      {8, "harmonic-measure limit", 120.0, harmonic_measure},
      {9, "off-spectral leading order", 0.0, off_spectral},
      {10, "Bernstein-Walsh bound", 0.0, bernstein_walsh},
      {11, "Watson engine", 0.0, watson_engine},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::string timing = fmt("%.2f s", secs);
    if (c.time_limit_s > 0.0) {
      timing += fmt(" (limit %.0f s)", c.time_limit_s);
      if (secs >= c.time_limit_s) {
        o.pass = false;
        timing += " over time";
      }
    }
    if (!o.pass) ++failed;
    std::printf("[%s] %2d %-28s %s; %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name.c_str(), o.detail.c_str(),
                timing.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu criteria, %d failed\n", criteria.size(), failed);
  return failed == 0 ? 0 : 1;
}
