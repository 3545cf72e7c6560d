#pragma once

// Batch commands behind the command line front end. Each command reads an
// ExperimentConfig, writes its artifacts into the output directory and returns
// a summary together with the process exit code.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "ponp/distributional.hpp"
#include "ponp/expansion.hpp"
#include "ponp/io/artifacts.hpp"
#include "ponp/io/config.hpp"
#include "ponp/kernels.hpp"
#include "ponp/oracle.hpp"

namespace ponp::io {

struct CommandOptions {
  int threads = 1;
};

struct CommandResult {
  json summary;
  int exit_code = 0;
  std::string message;
  std::vector<std::filesystem::path> files;
};

/// Runs fn, renaming any library error after the pipeline stage it came from.
template <class F>
auto stage(const std::string& name, F&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const Error& e) {
    throw Error(e.kind(), "stage '" + name + "': " + e.message());
  }
}

/// Calls body(i) for i in [0, count) on up to `threads` workers; the first exception is rethrown.
template <class F>
void parallel_for(int count, int threads, F&& body) {
  threads = std::max(1, std::min(threads, count));
  if (threads == 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (int i = next++; i < count; i = next++) {
        try {
          body(i);
        } catch (...) {
          const std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

namespace detail {

inline std::string fmt(double v) {
  std::ostringstream s;
  s << std::setprecision(17) << v;
  return s.str();
}

inline std::string fmt(const json& v) { return fmt(v.get<double>()); }

inline std::string fmt_short(double v) {
  std::ostringstream s;
  s << v;
  return s.str();
}

class OutputDir {
 public:
  OutputDir(const std::string& dir, CommandResult& result) : dir_(dir), result_(result) {
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec) throw Error(ErrorKind::config, "cannot create output directory " + dir + ": " + ec.message());
  }

  void write(const std::string& name, const std::string& content) {
    const auto path = dir_ / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::config, "cannot write " + path.string());
    out << content;
    result_.files.push_back(path);
  }

  void write_json(const std::string& name, const json& doc) { write(name, doc.dump(2) + "\n"); }

 private:
  std::filesystem::path dir_;
  CommandResult& result_;
};

/// Least-squares slope of log y on log x over positive entries; null with fewer than two.
inline json fitted_slope(const std::vector<int>& n, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int count = 0;
  for (std::size_t i = 0; i < n.size(); ++i) {
    if (!(y[i] > 0.0) || !std::isfinite(y[i])) continue;
    const double lx = std::log(static_cast<double>(n[i])), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++count;
  }
  if (count < 2) return nullptr;
  return (count * sxy - sx * sy) / (count * sxx - sx * sx);
}

inline double max_correction_coefficient(const ExpansionModel& m) {
  double worst = 0.0;
  for (std::size_t j = 1; j < m.coeffs.X.size(); ++j) worst = std::max(worst, m.coeffs.X[j].max_abs());
  return worst;
}

inline OraclePolynomials build_oracle(const ExperimentConfig& cfg, QuadratureRule& rule, int degree) {
  rule = stage("quadrature", [&] { return build_quadrature(cfg.map, weight_function(cfg), cfg.oracle); });
  return stage("oracle", [&] { return oracle_onps(rule, degree, cfg.tol.gram); });
}

}  // namespace detail

inline CommandResult cmd_expand(const ExperimentConfig& cfg, const CommandOptions& = {}) {
  CommandResult r;
  const ExpansionModel model = stage("model", [&] { return build_model(cfg, cfg.kappa); });
  r.summary = stage("serialize", [&] { return model_to_json(model, cfg); });
  detail::OutputDir(cfg.out, r).write_json("model.json", r.summary);
  return r;
}

inline CommandResult cmd_eval(const ExperimentConfig& cfg, const CommandOptions& opts = {}) {
  CommandResult r;
  const ExpansionModel model = stage("model", [&] { return build_model(cfg, cfg.kappa); });
  const std::size_t P = cfg.points.size();
  std::vector<json> rows(cfg.n.size() * P);
  parallel_for(static_cast<int>(rows.size()), opts.threads, [&](int idx) {
    const int N = cfg.n[static_cast<std::size_t>(idx) / P];
    const cplx z = cfg.points[static_cast<std::size_t>(idx) % P];
    json row = {{"N", N}, {"z", to_json_cplx(z)}, {"phi_abs", nullptr}, {"valid", false},
                {"monic", nullptr}, {"normalized", nullptr}, {"leading_coeff", nullptr}};
    if (const auto zeta = try_map_forward(model.map, z)) row["phi_abs"] = std::abs(*zeta);
    try {
      row["monic"] = to_json_cplx(monic_eval(model, N, cfg.kappa, z));
      row["normalized"] = to_json_cplx(normalized_eval(model, N, cfg.kappa, z));
      row["leading_coeff"] = leading_coeff(model, N, cfg.kappa);
      row["valid"] = true;
    } catch (const Error& e) {
      if (exit_code(e.kind()) != 4) throw Error(e.kind(), "stage 'evaluate': " + e.message());
    }
    rows[static_cast<std::size_t>(idx)] = std::move(row);
  });

  int flagged = 0;
  std::ostringstream csv;
  csv << "N,z_re,z_im,valid,monic_re,monic_im,normalized_re,normalized_im,leading_coeff\n";
  for (const auto& row : rows) {
    csv << row["N"].get<int>() << ',' << detail::fmt(row["z"][0]) << ',' << detail::fmt(row["z"][1]) << ','
        << (row["valid"].get<bool>() ? 1 : 0);
    if (row["valid"].get<bool>()) {
      csv << ',' << detail::fmt(row["monic"][0]) << ',' << detail::fmt(row["monic"][1]) << ','
          << detail::fmt(row["normalized"][0]) << ',' << detail::fmt(row["normalized"][1]) << ','
          << detail::fmt(row["leading_coeff"]);
    } else {
      ++flagged;
      csv << ",,,,,";
    }
    csv << '\n';
  }
  r.summary = {{"schema", "ponp.eval/1"}, {"kappa", cfg.kappa}, {"rows", rows}, {"flagged", flagged}};
  detail::OutputDir out(cfg.out, r);
  out.write_json("eval.json", r.summary);
  out.write("eval.csv", csv.str());
  if (flagged > 0) {
    r.exit_code = 4;
    r.message = std::to_string(flagged) + " evaluation request(s) outside the validity region were flagged";
  }
  return r;
}

inline CommandResult cmd_oracle(const ExperimentConfig& cfg, const CommandOptions& = {}) {
  CommandResult r;
  QuadratureRule rule;
  const OraclePolynomials polys = detail::build_oracle(cfg, rule, cfg.n.back());
  r.summary = oracle_to_json(polys, rule);
  std::ostringstream csv;
  csv << "n,gram_residual\n";
  for (std::size_t n = 0; n < polys.gram_row_residual.size(); ++n)
    csv << n << ',' << detail::fmt(polys.gram_row_residual[n]) << '\n';
  detail::OutputDir out(cfg.out, r);
  out.write_json("oracle.json", r.summary);
  out.write("gram.csv", csv.str());
  return r;
}

inline CommandResult cmd_verify(const ExperimentConfig& cfg, const CommandOptions& opts = {}) {
  CommandResult r;
  const ExpansionModel model = stage("model", [&] { return build_model(cfg, cfg.kappa); });
  QuadratureRule rule;
  const OraclePolynomials polys = detail::build_oracle(cfg, rule, cfg.n.back());
  const cplx z = cfg.points.front();
  const bool carleman = detail::max_correction_coefficient(model) <= 1e-12;

  const std::size_t nk = static_cast<std::size_t>(cfg.kappa + 1);
  std::vector<std::vector<double>> pointwise(nk), l2(nk), lead(nk);
  for (auto* v : {&pointwise, &l2, &lead})
    for (auto& row : *v) row.assign(cfg.n.size(), 0.0);

  parallel_for(static_cast<int>(cfg.n.size()), opts.threads, [&](int i) {
    const int N = cfg.n[static_cast<std::size_t>(i)];
    const ExteriorFrame fr = stage("evaluate", [&] { return ponp::detail::checked_frame(model, N, z); });
    const double scale = std::abs(constant_CN(model, N) * fr.dphi * std::pow(fr.phi, N) * fr.expV);
    const cplx pi_oracle = polys.monic(N, z);
    for (int k = 0; k <= cfg.kappa; ++k) {
      const auto ku = static_cast<std::size_t>(k);
      const auto iu = static_cast<std::size_t>(i);
      pointwise[ku][iu] = std::abs(pi_oracle - monic_eval(model, N, k, z)) / scale;
      l2[ku][iu] = stage("l2-discrepancy", [&] { return l2_discrepancy(model, rule, polys, N, k); });
      lead[ku][iu] = std::abs(leading_coeff(model, N, k) / polys.kappa[static_cast<std::size_t>(N)] - 1.0);
    }
  });

  std::ostringstream csv, dat;
  csv << "N,kappa,pointwise_error,l2_discrepancy,kappa_rel_error\n";
  dat << "# N";
  for (int k = 0; k <= cfg.kappa; ++k) dat << " pointwise_k" << k;
  dat << '\n';
  for (std::size_t i = 0; i < cfg.n.size(); ++i) {
    dat << cfg.n[i];
    for (std::size_t k = 0; k < nk; ++k) {
      csv << cfg.n[i] << ',' << k << ',' << detail::fmt(pointwise[k][i]) << ',' << detail::fmt(l2[k][i]) << ','
          << detail::fmt(lead[k][i]) << '\n';
      dat << ' ' << detail::fmt(pointwise[k][i]);
    }
    dat << '\n';
  }

  json slopes = json::array(), checks = json::array();
  bool pass = true;
  for (int k = 0; k <= cfg.kappa; ++k) {
    const auto ku = static_cast<std::size_t>(k);
    const json sp = detail::fitted_slope(cfg.n, pointwise[ku]);
    slopes.push_back({{"kappa", k},
                      {"pointwise", sp},
                      {"l2", detail::fitted_slope(cfg.n, l2[ku])},
                      {"leading", detail::fitted_slope(cfg.n, lead[ku])}});
    if (cfg.n.size() < 2) continue;
    bool ok;
    std::string expected;
    if (carleman) {
      const double worst = *std::max_element(pointwise[ku].begin(), pointwise[ku].end());
      ok = worst <= 1e-12 || (!sp.is_null() && sp.get<double>() <= -6.0);
      expected = "<= -6 (or errors below 1e-12)";
    } else {
      ok = !sp.is_null() && std::abs(sp.get<double>() + (k + 1)) <= cfg.tol.slope;
      expected = std::to_string(-(k + 1)) + " +/- " + detail::fmt_short(cfg.tol.slope);
    }
    checks.push_back({{"name", "pointwise slope, kappa = " + std::to_string(k)},
                      {"value", sp},
                      {"expected", expected},
                      {"pass", ok}});
    pass = pass && ok;
  }
  r.summary = {{"schema", "ponp.verify/1"}, {"point", to_json_cplx(z)}, {"n", cfg.n},         {"carleman", carleman},
               {"slopes", slopes},          {"checks", checks},           {"pass", pass}};
  detail::OutputDir out(cfg.out, r);
  out.write_json("verify.json", r.summary);
  out.write("rates.csv", csv.str());
  out.write("rates.dat", dat.str());
  if (!pass) {
    r.exit_code = 3;
    r.message = "rate checks failed; see verify.json";
  }
  return r;
}

inline CommandResult cmd_distributional(const ExperimentConfig& cfg, const CommandOptions& opts = {}) {
  CommandResult r;
  if (cfg.kappa < 1) throw Error(ErrorKind::config, "distributional runs need kappa >= 1");
  const ExpansionModel model = stage("model", [&] { return build_model(cfg, cfg.kappa); });
  const TestFunction tf = stage("test-function", [&] { return build_test_function(cfg); });
  const TestFunctionSplit split = stage("split", [&] { return split_test_function(tf.g); });
  QuadratureRule rule;
  const OraclePolynomials polys = detail::build_oracle(cfg, rule, cfg.n.back());

  std::vector<json> rows(cfg.n.size());
  std::vector<std::vector<double>> errors(static_cast<std::size_t>(cfg.kappa), std::vector<double>(cfg.n.size()));
  parallel_for(static_cast<int>(cfg.n.size()), opts.threads, [&](int i) {
    const int N = cfg.n[static_cast<std::size_t>(i)];
    cplx integral{};
    for (std::size_t q = 0; q < rule.nodes.size(); ++q)
      integral += rule.weights[q] * tf.G(rule.nodes[q]) * std::norm(polys.eval(N, rule.nodes[q]));
    json expansion = json::array(), errs = json::array(), terms = json::array();
    for (int k = 1; k <= cfg.kappa; ++k) {
      const auto res = stage("distributional", [&] { return distributional_terms(model, split, N, k); });
      expansion.push_back(to_json_cplx(res.value));
      const double e = std::abs(res.value - integral);
      errs.push_back(e);
      errors[static_cast<std::size_t>(k - 1)][static_cast<std::size_t>(i)] = e;
      if (k == cfg.kappa)
        for (const auto& t : res.terms)
          terms.push_back({{"nu", t.nu}, {"j", t.j}, {"k", t.k}, {"value", to_json_cplx(t.contribution)}});
    }
    rows[static_cast<std::size_t>(i)] = {
        {"N", N}, {"oracle", to_json_cplx(integral)}, {"expansion", expansion}, {"errors", errs}, {"terms", terms}};
  });

  std::ostringstream csv;
  csv << "N,kappa,expansion_re,expansion_im,oracle_re,oracle_im,error\n";
  for (const auto& row : rows)
    for (int k = 1; k <= cfg.kappa; ++k) {
      const auto& e = row["expansion"][static_cast<std::size_t>(k - 1)];
      csv << row["N"].get<int>() << ',' << k << ',' << detail::fmt(e[0]) << ',' << detail::fmt(e[1]) << ','
          << detail::fmt(row["oracle"][0]) << ',' << detail::fmt(row["oracle"][1]) << ','
          << detail::fmt(row["errors"][static_cast<std::size_t>(k - 1)]) << '\n';
    }
  json slopes = json::array();
  for (const auto& e : errors) slopes.push_back(detail::fitted_slope(cfg.n, e));
  r.summary = {{"schema", "ponp.distributional/1"},
               {"kappa", cfg.kappa},
               {"leading_value", to_json_cplx(split.g_plus_inf + split.g_minus_inf)},
               {"rows", rows},
               {"error_slopes", slopes}};
  detail::OutputDir out(cfg.out, r);
  out.write_json("distributional.json", r.summary);
  out.write("distributional.csv", csv.str());
  return r;
}

/// Largest K_N(z,z) / N^2 over the band rho1 <= |phi| <= 1, sampled on 16 radii x 128 angles.
inline double bw_band_sup(const ExteriorMap& map, double rho, double rho1, int N) {
  double best = 0.0;
  for (int i = 0; i < 16; ++i) {
    const double r = rho1 + (1.0 - rho1) * i / 15.0;
    for (int j = 0; j < 128; ++j) {
      const cplx z = map.psi(std::polar(r, 2.0 * std::numbers::pi * j / 128));
      best = std::max(best, bw_kernel_diag(rho, map, N, z) / (static_cast<double>(N) * N));
    }
  }
  return best;
}

inline CommandResult cmd_kernel(const ExperimentConfig& cfg, const CommandOptions& opts = {}) {
  CommandResult r;
  if (!cfg.kernel.w) throw Error(ErrorKind::config, "kernel runs need kernel.w");
  const OffSpectralPoint point =
      stage("off-spectral-point", [&] { return make_offspectral_point(cfg.map, *cfg.kernel.w, cfg.kernel.delta); });
  const ExpansionModel model = stage("model", [&] { return build_model(cfg, 0); });
  QuadratureRule rule;
  const OraclePolynomials polys = detail::build_oracle(cfg, rule, cfg.n.back());

  const std::size_t P = cfg.points.size();
  std::vector<json> rows(cfg.n.size() * P);
  std::vector<double> dev(rows.size());
  parallel_for(static_cast<int>(rows.size()), opts.threads, [&](int idx) {
    const int N = cfg.n[static_cast<std::size_t>(idx) / P];
    const cplx z = cfg.points[static_cast<std::size_t>(idx) % P];
    const cplx k = oracle_kernel(polys, z, point.w, N) / std::sqrt(oracle_kernel(polys, point.w, point.w, N).real());
    const cplx f = stage("evaluate", [&] { return offspectral_leading(model, point, N, z) * offspectral_phase(model, point, N); });
    dev[static_cast<std::size_t>(idx)] = std::abs(k) / std::abs(f) - 1.0;
    rows[static_cast<std::size_t>(idx)] = {{"N", N},
                                           {"z", to_json_cplx(z)},
                                           {"oracle", to_json_cplx(k)},
                                           {"leading", to_json_cplx(f)},
                                           {"modulus_ratio_minus_one", dev[static_cast<std::size_t>(idx)]},
                                           {"phase_difference", std::arg(k / f)}};
  });
  json reduction = json::array();
  for (std::size_t i = 0; i + P < dev.size(); ++i) reduction.push_back(std::abs(dev[i]) / std::abs(dev[i + P]));

  json bw_rows = json::array();
  double lo = INFINITY, hi = 0.0;
  std::ostringstream dat;
  dat << "# N sup_band K_N(z,z)/N^2\n";
  for (int N : cfg.n) {
    const double s = stage("bernstein-walsh", [&] { return bw_band_sup(cfg.map, cfg.kernel.bw_rho, cfg.kernel.bw_rho1, N); });
    lo = std::min(lo, s);
    hi = std::max(hi, s);
    bw_rows.push_back({{"N", N}, {"sup_over_N2", s}});
    dat << N << ' ' << detail::fmt(s) << '\n';
  }

  std::ostringstream csv;
  csv << "N,z_re,z_im,modulus_ratio_minus_one,phase_difference\n";
  for (const auto& row : rows)
    csv << row["N"].get<int>() << ',' << detail::fmt(row["z"][0]) << ',' << detail::fmt(row["z"][1]) << ','
        << detail::fmt(row["modulus_ratio_minus_one"]) << ',' << detail::fmt(row["phase_difference"]) << '\n';

  r.summary = {{"schema", "ponp.kernel/1"},
               {"w", to_json_cplx(point.w)},
               {"phi_w", to_json_cplx(point.a)},
               {"rows", rows},
               {"ratio_reduction", reduction},
               {"bernstein_walsh",
                {{"rho", cfg.kernel.bw_rho}, {"rho1", cfg.kernel.bw_rho1}, {"rows", bw_rows}, {"variation", (hi - lo) / hi}}}};
  detail::OutputDir out(cfg.out, r);
  out.write_json("kernel.json", r.summary);
  out.write("kernel.csv", csv.str());
  out.write("bw.dat", dat.str());
  return r;
}

}  // namespace ponp::io
