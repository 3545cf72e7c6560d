#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "ponp/ponp.hpp"

namespace testing_support {

using ponp::cplx;

inline std::mt19937_64 rng(std::uint64_t seed = 20240611) { return std::mt19937_64(seed); }

/// Random annulus series with coefficients decaying like 0.5^{|m|+|n|}.
inline ponp::AnnulusSeries random_annulus(std::mt19937_64& gen, int M, double rho) {
  std::normal_distribution<double> nd;
  ponp::AnnulusSeries a(M, rho);
  for (int m = -M; m <= M; ++m)
    for (int n = -M; n <= M; ++n) a.at(m, n) = cplx(nd(gen), nd(gen)) * std::pow(0.5, std::abs(m) + std::abs(n));
  return a;
}

inline ponp::CircleSeries random_real_circle(std::mt19937_64& gen, int K) {
  std::normal_distribution<double> nd;
  ponp::CircleSeries u(K);
  u.at(0) = nd(gen);
  for (int k = 1; k <= K; ++k) {
    const cplx c(nd(gen) / k, nd(gen) / k);
    u.at(k) = c;
    u.at(-k) = std::conj(c);
  }
  return u;
}

inline cplx circle_point(int i, int n, double r = 1.0) { return std::polar(r, 2.0 * std::numbers::pi * i / n); }

constexpr double kAlpha = 0.3;
constexpr double kRho = 0.7;
constexpr int kM = 24;

inline ponp::WeightSpec disk_alpha_weight(int M = kM, double rho = kRho) {
  return ponp::pullback_log_polynomial(ponp::ExteriorMap::identity(), ponp::LogPolynomialWeight::exp_re_linear(kAlpha),
                                      M, rho);
}

inline ponp::WeightSpec unit_weight(const ponp::ExteriorMap& map, int M = kM, double rho = kRho) {
  return ponp::pullback_log_polynomial(map, ponp::LogPolynomialWeight::constant(1.0), M, rho);
}

/// w = exp(Re z) on the ellipse with semi-axes 2, 1.
inline ponp::WeightSpec ellipse_exp_weight(int M = kM, double rho = 0.75) {
  return ponp::pullback_log_polynomial(ponp::ExteriorMap::ellipse(2.0, 1.0),
                                      ponp::LogPolynomialWeight::exp_re_linear(0.5), M, rho);
}

inline ponp::ExpansionModel disk_alpha_model(int order) {
  return ponp::build_expansion_model(ponp::ExteriorMap::identity(), disk_alpha_weight(), order);
}

struct OracleFixture {
  ponp::QuadratureRule rule;
  ponp::OraclePolynomials polys;
};

/// Oracle for the disk alpha weight, built once per test binary.
inline const OracleFixture& disk_alpha_oracle() {
  static const OracleFixture fx = [] {
    OracleFixture f;
    f.rule = ponp::build_quadrature(ponp::ExteriorMap::identity(), disk_alpha_weight().omega);
    f.polys = ponp::oracle_onps(f.rule, 64);
    return f;
  }();
  return fx;
}

inline const OracleFixture& ellipse_unit_oracle() {
  static const OracleFixture fx = [] {
    OracleFixture f;
    f.rule = ponp::build_quadrature(ponp::ExteriorMap::ellipse(2.0, 1.0), [](cplx) { return 1.0; });
    f.polys = ponp::oracle_onps(f.rule, 40);
    return f;
  }();
  return fx;
}

/// Least-squares slope of log y against log x.
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace testing_support
