#pragma once

// Boundary-distribution expansion of the wave function 1_D |P_N|^2 w:
//   int_D G |P_N|^2 w dA = G_+(inf) + G_-(inf)
//     + D_N^2 sum_{nu>=1, nu+j+k<=kappa} N^{-(nu+j+k)} <(-r d_r/2)^nu g_0, W_{N,nu,kappa}[X_j conj X_k]>_T
//   W_{N,nu,kappa} = R sum_{mu<=kappa-nu} N^{-mu} binom(nu+mu, nu) (-r d_r/2 - I)^mu M_Omega.

#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "ponp/error.hpp"
#include "ponp/expansion.hpp"
#include "ponp/series.hpp"

namespace ponp {

struct TestFunctionSplit {
  CircleSeries g_plus;   // modes k <= 0, extended as sum c_k z^k
  CircleSeries g_minus;  // modes k >= 1, extended as sum c_k zbar^{-k}
  AnnulusSeries g_zero;  // remainder, vanishes on the circle
  cplx g_plus_inf;
  cplx g_minus_inf;
};

/// Annulus series of the extension of g_+ (holomorphic) plus g_- (conjugate-holomorphic).
inline AnnulusSeries split_boundary_part(const TestFunctionSplit& s, int bidegree, double rho) {
  AnnulusSeries out(bidegree, rho);
  for (int k = -s.g_plus.bandwidth(); k <= 0; ++k)
    if (-k <= bidegree) out.at(k, 0) += s.g_plus[k];
  for (int k = 1; k <= s.g_minus.bandwidth(); ++k)
    if (k <= bidegree) out.at(0, -k) += s.g_minus[k];
  return out;
}

inline TestFunctionSplit split_test_function(const AnnulusSeries& g) {
  const int M = g.bidegree();
  const CircleSeries c = restrict_to_circle(g);
  TestFunctionSplit s{CircleSeries(c.bandwidth(), Support::exterior), CircleSeries(c.bandwidth(), Support::interior),
                      AnnulusSeries(2 * M, g.inner_radius()), c[0], cplx{}};
  for (int k = -c.bandwidth(); k <= 0; ++k) s.g_plus.at(k) = c[k];
  for (int k = 1; k <= c.bandwidth(); ++k) s.g_minus.at(k) = c[k];
  // Circle modes reach |k| = 2M, so the remainder lives on the doubled grid.
  s.g_zero = g.resized(2 * M).value - split_boundary_part(s, 2 * M, g.inner_radius());
  return s;
}

/// -r d_r / 2 applied to an annulus series.
inline AnnulusSeries half_radial(const AnnulusSeries& a) { return radial(a) * -0.5; }

inline CircleSeries w_operator(const SzegoData& szego, int N, int nu, int kappa, const AnnulusSeries& a,
                               const SeriesPolicy& policy = {}) {
  if (nu < 1 || nu > kappa) throw Error(ErrorKind::domain, "w_operator needs 1 <= nu <= kappa");
  AnnulusSeries term = series_multiply(a, szego.Omega, policy);
  AnnulusSeries total = term;
  double binom = 1.0, scale = 1.0;
  for (int mu = 1; mu <= kappa - nu; ++mu) {
    term = half_radial(term) - term;
    binom = binom * (nu + mu) / mu;
    scale /= N;
    total += term * (binom * scale);
  }
  return restrict_to_circle(total);
}

struct DistributionalTerm {
  int nu = 0, j = 0, k = 0;
  cplx contribution;  // already multiplied by D_N^2 N^{-(nu+j+k)}
};

struct DistributionalResult {
  cplx value;
  cplx boundary_value;  // g_+(inf) + g_-(inf)
  double DN2 = 0.0;
  std::vector<DistributionalTerm> terms;
};

inline DistributionalResult distributional_terms(const ExpansionModel& model, const TestFunctionSplit& split, int N,
                                                 int kappa, const SeriesPolicy& policy = {}) {
  if (kappa < 1) throw Error(ErrorKind::domain, "distributional expansion needs kappa >= 1");
  detail::check_order(model, kappa);
  if (N < 1) throw Error(ErrorKind::domain, "distributional expansion needs N >= 1");
  const SzegoData& sz = model.szego;
  const int M = sz.bidegree();
  const double rho = sz.inner_radius();

  DistributionalResult r;
  r.boundary_value = split.g_plus_inf + split.g_minus_inf;
  const double D = norm_constant(model, N, kappa);
  r.DN2 = D * D;

  std::vector<CircleSeries> g_nu;  // (-r d_r/2)^nu g_0 restricted
  AnnulusSeries g = split.g_zero;
  g_nu.emplace_back(0);
  for (int nu = 1; nu <= kappa; ++nu) {
    g = half_radial(g);
    g_nu.push_back(restrict_to_circle(g));
  }

  r.value = r.boundary_value;
  for (int j = 0; j < kappa; ++j) {
    const AnnulusSeries Xj = lift(model.coeffs.X[static_cast<std::size_t>(j)], M, rho, policy);
    for (int k = 0; j + k < kappa; ++k) {
      const AnnulusSeries prod =
          series_multiply(Xj, conj_lift(model.coeffs.X[static_cast<std::size_t>(k)], M, rho, policy), policy);
      for (int nu = 1; nu + j + k <= kappa; ++nu) {
        const CircleSeries W = w_operator(sz, N, nu, kappa, prod, policy);
        const cplx pairing = circle_pairing(g_nu[static_cast<std::size_t>(nu)], W);
        const cplx c = r.DN2 * std::pow(static_cast<double>(N), -(nu + j + k)) * pairing;
        r.terms.push_back({nu, j, k, c});
        r.value += c;
      }
    }
  }
  return r;
}

inline cplx distributional_expectation(const ExpansionModel& model, const TestFunctionSplit& split, int N, int kappa,
                                       const SeriesPolicy& policy = {}) {
  return distributional_terms(model, split, N, kappa, policy).value;
}

// ---------------------------------------------------------------------------
// Test functions with a global evaluator (for quadrature) and an annulus pullback.

struct TestFunction {
  std::function<cplx(cplx)> G;  // on the closed domain
  AnnulusSeries g;              // G o psi on the annulus
};

/// G(z) = sum_t coeff_t z^{p_t} zbar^{q_t} with p_t, q_t >= 0.
struct PolynomialTerm {
  int p = 0;
  int q = 0;
  cplx coeff;
};

inline TestFunction polynomial_test_function(const ExteriorMap& map, std::vector<PolynomialTerm> terms, int bidegree,
                                             double rho, const SeriesPolicy& policy = {}) {
  for (const auto& t : terms)
    if (t.p < 0 || t.q < 0) throw Error(ErrorKind::config, "polynomial test function needs nonnegative powers");
  const AnnulusSeries psi = map.psi_series(bidegree, rho);
  const AnnulusSeries psibar = psi.conjugate();
  auto power = [&](const AnnulusSeries& base, int e) {
    AnnulusSeries r = AnnulusSeries::constant(1.0, bidegree, rho);
    for (int i = 0; i < e; ++i) r = series_multiply(r, base, policy);
    return r;
  };
  AnnulusSeries g(bidegree, rho);
  for (const auto& t : terms) g += series_multiply(power(psi, t.p), power(psibar, t.q), policy) * t.coeff;
  TestFunction f;
  f.g = std::move(g);
  f.G = [terms = std::move(terms)](cplx z) {
    cplx s{};
    for (const auto& t : terms) s += t.coeff * std::pow(z, t.p) * std::pow(std::conj(z), t.q);
    return s;
  };
  return f;
}

/// G = chi(|phi|) phi^{-k}: holomorphic outside D, cut off deep inside; pullback zeta^{-k}.
inline TestFunction exterior_power_test_function(const ExteriorMap& map, int k, int bidegree, double rho,
                                                 double cut_lo, double cut_hi) {
  if (k < 1 || k > bidegree) throw Error(ErrorKind::config, "exterior power must lie in 1..M");
  TestFunction f;
  f.g = AnnulusSeries::monomial(-k, 0, 1.0, bidegree, rho);
  f.G = [map, k, cut_lo, cut_hi](cplx z) -> cplx {
    const auto zeta = try_map_forward(map, z);
    if (!zeta) return 0.0;
    const double r = std::abs(*zeta);
    double chi = 1.0;
    if (r <= cut_lo)
      chi = 0.0;
    else if (r < cut_hi) {
      const double t = (r - cut_lo) / (cut_hi - cut_lo);
      chi = t * t * t * (t * (6.0 * t - 15.0) + 10.0);
    }
    return chi * std::pow(*zeta, -k);
  };
  return f;
}

}  // namespace ponp
