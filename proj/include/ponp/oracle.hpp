#pragma once

// Brute-force orthonormal polynomials for the measure 1_D w dA, computed by an
// Arnoldi iteration on the quadrature nodes: q_{n+1} is z q_n orthogonalized
// (two Gram-Schmidt passes) against q_0..q_n.

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "ponp/error.hpp"
#include "ponp/expansion.hpp"
#include "ponp/quadrature.hpp"

namespace ponp {

struct OraclePolynomials {
  int degree = 0;
  std::vector<double> kappa;                  // leading coefficients kappa_0..kappa_N
  std::vector<std::vector<cplx>> hessenberg;  // column n: z q_n = sum_{j<=n+1} h[n][j] q_j
  std::vector<std::vector<cplx>> coefficients;  // monomial coefficients of P_0..P_N
  double gram_residual = 0.0;                 // max |G - I| over the discrete Gram matrix
  std::vector<double> gram_row_residual;      // per-degree max |G_{nj} - delta_{nj}|

  /// P_0(z), ..., P_N(z) through the Arnoldi recurrence.
  std::vector<cplx> eval_all(cplx z) const {
    std::vector<cplx> P(static_cast<std::size_t>(degree + 1));
    P[0] = kappa[0];
    for (int n = 0; n < degree; ++n) {
      const auto& h = hessenberg[static_cast<std::size_t>(n)];
      cplx v = z * P[static_cast<std::size_t>(n)];
      for (int j = 0; j <= n; ++j) v -= h[static_cast<std::size_t>(j)] * P[static_cast<std::size_t>(j)];
      P[static_cast<std::size_t>(n + 1)] = v / h[static_cast<std::size_t>(n + 1)];
    }
    return P;
  }

  cplx eval(int n, cplx z) const {
    if (n < 0 || n > degree) throw Error(ErrorKind::domain, "oracle degree out of range");
    return eval_all(z)[static_cast<std::size_t>(n)];
  }

  /// pi_n = P_n / kappa_n.
  cplx monic(int n, cplx z) const { return eval(n, z) / kappa[static_cast<std::size_t>(n)]; }
};

namespace detail {

inline cplx discrete_inner(const QuadratureRule& rule, const std::vector<cplx>& a, const std::vector<cplx>& b) {
  cplx s{};
  for (std::size_t i = 0; i < a.size(); ++i) s += rule.weights[i] * a[i] * std::conj(b[i]);
  return s;
}

}  // namespace detail

inline OraclePolynomials oracle_onps(const QuadratureRule& rule, int N, double gram_tol = 1e-8) {
  if (N < 0) throw Error(ErrorKind::domain, "oracle degree must be >= 0");
  if (rule.nodes.empty()) throw Error(ErrorKind::config, "empty quadrature rule");
  // Products P_j conj(P_k) carry angular modes up to 2N; the trapezoid rule must resolve them.
  if (2 * N + 2 > rule.resolution.angular)
    throw Error(ErrorKind::degree_too_high, "degree " + std::to_string(N) + " needs more than " +
                                                std::to_string(rule.resolution.angular) + " angular nodes");
  const std::size_t nn = rule.nodes.size();
  const double mass = rule.total_mass();

  OraclePolynomials out;
  out.degree = N;
  std::vector<std::vector<cplx>> q;
  q.emplace_back(nn, cplx(1.0 / std::sqrt(mass), 0.0));
  out.kappa.push_back(1.0 / std::sqrt(mass));

  for (int n = 0; n < N; ++n) {
    std::vector<cplx> v(nn);
    const auto& qn = q[static_cast<std::size_t>(n)];
    for (std::size_t i = 0; i < nn; ++i) v[i] = rule.nodes[i] * qn[i];
    std::vector<cplx> h(static_cast<std::size_t>(n + 2), cplx{});
    for (int pass = 0; pass < 2; ++pass) {
      for (int j = 0; j <= n; ++j) {
        const auto& qj = q[static_cast<std::size_t>(j)];
        const cplx c = detail::discrete_inner(rule, v, qj);
        h[static_cast<std::size_t>(j)] += c;
        for (std::size_t i = 0; i < nn; ++i) v[i] -= c * qj[i];
      }
    }
    const double norm = std::sqrt(std::max(0.0, detail::discrete_inner(rule, v, v).real()));
    if (!(norm > 0.0))
      throw Error(ErrorKind::degree_too_high, "orthogonalization broke down at degree " + std::to_string(n + 1));
    h[static_cast<std::size_t>(n + 1)] = norm;
    for (auto& x : v) x /= norm;
    q.push_back(std::move(v));
    out.kappa.push_back(out.kappa.back() / norm);
    out.hessenberg.push_back(std::move(h));
  }

  out.gram_row_residual.assign(static_cast<std::size_t>(N + 1), 0.0);
  for (int a = 0; a <= N; ++a)
    for (int b = 0; b <= a; ++b) {
      const cplx g = detail::discrete_inner(rule, q[static_cast<std::size_t>(a)], q[static_cast<std::size_t>(b)]);
      const double r = std::abs(g - (a == b ? 1.0 : 0.0));
      out.gram_row_residual[static_cast<std::size_t>(a)] = std::max(out.gram_row_residual[static_cast<std::size_t>(a)], r);
      out.gram_residual = std::max(out.gram_residual, r);
    }
  if (out.gram_residual > gram_tol)
    throw Error(ErrorKind::degree_too_high, "Gram residual " + std::to_string(out.gram_residual) +
                                                " exceeds tolerance; raise the quadrature resolution or lower N");

  // Monomial coefficients from the same recurrence.
  out.coefficients.push_back({cplx(out.kappa[0], 0.0)});
  for (int n = 0; n < N; ++n) {
    const auto& h = out.hessenberg[static_cast<std::size_t>(n)];
    std::vector<cplx> c(static_cast<std::size_t>(n + 2), cplx{});
    const auto& prev = out.coefficients[static_cast<std::size_t>(n)];
    for (std::size_t k = 0; k < prev.size(); ++k) c[k + 1] += prev[k];
    for (int j = 0; j <= n; ++j) {
      const auto& pj = out.coefficients[static_cast<std::size_t>(j)];
      for (std::size_t k = 0; k < pj.size(); ++k) c[k] -= h[static_cast<std::size_t>(j)] * pj[k];
    }
    for (auto& x : c) x /= h[static_cast<std::size_t>(n + 1)];
    out.coefficients.push_back(std::move(c));
  }
  return out;
}

/// K_N(z, w) = sum_{j<=N} P_j(z) conj(P_j(w)); N defaults to the oracle degree.
inline cplx oracle_kernel(const OraclePolynomials& polys, cplx z, cplx w, int N = -1) {
  if (N < 0) N = polys.degree;
  if (N > polys.degree) throw Error(ErrorKind::domain, "kernel degree exceeds the oracle degree");
  const auto Pz = polys.eval_all(z);
  const auto Pw = polys.eval_all(w);
  cplx s{};
  for (int j = 0; j <= N; ++j) s += Pz[static_cast<std::size_t>(j)] * std::conj(Pw[static_cast<std::size_t>(j)]);
  return s;
}

/// Quintic smoothstep rising from 0 at x = a to 1 at x = b.
inline double smoothstep(double x, double a, double b) {
  if (x <= a) return 0.0;
  if (x >= b) return 1.0;
  const double t = (x - a) / (b - a);
  return t * t * t * (t * (6.0 * t - 15.0) + 10.0);
}

struct CutoffOptions {
  double lower_offset = 0.05;
  double upper_offset = 0.15;
};

/// Integral over D of |P_N - chi_0 F_N|^2 w dA, chi_0 = smoothstep(|phi|) in the collar.
inline double l2_discrepancy(const ExpansionModel& model, const QuadratureRule& rule, const OraclePolynomials& polys,
                             int N, int order, const CutoffOptions& cut = {}) {
  if (N < 1 || N > polys.degree) throw Error(ErrorKind::domain, "l2_discrepancy: N outside the oracle range");
  detail::check_order(model, order);
  const double rho = model.szego.inner_radius();
  const double r1 = rho + cut.lower_offset, r2 = rho + cut.upper_offset;
  const CircleSeries S = neumann_partial_sum(model.coeffs, N, order);
  const double scale = std::sqrt(static_cast<double>(N)) * norm_constant(model, N, order);

  double total = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const cplx z = rule.nodes[i];
    const cplx p = polys.eval(N, z);
    cplx f{};
    if (const auto zeta = try_map_forward(model.map, z)) {
      const double chi = smoothstep(std::abs(*zeta), r1, r2);
      if (chi > 0.0) {
        const cplx e = std::exp(model.szego.V_ext.eval(*zeta));
        f = chi * scale * std::pow(*zeta, N) * e * S.eval(*zeta) / model.map.dpsi(*zeta);
      }
    }
    total += rule.weights[i] * std::norm(p - f);
  }
  return total;
}

/// Convenience: oracle built on the model's map and weight.
inline QuadratureRule model_quadrature(const ExpansionModel& model, const QuadratureResolution& res = {}) {
  return build_quadrature(model.map, model.weight.omega, res);
}

}  // namespace ponp
