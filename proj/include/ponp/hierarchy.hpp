#pragma once

// Solver for the hierarchy of scalar jump problems that fixes the correction
// coefficients X_1, X_2, ... of the exterior expansion.
//
//   T f = Omega^{-1} (z d/dz + I)(f Omega),      Q = P R,
//   X_0 = 1,  X_p = Q T [(Q - I) T]^{p-1} X_0.

#include <algorithm>
#include <cmath>
#include <vector>

#include "ponp/error.hpp"
#include "ponp/geometry.hpp"
#include "ponp/series.hpp"

namespace ponp {

struct HierarchyCoeffs {
  int order = 0;                // kappa
  std::vector<CircleSeries> X;  // X[0] = 1, X[j] exterior-vanishing for j >= 1
};

inline AnnulusSeries op_T(const AnnulusSeries& f, const SzegoData& szego, const SeriesPolicy& policy = {}) {
  AnnulusSeries fw = series_multiply(f, szego.Omega, policy);
  fw += wirtinger_z(fw);
  return series_multiply(szego.Omega_inv, fw, policy);
}

inline AnnulusSeries op_T(const CircleSeries& f, const SzegoData& szego, const SeriesPolicy& policy = {}) {
  return op_T(lift(f, szego.bidegree(), szego.inner_radius(), policy), szego, policy);
}

inline CircleSeries op_Q(const AnnulusSeries& a, int bandwidth = -1) {
  return hardy_project(restrict_to_circle(a, bandwidth));
}

namespace detail {

inline int circle_bandwidth(const SzegoData& s) { return 2 * s.bidegree(); }

inline HierarchyCoeffs trivial_hierarchy(const SzegoData& s, int order) {
  if (order < 0) throw Error(ErrorKind::config, "hierarchy order must be >= 0");
  HierarchyCoeffs h;
  h.order = order;
  h.X.push_back(CircleSeries::constant(1.0, circle_bandwidth(s)));
  return h;
}

}  // namespace detail

/// Left-to-right evaluation: Y_0 = 1, X_p = Q T Y_{p-1}, Y_p = X_p - T Y_{p-1}.
inline HierarchyCoeffs hierarchy_solve(const SzegoData& szego, int order, const SeriesPolicy& policy = {}) {
  HierarchyCoeffs h = detail::trivial_hierarchy(szego, order);
  const int M = szego.bidegree();
  const double rho = szego.inner_radius();
  const int K = detail::circle_bandwidth(szego);
  AnnulusSeries Y = AnnulusSeries::constant(1.0, M, rho);
  for (int p = 1; p <= order; ++p) {
    AnnulusSeries TY = op_T(Y, szego, policy);
    CircleSeries Xp = op_Q(TY, std::max(K, 2 * TY.bidegree()));
    if (p < order) Y = lift(Xp, M, rho, policy) - TY;
    h.X.push_back(std::move(Xp));
  }
  return h;
}

/// Triangular form X_p = sum_{l<p} (-1)^{p-l+1} Q T^{p-l} X_l, kept for cross-validation.
inline HierarchyCoeffs hierarchy_solve_alt(const SzegoData& szego, int order, const SeriesPolicy& policy = {}) {
  HierarchyCoeffs h = detail::trivial_hierarchy(szego, order);
  const int M = szego.bidegree();
  const double rho = szego.inner_radius();
  const int K = detail::circle_bandwidth(szego);
  for (int p = 1; p <= order; ++p) {
    CircleSeries Xp(K, Support::exterior_vanishing);
    for (int l = 0; l < p; ++l) {
      AnnulusSeries t = lift(h.X[static_cast<std::size_t>(l)], M, rho, policy);
      for (int i = 0; i < p - l; ++i) t = op_T(t, szego, policy);
      const double sign = ((p - l + 1) % 2 == 0) ? 1.0 : -1.0;
      Xp += op_Q(t, std::max(K, 2 * t.bidegree())) * sign;
    }
    h.X.push_back(Xp.with_support(Support::exterior_vanishing));
  }
  return h;
}

/// Largest |mode k <= -1| of sum_{l<=p} (-1)^{p-l} T^{p-l} X_l on the circle.
inline double hierarchy_residual(const HierarchyCoeffs& coeffs, const SzegoData& szego, int p,
                                 const SeriesPolicy& policy = {}) {
  if (p < 1 || p > coeffs.order) throw Error(ErrorKind::domain, "residual index outside 1..order");
  const int M = szego.bidegree();
  const double rho = szego.inner_radius();
  AnnulusSeries total(M, rho);
  for (int l = 0; l <= p; ++l) {
    AnnulusSeries t = lift(coeffs.X[static_cast<std::size_t>(l)], M, rho, policy);
    for (int i = 0; i < p - l; ++i) t = op_T(t, szego, policy);
    total += ((p - l) % 2 == 0) ? t : -t;
  }
  const CircleSeries c = restrict_to_circle(total);
  double worst = 0.0;
  for (int k = -c.bandwidth(); k <= -1; ++k) worst = std::max(worst, std::abs(c[k]));
  return worst;
}

/// S_N = sum_{j<=kappa} N^{-j} X_j.
inline CircleSeries neumann_partial_sum(const HierarchyCoeffs& coeffs, double N, int order) {
  if (!(N >= 1.0)) throw Error(ErrorKind::domain, "neumann_partial_sum needs N >= 1");
  if (order > coeffs.order) throw Error(ErrorKind::domain, "requested order exceeds the solved hierarchy");
  CircleSeries S = coeffs.X[0];
  double scale = 1.0;
  for (int j = 1; j <= order; ++j) {
    scale /= N;
    S += coeffs.X[static_cast<std::size_t>(j)] * scale;
  }
  return S;
}

}  // namespace ponp
