#pragma once

// Assembled expansion model and pointwise evaluation of
//   pi_N(z) ~ C_N phi'(z) phi(z)^N e^{V(z)} sum_j N^{-j} X_j(phi(z)),
//   P_N = kappa_N pi_N,  kappa_N = C_N^{-1} N^{1/2} D_N.

#include <cmath>
#include <complex>
#include <optional>
#include <string>

#include "ponp/error.hpp"
#include "ponp/geometry.hpp"
#include "ponp/hierarchy.hpp"
#include "ponp/laplace.hpp"
#include "ponp/series.hpp"

namespace ponp {

struct ValidityOptions {
  double A = 1.0;  // validity region |phi(z)| >= 1 - A log(N) / N
  int N_min = 4;
};

struct ExpansionModel {
  ExteriorMap map = ExteriorMap::identity();
  WeightSpec weight;
  SzegoData szego;
  HierarchyCoeffs coeffs;
  NormExpansion norm;
  int order = 0;
  ValidityOptions validity;
};

inline ExpansionModel build_expansion_model(const ExteriorMap& map, const WeightSpec& weight, int order,
                                            const SeriesPolicy& policy = {}) {
  ExpansionModel m;
  m.map = map;
  m.weight = weight;
  m.szego = szego(weight, policy);
  m.coeffs = hierarchy_solve(m.szego, order, policy);
  m.norm = norm_expansion(m.szego, m.coeffs, order, policy);
  m.order = order;
  return m;
}

/// Pieces shared by every evaluator at a point: phi, phi', e^{V}.
struct ExteriorFrame {
  cplx phi;
  cplx dphi;
  cplx expV;
};

inline ExteriorFrame exterior_frame(const ExpansionModel& model, cplx z) {
  const cplx zeta = map_forward(model.map, z);
  return {zeta, 1.0 / model.map.dpsi(zeta), std::exp(model.szego.V_ext.eval(zeta))};
}

/// Lambda_N f(z) = phi'(z) phi(z)^N e^{V(z)} f(phi(z)).
inline cplx canonical_position(const ExpansionModel& model, const CircleSeries& f, int N, cplx z) {
  const ExteriorFrame fr = exterior_frame(model, z);
  return fr.dphi * std::pow(fr.phi, N) * fr.expV * f.eval(fr.phi);
}

/// C_N = cap^{N+1} e^{-V(inf)}.
inline double constant_CN(const ExpansionModel& model, int N) {
  if (N < 1) throw Error(ErrorKind::domain, "constant_CN needs N >= 1");
  return std::pow(model.map.cap(), N + 1) * std::exp(-model.szego.V_inf);
}

namespace detail {

inline void check_order(const ExpansionModel& model, int order) {
  if (order < 0 || order > model.order)
    throw Error(ErrorKind::domain, "order " + std::to_string(order) + " outside 0.." + std::to_string(model.order));
}

inline void check_validity(const ExpansionModel& model, int N, const ExteriorFrame& fr) {
  if (N < model.validity.N_min)
    throw Error(ErrorKind::out_of_validity,
                "degree " + std::to_string(N) + " below the asymptotic threshold " + std::to_string(model.validity.N_min));
  const double bound = 1.0 - model.validity.A * std::log(static_cast<double>(N)) / N;
  if (std::abs(fr.phi) < bound)
    throw Error(ErrorKind::out_of_validity,
                "evaluation point too deep inside the domain: |phi(z)| = " + std::to_string(std::abs(fr.phi)) +
                    " < " + std::to_string(bound));
}

inline ExteriorFrame checked_frame(const ExpansionModel& model, int N, cplx z) {
  std::optional<cplx> zeta = try_map_forward(model.map, z);
  if (!zeta)
    throw Error(ErrorKind::out_of_validity, "evaluation point outside the collar of the exterior map");
  const ExteriorFrame fr{*zeta, 1.0 / model.map.dpsi(*zeta), std::exp(model.szego.V_ext.eval(*zeta))};
  check_validity(model, N, fr);
  return fr;
}

/// C_N-free expansion phi' phi^N e^V S_N(phi) without the validity check.
inline cplx expansion_core(const ExpansionModel& model, int N, int order, const ExteriorFrame& fr) {
  const CircleSeries S = neumann_partial_sum(model.coeffs, N, order);
  return fr.dphi * std::pow(fr.phi, N) * fr.expV * S.eval(fr.phi);
}

}  // namespace detail

inline cplx monic_eval(const ExpansionModel& model, int N, int order, cplx z) {
  detail::check_order(model, order);
  const ExteriorFrame fr = detail::checked_frame(model, N, z);
  return constant_CN(model, N) * detail::expansion_core(model, N, order, fr);
}

/// D_N truncated at the requested order.
inline double norm_constant(const ExpansionModel& model, int N, int order) {
  double s = 0.0, p = 1.0;
  for (int j = 0; j <= order && j < static_cast<int>(model.norm.d.size()); ++j) {
    s += model.norm.d[static_cast<std::size_t>(j)] * p;
    p /= N;
  }
  return s;
}

inline double leading_coeff(const ExpansionModel& model, int N, int order) {
  detail::check_order(model, order);
  if (N < model.validity.N_min)
    throw Error(ErrorKind::out_of_validity, "degree below the asymptotic threshold");
  return std::sqrt(static_cast<double>(N)) * norm_constant(model, N, order) / constant_CN(model, N);
}

inline cplx normalized_eval(const ExpansionModel& model, int N, int order, cplx z) {
  return leading_coeff(model, N, order) * monic_eval(model, N, order, z);
}

/// F_N = D_N N^{1/2} phi' phi^N e^V S_N(phi) at a point given through its frame; no validity check.
inline cplx normalized_core(const ExpansionModel& model, int N, int order, const ExteriorFrame& fr) {
  return std::sqrt(static_cast<double>(N)) * norm_constant(model, N, order) *
         detail::expansion_core(model, N, order, fr);
}

}  // namespace ponp
