#pragma once

// Off-spectral normalized kernel at leading order and the diagonal of the
// exterior annulus kernel used in the Bernstein-Walsh bound.

#include <cmath>
#include <complex>
#include <string>

#include "ponp/error.hpp"
#include "ponp/expansion.hpp"
#include "ponp/geometry.hpp"

namespace ponp {

struct OffSpectralPoint {
  cplx w;
  cplx a;  // phi(w)
  double delta = 0.0;
};

/// Requires |phi(w)| > 1 + delta.
inline OffSpectralPoint make_offspectral_point(const ExteriorMap& map, cplx w, double delta = 0.0) {
  const auto a = try_map_forward(map, w);
  if (!a || !(std::abs(*a) > 1.0 + delta))
    throw Error(ErrorKind::not_off_spectral,
                "point (" + std::to_string(w.real()) + "," + std::to_string(w.imag()) + ") is not separated from the domain");
  return {w, *a, delta};
}

/// Outer function on the exterior disk with |rho_w|^2 = (|a|^2 - 1)/|zeta - a|^2 on the circle,
/// positive at zeta = a:  rho_w = (|a|/a) sqrt(|a|^2 - 1) zeta / (conj(a) zeta - 1).
inline cplx outer_rho_zeta(cplx a, cplx zeta) {
  const double m = std::abs(a);
  if (!(m > 1.0)) throw Error(ErrorKind::not_off_spectral, "outer function needs |a| > 1");
  return (m / a) * std::sqrt(m * m - 1.0) * zeta / (std::conj(a) * zeta - 1.0);
}

inline cplx outer_rho(const ExteriorMap& map, const OffSpectralPoint& point, cplx z) {
  return outer_rho_zeta(point.a, map_forward(map, z));
}

/// N^{1/2} rho_w(z) phi'(z) phi(z)^N e^{V(z)}; the unimodular constant is omitted.
inline cplx offspectral_leading(const ExpansionModel& model, const OffSpectralPoint& point, int N, cplx z) {
  const ExteriorFrame fr = detail::checked_frame(model, N, z);
  return std::sqrt(static_cast<double>(N)) * outer_rho_zeta(point.a, fr.phi) * fr.dphi * std::pow(fr.phi, N) *
         fr.expV;
}

/// Phase D_{N,w} = exp(-i (N arg phi(w) + arg phi'(w) + Im V(w))).
inline cplx offspectral_phase(const ExpansionModel& model, const OffSpectralPoint& point, int N) {
  const cplx dphi = 1.0 / model.map.dpsi(point.a);
  const double imV = model.szego.V_ext.eval(point.a).imag();
  return std::polar(1.0, -(N * std::arg(point.a) + std::arg(dphi) + imV));
}

/// c_{n,rho}^2 for the basis c_{n,rho} phi^n phi' of the exterior annulus space.
inline double bw_basis_weight(double rho, int n) {
  if (n == -1) return 1.0 / std::log(1.0 / (rho * rho));
  return 2.0 * (n + 1) / (1.0 - std::pow(rho, 2 * n + 2));
}

/// K_N(z,z) = |phi'|^2 sum_{n<=N} c_{n,rho}^2 |phi|^{2n}, tail n -> -inf summed until terms drop below 1e-14.
inline double bw_kernel_diag(double rho, const ExteriorMap& map, int N, cplx z) {
  if (!(rho > 0.0 && rho < 1.0)) throw Error(ErrorKind::domain, "bw_kernel_diag needs rho in (0,1)");
  const auto zeta = try_map_forward(map, z);
  if (!zeta || !(std::abs(*zeta) > rho)) throw Error(ErrorKind::domain, "bw_kernel_diag needs |phi(z)| > rho");
  const double x = std::norm(*zeta);
  const double dphi2 = 1.0 / std::norm(map.dpsi(*zeta));

  double sum = 0.0;
  for (int n = std::max(N, -1); n >= 0; --n) sum += bw_basis_weight(rho, n) * std::pow(x, n);
  for (int n = std::min(N, -1); ; --n) {
    const double t = bw_basis_weight(rho, n) * std::pow(x, n);
    sum += t;
    if (n < -1 && t < 1e-14 * sum) break;
    if (n < -100000) throw Error(ErrorKind::convergence, "bw_kernel_diag tail did not converge");
  }
  return dphi2 * sum;
}

}  // namespace ponp
