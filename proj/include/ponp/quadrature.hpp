#pragma once

// Area quadrature over a starlike domain bounded by psi(e^{it}).
// Points are z = c + s (b(t) - c) with b(t) = psi(e^{it}) and c the centroid of
// boundary samples. The normalized area element dA = dx dy / pi becomes
//   dA = (1/pi) s Im( conj(b - c) b'(t) ) ds dt.

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "ponp/error.hpp"
#include "ponp/geometry.hpp"

namespace ponp {

struct QuadratureResolution {
  int angular = 512;        // equispaced angles (periodic direction)
  int radial_levels = 6;    // graded cells [0,1/2], [1/2,3/4], ... toward the boundary
  int radial_nodes = 48;    // Gauss-Legendre nodes per radial cell

  QuadratureResolution refined() const { return {angular * 2, radial_levels + 1, radial_nodes + 16}; }
};

struct QuadratureRule {
  std::vector<cplx> nodes;
  std::vector<double> weights;  // dA weight times w(node)
  double declared_accuracy = 0.0;
  cplx center;
  QuadratureResolution resolution;

  double total_mass() const {
    double s = 0.0;
    for (double w : weights) s += w;
    return s;
  }
};

/// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration on P_n.
inline std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int n) {
  std::vector<double> x(static_cast<std::size_t>(n)), w(static_cast<std::size_t>(n));
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double t = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = t;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (t * p1 - p0) / (t * t - 1.0);
      const double dt = p1 / dp;
      t -= dt;
      if (std::abs(dt) < 1e-16) break;
    }
    {
      // recompute derivative at the converged node
      double p0 = 1.0, p1 = t;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * t * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = n * (t * p1 - p0) / (t * t - 1.0);
    }
    const double wt = 2.0 / ((1.0 - t * t) * dp * dp);
    x[static_cast<std::size_t>(i)] = -t;
    x[static_cast<std::size_t>(n - 1 - i)] = t;
    w[static_cast<std::size_t>(i)] = wt;
    w[static_cast<std::size_t>(n - 1 - i)] = wt;
  }
  return {x, w};
}

namespace detail {

inline cplx boundary_centroid(const ExteriorMap& map, int samples) {
  cplx c{};
  for (int i = 0; i < samples; ++i) c += map.psi(std::polar(1.0, 2.0 * std::numbers::pi * i / samples));
  return c / static_cast<double>(samples);
}

/// Im(conj(b - c) b'(t)) with b'(t) = i e^{it} psi'(e^{it}).
inline double star_jacobian(const ExteriorMap& map, cplx c, double t) {
  const cplx e = std::polar(1.0, t);
  const cplx b = map.psi(e);
  const cplx db = cplx(0.0, 1.0) * e * map.dpsi(e);
  return (std::conj(b - c) * db).imag();
}

inline QuadratureRule assemble_rule(const ExteriorMap& map, const std::function<double(cplx)>& omega, cplx c,
                                    const QuadratureResolution& res) {
  const auto [gx, gw] = gauss_legendre(res.radial_nodes);
  std::vector<double> s_nodes, s_weights;
  double lo = 0.0, width = 0.5;
  for (int level = 0; level < res.radial_levels; ++level) {
    const double hi = (level + 1 == res.radial_levels) ? 1.0 : lo + width;
    for (std::size_t i = 0; i < gx.size(); ++i) {
      s_nodes.push_back(0.5 * (lo + hi) + 0.5 * (hi - lo) * gx[i]);
      s_weights.push_back(0.5 * (hi - lo) * gw[i]);
    }
    lo = hi;
    width *= 0.5;
  }

  QuadratureRule rule;
  rule.center = c;
  rule.resolution = res;
  const double dt = 2.0 * std::numbers::pi / res.angular;
  rule.nodes.reserve(s_nodes.size() * static_cast<std::size_t>(res.angular));
  rule.weights.reserve(rule.nodes.capacity());
  for (int j = 0; j < res.angular; ++j) {
    const double t = dt * j;
    const cplx b = map.psi(std::polar(1.0, t));
    const double jac = star_jacobian(map, c, t);
    for (std::size_t i = 0; i < s_nodes.size(); ++i) {
      const double s = s_nodes[i];
      const cplx z = c + s * (b - c);
      const double w = omega(z);
      if (!(w > 0.0) || !std::isfinite(w))
        throw Error(ErrorKind::positivity, "weight is not positive at a quadrature node (" + std::to_string(z.real()) +
                                               "," + std::to_string(z.imag()) + ")");
      rule.nodes.push_back(z);
      rule.weights.push_back(s * jac * s_weights[i] * dt / std::numbers::pi * w);
    }
  }
  return rule;
}

}  // namespace detail

/// Verify starlikeness with respect to the centroid of 1024 boundary samples.
inline cplx starlike_center(const ExteriorMap& map) {
  constexpr int kSamples = 1024;
  const cplx c = detail::boundary_centroid(map, kSamples);
  for (int i = 0; i < kSamples; ++i)
    if (!(detail::star_jacobian(map, c, 2.0 * std::numbers::pi * i / kSamples) > 0.0))
      throw Error(ErrorKind::unsupported_domain, "domain is not starlike with respect to its boundary centroid");
  return c;
}

/// Polar-fan rule; the declared accuracy is the total-mass change against a refined rule.
inline QuadratureRule build_quadrature(const ExteriorMap& map, const std::function<double(cplx)>& omega,
                                       const QuadratureResolution& res = {}) {
  const cplx c = starlike_center(map);
  QuadratureRule rule = detail::assemble_rule(map, omega, c, res);
  const QuadratureRule fine = detail::assemble_rule(map, omega, c, res.refined());
  rule.declared_accuracy = std::abs(rule.total_mass() - fine.total_mass());
  return rule;
}

}  // namespace ponp
