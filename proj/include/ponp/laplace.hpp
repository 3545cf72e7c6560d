#pragma once

// Laplace-type integrals int_0^inf G(s) e^{-lambda s} ds from the jet of G at 0,
// and the resulting expansion of the norm of the canonically positioned S_N.

#include <cmath>
#include <complex>
#include <vector>

#include "ponp/error.hpp"
#include "ponp/hierarchy.hpp"
#include "ponp/series.hpp"

namespace ponp {

struct JetAtZero {
  std::vector<cplx> derivatives;  // G(0), G'(0), ..., G^{(kappa)}(0)
  double next_derivative_bound = 0.0;  // sup |G^{(kappa+1)}| on [0, inf)
};

struct WatsonResult {
  cplx value;
  double error_bound = 0.0;
};

/// sum_j G^{(j)}(0) / lambda^{j+1}, with remainder bound sup|G^{(kappa+1)}| / lambda^{kappa+2}.
inline WatsonResult watson_sum(const JetAtZero& jet, double lambda) {
  if (!(lambda > 0.0)) throw Error(ErrorKind::domain, "watson_sum needs lambda > 0");
  WatsonResult r{};
  double p = 1.0 / lambda;
  for (const auto& g : jet.derivatives) {
    r.value += g * p;
    p /= lambda;
  }
  r.error_bound = jet.next_derivative_bound * p;
  return r;
}

/// D_N = sum_j d[j] N^{-j} with d[0] = 1; N ||Lambda_N S_N||^2 = sum_p c[p] N^{-p} with c[0] = 1.
struct NormExpansion {
  std::vector<double> d;
  std::vector<double> c;

  int order() const { return static_cast<int>(d.size()) - 1; }

  double D(double N) const {
    double s = 0.0, p = 1.0;
    for (double v : d) {
      s += v * p;
      p /= N;
    }
    return s;
  }
};

/// Coefficients of (sum_p c_p x^p)^{-1/2} for c_0 = 1, to the length of c.
inline std::vector<double> inverse_sqrt_series(const std::vector<double>& c) {
  // y = c^{-1/2} satisfies y^2 c = 1; solve y via the power rule recursion
  // for f = c^a: n c_0 f_n = sum_{k=1}^n (a k - (n - k)) c_k f_{n-k}.
  const double a = -0.5;
  std::vector<double> f(c.size(), 0.0);
  if (c.empty()) return f;
  if (std::abs(c[0] - 1.0) > 1e-10)
    throw Error(ErrorKind::internal_consistency, "norm series must start at 1, got " + std::to_string(c[0]));
  f[0] = 1.0;
  for (std::size_t n = 1; n < c.size(); ++n) {
    double s = 0.0;
    for (std::size_t k = 1; k <= n; ++k)
      s += (a * static_cast<double>(k) - static_cast<double>(n - k)) * c[k] * f[n - k];
    f[n] = s / (static_cast<double>(n) * c[0]);
  }
  return f;
}

/// Jet at s = 0 of A(s) = mean_t [ F (e^{-s+it}) ] e^{-2s} for an annulus series F.
/// d/ds acts on z^m zbar^n e^{-2s} as -(m + n + 2).
inline JetAtZero radial_jet(const AnnulusSeries& F, int order) {
  JetAtZero jet;
  jet.derivatives.assign(static_cast<std::size_t>(order + 1), cplx{});
  const int M = F.bidegree();
  double bound = 0.0;
  for (int m = -M; m <= M; ++m) {
    const cplx v = F(m, m);
    if (v == cplx{}) continue;
    const double e = -(2.0 * m + 2.0);
    double p = 1.0;
    for (int j = 0; j <= order; ++j) {
      jet.derivatives[static_cast<std::size_t>(j)] += v * p;
      p *= e;
    }
    // sup over s >= 0 of |e|^{k+1} e^{e s} is |e|^{k+1} when e <= 0; growth for e > 0
    // is not bounded, so only decaying modes contribute a finite bound.
    bound += std::abs(v) * std::pow(std::abs(e), order + 1) * (e <= 0.0 ? 1.0 : INFINITY);
  }
  jet.next_derivative_bound = bound;
  return jet;
}

/// Norm expansion of Lambda_N[S_N]:
///   N ||Lambda_N S_N||^2 = 2N int_0^inf A_N(s) e^{-2Ns} ds,
///   A_N(s) = mean_t [ |S_N|^2 Omega ](e^{-s+it}) e^{-2s},
/// expanded with watson_sum at lambda = 2N term by term in N^{-1}.
inline NormExpansion norm_expansion(const SzegoData& szego, const HierarchyCoeffs& coeffs, int order,
                                    const SeriesPolicy& policy = {}) {
  if (order > coeffs.order) throw Error(ErrorKind::domain, "norm expansion order exceeds the hierarchy order");
  const int M = szego.bidegree();
  const double rho = szego.inner_radius();
  std::vector<AnnulusSeries> X, Xbar;
  for (int j = 0; j <= order; ++j) {
    X.push_back(lift(coeffs.X[static_cast<std::size_t>(j)], M, rho, policy));
    Xbar.push_back(conj_lift(coeffs.X[static_cast<std::size_t>(j)], M, rho, policy));
  }

  // c_p = sum_{a+b+j=p} 2^{-j} A_{ab}^{(j)}(0): the term G^{(j)}(0)/(2N)^{j+1}
  // of the Watson sum, multiplied by 2N, carries N^{-j} 2^{-j}.
  std::vector<cplx> c(static_cast<std::size_t>(order + 1), cplx{});
  for (int a = 0; a <= order; ++a) {
    const AnnulusSeries XaOmega = series_multiply(X[static_cast<std::size_t>(a)], szego.Omega, policy);
    for (int b = 0; a + b <= order; ++b) {
      const AnnulusSeries F = series_multiply(XaOmega, Xbar[static_cast<std::size_t>(b)], policy);
      const JetAtZero jet = radial_jet(F, order - a - b);
      double scale = 1.0;
      for (int j = 0; a + b + j <= order; ++j) {
        c[static_cast<std::size_t>(a + b + j)] += jet.derivatives[static_cast<std::size_t>(j)] * scale;
        scale *= 0.5;
      }
    }
  }

  NormExpansion out;
  for (const auto& v : c) {
    if (std::abs(v.imag()) > 1e-10 * std::max(1.0, std::abs(v)))
      throw Error(ErrorKind::internal_consistency, "norm expansion coefficient has imaginary part " +
                                                       std::to_string(v.imag()));
    out.c.push_back(v.real());
  }
  out.d = inverse_sqrt_series(out.c);
  return out;
}

}  // namespace ponp
