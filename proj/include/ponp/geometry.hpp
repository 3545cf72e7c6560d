#pragma once

// Domains are given through the inverse exterior map
//   psi(zeta) = cap * zeta + a_0 + sum_{j>=1} a_j zeta^{-j},
// which carries |zeta| > 1 onto the complement of the domain.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ponp/error.hpp"
#include "ponp/series.hpp"

namespace ponp {

class ExteriorMap {
 public:
  ExteriorMap(double cap, std::vector<cplx> tail, std::optional<double> univalence_radius = std::nullopt)
      : cap_(cap), tail_(std::move(tail)) {
    if (!(cap > 0.0) || !std::isfinite(cap))
      throw Error(ErrorKind::config, "orthostatic normalization requires cap > 0, got " + std::to_string(cap));
    if (tail_.empty()) tail_.push_back(0.0);
    if (univalence_radius) {
      rho_u_ = *univalence_radius;
      if (!(rho_u_ > 0.0 && rho_u_ < 1.0))
        throw Error(ErrorKind::config, "univalence radius must lie in (0,1)");
      if (!derivative_zero_free_outside(rho_u_))
        throw Error(ErrorKind::config, "psi' vanishes outside the declared univalence radius");
    } else {
      rho_u_ = find_univalence_radius();
    }
  }

  static ExteriorMap identity() { return ExteriorMap(1.0, {0.0}); }
  static ExteriorMap disk(double radius, cplx center = 0.0) { return ExteriorMap(radius, {center}); }

  /// Ellipse with semi-axes a >= b > 0 along the coordinate axes (Joukowski map).
  static ExteriorMap ellipse(double a, double b) {
    if (!(a >= b && b > 0.0)) throw Error(ErrorKind::config, "ellipse needs a >= b > 0");
    const double q = (a - b) / (a + b);
    return ExteriorMap((a + b) / 2.0, {0.0, (a - b) / 2.0}, std::max(std::sqrt(q), 1e-3));
  }

  /// psi(zeta) = zeta + eps * zeta^{-k}.
  static ExteriorMap perturbed_disk(cplx eps, int k) {
    if (k < 1) throw Error(ErrorKind::config, "perturbation order must be >= 1");
    std::vector<cplx> tail(static_cast<std::size_t>(k + 1), 0.0);
    tail[static_cast<std::size_t>(k)] = eps;
    return ExteriorMap(1.0, std::move(tail));
  }

  double cap() const noexcept { return cap_; }
  const std::vector<cplx>& tail() const noexcept { return tail_; }
  double univalence_radius() const noexcept { return rho_u_; }

  cplx psi(cplx zeta) const {
    const cplx zi = 1.0 / zeta;
    cplx acc{};
    for (std::size_t j = tail_.size(); j-- > 1;) acc = (acc + tail_[j]) * zi;
    return cap_ * zeta + tail_[0] + acc;
  }

  cplx dpsi(cplx zeta) const {
    const cplx zi = 1.0 / zeta;
    cplx acc{};
    // d/dzeta a_j zeta^{-j} = -j a_j zeta^{-j-1}
    for (std::size_t j = tail_.size(); j-- > 1;) acc = (acc - static_cast<double>(j) * tail_[j]) * zi;
    return cap_ + acc * zi;
  }

  ExteriorMap scaled(double lambda) const {
    std::vector<cplx> t = tail_;
    for (auto& v : t) v *= lambda;
    return ExteriorMap(cap_ * lambda, std::move(t), rho_u_);
  }

  /// psi and conj(psi) as annulus series in zeta.
  AnnulusSeries psi_series(int bidegree, double inner_radius) const {
    AnnulusSeries s(bidegree, inner_radius);
    s.at(1, 0) = cap_;
    for (std::size_t j = 0; j < tail_.size(); ++j) s.at(-static_cast<int>(j), 0) = tail_[j];
    return s;
  }

 private:
  static int winding(const std::function<cplx(double)>& f, int samples) {
    double total = 0.0;
    cplx prev = f(0.0);
    for (int i = 1; i <= samples; ++i) {
      const cplx cur = f(2.0 * std::numbers::pi * i / samples);
      total += std::arg(cur / prev);
      prev = cur;
    }
    return static_cast<int>(std::lround(total / (2.0 * std::numbers::pi)));
  }

  bool circle_ok(double r) const {
    constexpr int kSamples = 512;
    double min_abs = INFINITY;
    for (int i = 0; i < kSamples; ++i) min_abs = std::min(min_abs, std::abs(dpsi(std::polar(r, 2.0 * std::numbers::pi * i / kSamples))));
    if (!(min_abs > 1e-10 * cap_)) return false;
    return winding([&](double t) { return dpsi(std::polar(r, t)); }, kSamples) == 0;
  }

  bool derivative_zero_free_outside(double r) const {
    for (double s = r + 0.005; s <= 1.5 + 1e-12; s += 0.01)
      if (!circle_ok(s)) return false;
    return true;
  }

  double find_univalence_radius() const {
    double good = 1.0;
    if (!circle_ok(1.0) || !derivative_zero_free_outside(1.0))
      throw Error(ErrorKind::config, "psi' vanishes on or outside the unit circle; map is not univalent");
    for (double r = 0.995; r > 0.02; r -= 0.005) {
      if (!circle_ok(r)) break;
      good = r;
    }
    return good;
  }

  double cap_;
  std::vector<cplx> tail_;
  double rho_u_ = 0.0;
};

inline double capacity(const ExteriorMap& map) { return map.cap(); }

/// phi(z) by Newton inversion of psi; empty when Newton fails or lands inside the univalence radius.
inline std::optional<cplx> try_map_forward(const ExteriorMap& map, cplx z, double tol = 1e-13) {
  cplx zeta = (z - map.tail()[0]) / map.cap();
  if (std::abs(zeta) < map.univalence_radius()) zeta *= map.univalence_radius() / std::max(std::abs(zeta), 1e-300);
  const double scale = std::max(1.0, std::abs(z));
  for (int it = 0; it < 50; ++it) {
    const cplx f = map.psi(zeta) - z;
    if (std::abs(f) <= tol * scale) return std::abs(zeta) > map.univalence_radius() ? std::optional<cplx>(zeta) : std::nullopt;
    const cplx d = map.dpsi(zeta);
    if (d == cplx{}) return std::nullopt;
    cplx step = f / d;
    // Damp steps that would throw the iterate across the critical circle.
    double lambda = 1.0;
    while (lambda > 1e-4 && std::abs(map.psi(zeta - lambda * step) - z) > std::abs(f)) lambda *= 0.5;
    zeta -= lambda * step;
    if (!std::isfinite(zeta.real()) || !std::isfinite(zeta.imag())) return std::nullopt;
  }
  const cplx f = map.psi(zeta) - z;
  if (std::abs(f) <= 1e-11 * scale && std::abs(zeta) > map.univalence_radius()) return zeta;
  return std::nullopt;
}

inline cplx map_forward(const ExteriorMap& map, cplx z) {
  if (auto r = try_map_forward(map, z)) return *r;
  throw Error(ErrorKind::point_outside_collar,
              "Newton inversion of the exterior map did not converge in 50 iterations at z = (" +
                  std::to_string(z.real()) + "," + std::to_string(z.imag()) + ")");
}

/// phi'(z) = 1 / psi'(phi(z)).
inline cplx map_derivative(const ExteriorMap& map, cplx z) { return 1.0 / map.dpsi(map_forward(map, z)); }

// ---------------------------------------------------------------------------
// Weights

/// log w(z) = log_scale + 2 Re sum_t coeff_t z^{p_t} zbar^{q_t}.
struct LogPolynomialWeight {
  struct Term {
    int p = 0;
    int q = 0;
    cplx coeff;
  };
  std::vector<Term> terms;
  double log_scale = 0.0;

  double log_value(cplx z) const {
    double s = log_scale;
    for (const auto& t : terms) s += 2.0 * (t.coeff * std::pow(z, t.p) * std::pow(std::conj(z), t.q)).real();
    return s;
  }

  static LogPolynomialWeight constant(double value) {
    if (!(value > 0.0)) throw Error(ErrorKind::positivity, "constant weight must be positive");
    return {{}, std::log(value)};
  }
  /// w = exp(2 Re(alpha z)).
  static LogPolynomialWeight exp_re_linear(cplx alpha, double scale = 1.0) {
    if (!(scale > 0.0)) throw Error(ErrorKind::positivity, "weight scale must be positive");
    return {{{1, 0, alpha}}, std::log(scale)};
  }
};

struct WeightSpec {
  std::function<double(cplx)> omega;  // global evaluator on the closed domain
  AnnulusSeries log_pullback;         // R = log w o psi on the annulus
  double floor = 0.0;                 // smallest sampled value of w near the boundary
  double fit_residual = 0.0;          // max |R - log w o psi| on the validation grid
};

struct FitOptions {
  double positivity_floor = 1e-12;
  double residual_tol = 1e-10;
};

namespace detail {

inline std::vector<double> chebyshev_points(double a, double b, int n) {
  std::vector<double> x(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    x[static_cast<std::size_t>(i)] =
        0.5 * (a + b) - 0.5 * (b - a) * std::cos(std::numbers::pi * (i + 0.5) / n);
  return x;
}

/// Validation residual of R against log w o psi on radii and angles offset from any fit grid.
inline double validation_residual(const ExteriorMap& map, const std::function<double(cplx)>& log_omega,
                                  const AnnulusSeries& R, double& floor_out,
                                  const std::function<double(cplx)>& omega) {
  const double rho = R.inner_radius();
  double worst = 0.0;
  double floor = INFINITY;
  constexpr int kRadii = 7, kAngles = 97;
  for (int i = 0; i < kRadii; ++i) {
    const double r = std::exp(std::log(rho) * (1.0 - 2.0 * (i + 0.37) / kRadii) * 0.98);
    for (int j = 0; j < kAngles; ++j) {
      const cplx zeta = std::polar(r, 2.0 * std::numbers::pi * (j + 0.29) / kAngles);
      const cplx z = map.psi(zeta);
      worst = std::max(worst, std::abs(R.eval(zeta) - log_omega(z)));
      floor = std::min(floor, omega(z));
    }
  }
  floor_out = floor;
  return worst;
}

}  // namespace detail

/// Fit R = log w o psi on the annulus: DFT in angle on >= 4M+1 nodes at >= 2M+1 radii,
/// then least squares per angular mode onto the radial powers r^{m+n}.
inline WeightSpec pullback_weight(const ExteriorMap& map, std::function<double(cplx)> omega, int bidegree,
                                  double inner_radius, const FitOptions& opts = {}) {
  const int M = bidegree;
  const double rho = inner_radius;
  const int n_angles = 4 * M + 4;
  const int n_radii = 4 * M + 2;
  const auto radii = detail::chebyshev_points(rho, 1.0 / rho, n_radii);

  // samples(i, k): angular mode k of log w o psi at radius i.
  Eigen::MatrixXcd modes(n_radii, 4 * M + 1);
  modes.setZero();
  std::vector<double> values(static_cast<std::size_t>(n_angles));
  for (int i = 0; i < n_radii; ++i) {
    const double r = radii[static_cast<std::size_t>(i)];
    for (int j = 0; j < n_angles; ++j) {
      const cplx z = map.psi(std::polar(r, 2.0 * std::numbers::pi * j / n_angles));
      const double w = omega(z);
      if (!(w > 0.0) || !std::isfinite(w))
        throw Error(ErrorKind::positivity, "weight is not positive near the boundary at z = (" +
                                               std::to_string(z.real()) + "," + std::to_string(z.imag()) + ")");
      values[static_cast<std::size_t>(j)] = std::log(w);
    }
    for (int k = -2 * M; k <= 2 * M; ++k) {
      cplx acc{};
      for (int j = 0; j < n_angles; ++j)
        acc += values[static_cast<std::size_t>(j)] * std::polar(1.0, -2.0 * std::numbers::pi * k * j / n_angles);
      modes(i, k + 2 * M) = acc / static_cast<double>(n_angles);
    }
  }

  // Per angular mode k, the exponent pairs (m, n) = (k + n, n) contribute r^{k + 2n}. The monomial
  // system is badly conditioned, so pairs are admitted in order of increasing |m| + |n| until the
  // radial profile is reproduced; exactly representable weights come out with their exact coefficients.
  AnnulusSeries R(M, rho);
  for (int k = -2 * M; k <= 2 * M; ++k) {
    std::vector<int> ns;
    for (int n = -M; n <= M; ++n)
      if (std::abs(k + n) <= M) ns.push_back(n);
    std::stable_sort(ns.begin(), ns.end(), [k](int a, int b) {
      return std::abs(k + a) + std::abs(a) < std::abs(k + b) + std::abs(b);
    });
    const Eigen::VectorXcd target = modes.col(k + 2 * M);
    const double target_scale = std::max(1.0, target.cwiseAbs().maxCoeff());
    if (target.cwiseAbs().maxCoeff() <= 1e-15 * target_scale) continue;

    const int all = static_cast<int>(ns.size());
    Eigen::MatrixXd A_full(n_radii, all);
    Eigen::VectorXd scale(all);
    for (int c = 0; c < all; ++c) {
      const int e = k + 2 * ns[static_cast<std::size_t>(c)];
      double mx = 0.0;
      for (int i = 0; i < n_radii; ++i) {
        A_full(i, c) = std::pow(radii[static_cast<std::size_t>(i)], e);
        mx = std::max(mx, A_full(i, c));
      }
      scale(c) = mx;
      A_full.col(c) /= mx;
    }

    Eigen::VectorXd best_re, best_im;
    double best_res = INFINITY;
    int best_cols = 0;
    for (int cols = 1; cols <= all; ++cols) {
      const Eigen::MatrixXd A = A_full.leftCols(cols);
      Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
      const Eigen::VectorXd re = qr.solve(target.real());
      const Eigen::VectorXd im = qr.solve(target.imag());
      const double res = std::max((A * re - target.real()).cwiseAbs().maxCoeff(),
                                  (A * im - target.imag()).cwiseAbs().maxCoeff());
      if (res < best_res) {
        best_res = res;
        best_re = re;
        best_im = im;
        best_cols = cols;
      }
      if (res <= 1e-14 * target_scale) break;
    }
    for (int c = 0; c < best_cols; ++c) {
      const int n = ns[static_cast<std::size_t>(c)];
      R.at(k + n, n) = cplx(best_re(c), best_im(c)) / scale(c);
    }
  }
  // Enforce c_{nm} = conj(c_{mn}).
  R = (R + R.conjugate()) * 0.5;

  WeightSpec spec{omega, R, 0.0, 0.0};
  auto log_omega = [&](cplx z) { return std::log(omega(z)); };
  spec.fit_residual = detail::validation_residual(map, log_omega, R, spec.floor, omega);
  if (!(spec.floor >= opts.positivity_floor))
    throw Error(ErrorKind::positivity, "weight drops below the positivity floor near the boundary");
  if (!(spec.fit_residual <= opts.residual_tol))
    throw Error(ErrorKind::weight_not_resolvable,
                "fit residual " + std::to_string(spec.fit_residual) +
                    " above tolerance; increase M or move the inner radius closer to 1");
  return spec;
}

/// Exact pullback for log-polynomial weights, computed in the series algebra from psi.
inline WeightSpec pullback_log_polynomial(const ExteriorMap& map, const LogPolynomialWeight& weight, int bidegree,
                                          double inner_radius, const SeriesPolicy& policy = {},
                                          const FitOptions& opts = {}) {
  SeriesPolicy p = policy;
  p.max_bidegree = std::max(p.max_bidegree, bidegree);
  const AnnulusSeries psi = map.psi_series(bidegree, inner_radius);
  const AnnulusSeries psib = psi.conjugate();

  auto power = [&](const AnnulusSeries& base, int e) {
    AnnulusSeries r = AnnulusSeries::constant(1.0, 0, inner_radius);
    for (int i = 0; i < e; ++i) r = series_multiply(r, base, p);
    return r;
  };

  AnnulusSeries R = AnnulusSeries::constant(weight.log_scale, bidegree, inner_radius);
  for (const auto& t : weight.terms) {
    if (t.p < 0 || t.q < 0) throw Error(ErrorKind::config, "log-polynomial exponents must be nonnegative");
    AnnulusSeries term = series_multiply(power(psi, t.p), power(psib, t.q), p) * t.coeff;
    R += term + term.conjugate();
  }
  auto fitted = R.resized(bidegree);
  detail::check_truncation(fitted.discarded, policy, "pullback_log_polynomial");

  const LogPolynomialWeight w = weight;
  WeightSpec spec{[w](cplx z) { return std::exp(w.log_value(z)); }, std::move(fitted.value), 0.0, 0.0};
  auto log_omega = [w](cplx z) { return w.log_value(z); };
  spec.fit_residual = detail::validation_residual(map, log_omega, spec.log_pullback, spec.floor, spec.omega);
  if (!(spec.floor >= opts.positivity_floor))
    throw Error(ErrorKind::positivity, "weight drops below the positivity floor near the boundary");
  if (!(spec.fit_residual <= opts.residual_tol))
    throw Error(ErrorKind::weight_not_resolvable, "pullback residual " + std::to_string(spec.fit_residual));
  return spec;
}

// ---------------------------------------------------------------------------
// Szego data

struct SzegoData {
  CircleSeries V_ext;       // V o psi, exterior support
  double V_inf = 0.0;       // V at infinity (real)
  AnnulusSeries Omega;      // modified weight, equal to 1 on the circle
  AnnulusSeries Omega_inv;  // exp(-U)
  AnnulusSeries U;          // log Omega

  int bidegree() const { return Omega.bidegree(); }
  double inner_radius() const { return Omega.inner_radius(); }
};

/// V o psi = (1/2) H[-R|_T]; Omega = exp(2 Re V o psi + R), with 2 Re V extended into the
/// annulus through its pure z and pure zbar modes.
inline SzegoData szego(const WeightSpec& weight, const SeriesPolicy& policy = {}) {
  const AnnulusSeries& R = weight.log_pullback;
  const int M = std::max(R.bidegree(), policy.max_bidegree);
  const double rho = R.inner_radius();

  CircleSeries u = restrict_to_circle(R) * -1.0;
  CircleSeries V = herglotz(u) * 0.5;
  V = V.with_support(Support::exterior);

  AnnulusSeries twoReV(M, rho);
  double discarded = 0.0;
  twoReV.at(0, 0) = 2.0 * V[0].real();
  for (int k = 1; k <= V.bandwidth(); ++k) {
    if (k <= M) {
      twoReV.at(-k, 0) = V[-k];
      twoReV.at(0, -k) = std::conj(V[-k]);
    } else {
      discarded += 2.0 * std::abs(V[-k]);
    }
  }
  detail::check_truncation(discarded, policy, "szego harmonic extension");

  SzegoData out;
  out.V_inf = V[0].real();
  out.V_ext = std::move(V);
  out.U = twoReV + R.resized(M).value;
  out.Omega = series_exp(out.U, policy);
  out.Omega_inv = series_exp(-out.U, policy);
  return out;
}

/// Largest |Omega(e^{it}) - 1| over equally spaced samples.
inline double omega_circle_residual(const SzegoData& s, int samples = 256) {
  double worst = 0.0;
  for (int i = 0; i < samples; ++i)
    worst = std::max(worst, std::abs(s.Omega.eval(std::polar(1.0, 2.0 * std::numbers::pi * i / samples)) - 1.0));
  return worst;
}

}  // namespace ponp
