#pragma once

// Truncated bi-Laurent series on an annulus around the unit circle and
// Laurent series on the circle itself.
//
// An AnnulusSeries stores c_{mn} for |m|, |n| <= M and represents
//   f(z) = sum c_{mn} z^m zbar^n,     rho < |z| < 1/rho.
// A CircleSeries stores c_k for |k| <= K and represents sum c_k z^k on |z| = 1
// (or the holomorphic extension of that sum off the circle).

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "ponp/error.hpp"

namespace ponp {

using cplx = std::complex<double>;

struct SeriesPolicy {
  int max_bidegree = 32;          // cap on the bidegree of products
  double truncation_tol = 1e-13;  // discarded mass above this times max(1, operand l1 mass) is an error
  double exp_norm_bound = 64.0;   // largest l1 norm accepted by series_exp
  double negligible_product = 1e-22;  // pair products below this are dropped (and counted as discarded)
};

template <typename T>
struct Truncated {
  T value;
  double discarded = 0.0;
};

class AnnulusSeries {
 public:
  AnnulusSeries() : AnnulusSeries(0, 0.5) {}

  AnnulusSeries(int bidegree, double inner_radius)
      : M_(bidegree), rho_(inner_radius), c_(static_cast<std::size_t>((2 * bidegree + 1) * (2 * bidegree + 1))) {
    if (bidegree < 0) throw Error(ErrorKind::domain, "negative bidegree");
    if (!(inner_radius > 0.0 && inner_radius < 1.0))
      throw Error(ErrorKind::domain, "annulus inner radius must lie in (0,1)");
  }

  static AnnulusSeries constant(cplx value, int bidegree, double inner_radius) {
    AnnulusSeries s(bidegree, inner_radius);
    s.at(0, 0) = value;
    return s;
  }

  static AnnulusSeries monomial(int m, int n, cplx value, int bidegree, double inner_radius) {
    AnnulusSeries s(bidegree, inner_radius);
    s.at(m, n) = value;
    return s;
  }

  int bidegree() const noexcept { return M_; }
  double inner_radius() const noexcept { return rho_; }
  int width() const noexcept { return 2 * M_ + 1; }

  bool in_range(int m, int n) const noexcept { return std::abs(m) <= M_ && std::abs(n) <= M_; }

  cplx operator()(int m, int n) const noexcept { return in_range(m, n) ? c_[index(m, n)] : cplx{}; }

  cplx& at(int m, int n) {
    if (!in_range(m, n))
      throw Error(ErrorKind::domain, "exponent (" + std::to_string(m) + "," + std::to_string(n) +
                                         ") outside bidegree " + std::to_string(M_));
    return c_[index(m, n)];
  }

  std::span<const cplx> coefficients() const noexcept { return c_; }

  cplx eval(cplx z) const {
    const cplx zb = std::conj(z);
    std::vector<cplx> zp(static_cast<std::size_t>(width())), zbp(static_cast<std::size_t>(width()));
    powers(z, zp);
    powers(zb, zbp);
    cplx acc{};
    for (int m = -M_; m <= M_; ++m) {
      cplx row{};
      for (int n = -M_; n <= M_; ++n) row += c_[index(m, n)] * zbp[static_cast<std::size_t>(n + M_)];
      acc += row * zp[static_cast<std::size_t>(m + M_)];
    }
    return acc;
  }

  double abs_sum() const {
    double s = 0.0;
    for (const auto& v : c_) s += std::abs(v);
    return s;
  }

  double max_abs() const {
    double s = 0.0;
    for (const auto& v : c_) s = std::max(s, std::abs(v));
    return s;
  }

  /// Complex conjugate of the represented function: c'_{mn} = conj(c_{nm}).
  AnnulusSeries conjugate() const {
    AnnulusSeries out(M_, rho_);
    for (int m = -M_; m <= M_; ++m)
      for (int n = -M_; n <= M_; ++n) out.c_[index(m, n)] = std::conj(c_[index(n, m)]);
    return out;
  }

  /// True when the represented function is real: c_{nm} = conj(c_{mn}).
  bool is_real_valued(double tol = 1e-12) const {
    for (int m = -M_; m <= M_; ++m)
      for (int n = m; n <= M_; ++n)
        if (std::abs(c_[index(n, m)] - std::conj(c_[index(m, n)])) > tol) return false;
    return true;
  }

  /// Copy into a grid of a different bidegree. Returns the discarded absolute mass.
  Truncated<AnnulusSeries> resized(int bidegree) const {
    Truncated<AnnulusSeries> out{AnnulusSeries(bidegree, rho_), 0.0};
    for (int m = -M_; m <= M_; ++m)
      for (int n = -M_; n <= M_; ++n) {
        const cplx v = c_[index(m, n)];
        if (out.value.in_range(m, n))
          out.value.c_[out.value.index(m, n)] = v;
        else
          out.discarded += std::abs(v);
      }
    return out;
  }

  AnnulusSeries& operator+=(const AnnulusSeries& other) {
    combine(other, 1.0);
    return *this;
  }
  AnnulusSeries& operator-=(const AnnulusSeries& other) {
    combine(other, -1.0);
    return *this;
  }
  AnnulusSeries& operator*=(cplx s) {
    for (auto& v : c_) v *= s;
    return *this;
  }

  friend AnnulusSeries operator+(AnnulusSeries a, const AnnulusSeries& b) { return a += b; }
  friend AnnulusSeries operator-(AnnulusSeries a, const AnnulusSeries& b) { return a -= b; }
  friend AnnulusSeries operator*(AnnulusSeries a, cplx s) { return a *= s; }
  friend AnnulusSeries operator*(cplx s, AnnulusSeries a) { return a *= s; }
  friend AnnulusSeries operator-(AnnulusSeries a) { return a *= -1.0; }

  std::size_t index(int m, int n) const noexcept {
    return static_cast<std::size_t>((m + M_) * width() + (n + M_));
  }

 private:
  void powers(cplx z, std::vector<cplx>& out) const {
    out[static_cast<std::size_t>(M_)] = 1.0;
    if (M_ == 0) return;
    const cplx zi = 1.0 / z;
    for (int k = 1; k <= M_; ++k) {
      out[static_cast<std::size_t>(M_ + k)] = out[static_cast<std::size_t>(M_ + k - 1)] * z;
      out[static_cast<std::size_t>(M_ - k)] = out[static_cast<std::size_t>(M_ - k + 1)] * zi;
    }
  }

  void combine(const AnnulusSeries& other, double sign) {
    if (other.M_ > M_) *this = resized(other.M_).value;
    for (int m = -other.M_; m <= other.M_; ++m)
      for (int n = -other.M_; n <= other.M_; ++n) c_[index(m, n)] += sign * other.c_[other.index(m, n)];
  }

  int M_;
  double rho_;
  std::vector<cplx> c_;
};

enum class Support {
  general,
  exterior,            // modes k <= 0
  exterior_vanishing,  // modes k <= -1 (H^2_{-,0})
  interior,            // modes k >= 0
};

inline bool support_allows(Support s, int k) {
  switch (s) {
    case Support::general: return true;
    case Support::exterior: return k <= 0;
    case Support::exterior_vanishing: return k <= -1;
    case Support::interior: return k >= 0;
  }
  return true;
}

class CircleSeries {
 public:
  CircleSeries() : CircleSeries(0) {}

  explicit CircleSeries(int bandwidth, Support support = Support::general)
      : K_(bandwidth), support_(support), c_(static_cast<std::size_t>(2 * bandwidth + 1)) {
    if (bandwidth < 0) throw Error(ErrorKind::domain, "negative bandwidth");
  }

  static CircleSeries constant(cplx value, int bandwidth) {
    CircleSeries s(bandwidth);
    s.at(0) = value;
    return s;
  }

  int bandwidth() const noexcept { return K_; }
  Support support() const noexcept { return support_; }
  bool in_range(int k) const noexcept { return std::abs(k) <= K_; }

  cplx operator[](int k) const noexcept { return in_range(k) ? c_[static_cast<std::size_t>(k + K_)] : cplx{}; }

  cplx& at(int k) {
    if (!in_range(k)) throw Error(ErrorKind::domain, "mode " + std::to_string(k) + " outside bandwidth");
    if (!support_allows(support_, k))
      throw Error(ErrorKind::domain, "mode " + std::to_string(k) + " violates the support tag");
    return c_[static_cast<std::size_t>(k + K_)];
  }

  std::span<const cplx> coefficients() const noexcept { return c_; }

  /// Retag; every coefficient outside the new support must be exactly zero.
  CircleSeries with_support(Support s) const {
    for (int k = -K_; k <= K_; ++k)
      if (!support_allows(s, k) && (*this)[k] != cplx{})
        throw Error(ErrorKind::domain, "support tag inconsistent with nonzero mode " + std::to_string(k));
    CircleSeries out = *this;
    out.support_ = s;
    return out;
  }

  bool support_consistent() const {
    for (int k = -K_; k <= K_; ++k)
      if (!support_allows(support_, k) && (*this)[k] != cplx{}) return false;
    return true;
  }

  /// Laurent sum at any nonzero point.
  cplx eval(cplx z) const {
    // Horner in z for k >= 0 and in 1/z for k < 0.
    cplx pos{}, neg{};
    for (int k = K_; k >= 0; --k) pos = pos * z + (*this)[k];
    if (K_ > 0) {
      const cplx zi = 1.0 / z;
      for (int k = -K_; k <= -1; ++k) neg = neg * zi + (*this)[k];
      neg *= zi;
    }
    return pos + neg;
  }

  cplx eval_angle(double t) const { return eval(std::polar(1.0, t)); }

  double l2_norm() const {
    double s = 0.0;
    for (const auto& v : c_) s += std::norm(v);
    return std::sqrt(s);
  }

  double max_abs() const {
    double s = 0.0;
    for (const auto& v : c_) s = std::max(s, std::abs(v));
    return s;
  }

  double abs_sum() const {
    double s = 0.0;
    for (const auto& v : c_) s += std::abs(v);
    return s;
  }

  CircleSeries& operator+=(const CircleSeries& o) {
    combine(o, 1.0);
    return *this;
  }
  CircleSeries& operator-=(const CircleSeries& o) {
    combine(o, -1.0);
    return *this;
  }
  CircleSeries& operator*=(cplx s) {
    for (auto& v : c_) v *= s;
    return *this;
  }
  friend CircleSeries operator+(CircleSeries a, const CircleSeries& b) { return a += b; }
  friend CircleSeries operator-(CircleSeries a, const CircleSeries& b) { return a -= b; }
  friend CircleSeries operator*(CircleSeries a, cplx s) { return a *= s; }
  friend CircleSeries operator*(cplx s, CircleSeries a) { return a *= s; }

 private:
  void combine(const CircleSeries& o, double sign) {
    if (o.K_ > K_) {
      CircleSeries bigger(o.K_, support_);
      for (int k = -K_; k <= K_; ++k) bigger.c_[static_cast<std::size_t>(k + o.K_)] = (*this)[k];
      *this = bigger;
    }
    if (support_ != o.support_) support_ = join(support_, o.support_);
    for (int k = -o.K_; k <= o.K_; ++k) c_[static_cast<std::size_t>(k + K_)] += sign * o[k];
  }

  static Support join(Support a, Support b) {
    if (a == b) return a;
    auto ext = [](Support s) { return s == Support::exterior || s == Support::exterior_vanishing; };
    if (ext(a) && ext(b)) return Support::exterior;
    return Support::general;
  }

  int K_;
  Support support_;
  std::vector<cplx> c_;
};

// ---------------------------------------------------------------------------
// Products and exponentials

namespace detail {

inline void check_same_annulus(const AnnulusSeries& a, const AnnulusSeries& b) {
  if (std::abs(a.inner_radius() - b.inner_radius()) > 1e-15)
    throw Error(ErrorKind::domain, "series live on different annuli");
}

/// The tolerance is relative to the l1 mass of the operands, floored at 1.
inline void check_truncation(double discarded, const SeriesPolicy& policy, const char* where, double scale = 1.0) {
  if (discarded > policy.truncation_tol * std::max(1.0, scale)) {
    char buf[96];
    std::snprintf(buf, sizeof buf, "%.3e (operand mass %.3e)", discarded, scale);
    throw Error(ErrorKind::truncation_overflow,
                std::string(where) + " discarded mass " + buf + " above tolerance; raise the bidegree cap");
  }
}

}  // namespace detail

/// Product with the result bidegree min(Ma + Mb, cap); reports discarded mass
/// as the sum of |a_i b_j| over pairs landing outside the grid (an upper bound).
inline Truncated<AnnulusSeries> multiply_truncated(const AnnulusSeries& a, const AnnulusSeries& b,
                                                   const SeriesPolicy& policy = {}) {
  detail::check_same_annulus(a, b);
  const int Ma = a.bidegree(), Mb = b.bidegree();
  const int Mo = std::min(Ma + Mb, std::max(policy.max_bidegree, std::max(Ma, Mb)));
  Truncated<AnnulusSeries> out{AnnulusSeries(Mo, a.inner_radius()), 0.0};

  // Row-wise prefix sums of |b| to account for discarded pairs in O(1).
  const int wb = b.width();
  std::vector<double> prefix(static_cast<std::size_t>(wb * (wb + 1)), 0.0);
  for (int r = 0; r < wb; ++r)
    for (int q = 0; q < wb; ++q)
      prefix[static_cast<std::size_t>(r * (wb + 1) + q + 1)] =
          prefix[static_cast<std::size_t>(r * (wb + 1) + q)] + std::abs(b(r - Mb, q - Mb));
  auto row_sum = [&](int m2, int n_lo, int n_hi) {  // inclusive exponents
    if (n_lo > n_hi) return 0.0;
    const auto base = static_cast<std::size_t>((m2 + Mb) * (wb + 1));
    return prefix[base + static_cast<std::size_t>(n_hi + Mb + 1)] - prefix[base + static_cast<std::size_t>(n_lo + Mb)];
  };

  // Bounding box of b's nonzero rows.
  int b_lo = Mb + 1, b_hi = -Mb - 1;
  for (int m = -Mb; m <= Mb; ++m)
    if (row_sum(m, -Mb, Mb) > 0.0) {
      b_lo = std::min(b_lo, m);
      b_hi = std::max(b_hi, m);
    }
  if (b_lo > b_hi) return out;

  double b_total = 0.0;
  for (int m = b_lo; m <= b_hi; ++m) b_total += row_sum(m, -Mb, Mb);

  std::span<const cplx> bc = b.coefficients();
  for (int m1 = -Ma; m1 <= Ma; ++m1)
    for (int n1 = -Ma; n1 <= Ma; ++n1) {
      const cplx av = a(m1, n1);
      if (av == cplx{}) continue;
      const double aa = std::abs(av);
      if (aa * b_total <= policy.negligible_product) {
        out.discarded += aa * b_total;
        continue;
      }
      for (int m2 = b_lo; m2 <= b_hi; ++m2) {
        const int m = m1 + m2;
        if (std::abs(m) > Mo) {
          out.discarded += aa * row_sum(m2, -Mb, Mb);
          continue;
        }
        const int n2_lo = std::max(-Mb, -Mo - n1), n2_hi = std::min(Mb, Mo - n1);
        if (n2_lo > n2_hi) {
          out.discarded += aa * row_sum(m2, -Mb, Mb);
          continue;
        }
        out.discarded += aa * (row_sum(m2, -Mb, n2_lo - 1) + row_sum(m2, n2_hi + 1, Mb));
        const cplx* brow = &bc[b.index(m2, 0)];
        cplx* orow = &out.value.at(m, 0);
        for (int n2 = n2_lo; n2 <= n2_hi; ++n2) orow[n1 + n2] += av * brow[n2];
      }
    }
  return out;
}

inline AnnulusSeries series_multiply(const AnnulusSeries& a, const AnnulusSeries& b, const SeriesPolicy& policy = {}) {
  auto r = multiply_truncated(a, b, policy);
  detail::check_truncation(r.discarded, policy, "series_multiply", a.abs_sum() * b.abs_sum());
  return std::move(r.value);
}

/// exp by scaling and squaring with an 18-term Taylor core.
inline Truncated<AnnulusSeries> exp_truncated(const AnnulusSeries& a, const SeriesPolicy& policy = {}) {
  const double norm = a.abs_sum();
  if (norm > policy.exp_norm_bound)
    throw Error(ErrorKind::convergence,
                "series_exp: exponent l1 norm " + std::to_string(norm) +
                    " exceeds the bound; use an inner radius closer to 1 or a smaller weight amplitude");
  int squarings = 0;
  while (std::ldexp(norm, -squarings) > 0.5) ++squarings;
  const AnnulusSeries b = a * std::ldexp(1.0, -squarings);
  const int cap = std::max(policy.max_bidegree, a.bidegree());
  SeriesPolicy inner = policy;
  inner.max_bidegree = cap;

  double discarded = 0.0;
  AnnulusSeries r = AnnulusSeries::constant(1.0, 0, a.inner_radius());
  constexpr int kTaylorTerms = 18;
  for (int k = kTaylorTerms; k >= 1; --k) {
    auto prod = multiply_truncated(b, r, inner);
    discarded += prod.discarded;
    r = std::move(prod.value) * (1.0 / k);
    r.at(0, 0) += 1.0;
  }
  for (int s = 0; s < squarings; ++s) {
    // Each squaring also doubles the error already discarded.
    discarded *= 2.0;
    auto sq = multiply_truncated(r, r, inner);
    discarded += sq.discarded;
    r = std::move(sq.value);
  }
  if (r.bidegree() < cap) r = r.resized(cap).value;
  return {std::move(r), discarded};
}

inline AnnulusSeries series_exp(const AnnulusSeries& a, const SeriesPolicy& policy = {}) {
  auto r = exp_truncated(a, policy);
  detail::check_truncation(r.discarded, policy, "series_exp");
  return std::move(r.value);
}

// ---------------------------------------------------------------------------
// Differential operators. z d/dz, zbar d/dzbar and r d/dr on monomials.

inline AnnulusSeries wirtinger_z(AnnulusSeries a) {
  const int M = a.bidegree();
  for (int m = -M; m <= M; ++m)
    for (int n = -M; n <= M; ++n) a.at(m, n) *= static_cast<double>(m);
  return a;
}

inline AnnulusSeries wirtinger_zbar(AnnulusSeries a) {
  const int M = a.bidegree();
  for (int m = -M; m <= M; ++m)
    for (int n = -M; n <= M; ++n) a.at(m, n) *= static_cast<double>(n);
  return a;
}

inline AnnulusSeries radial(AnnulusSeries a) {
  const int M = a.bidegree();
  for (int m = -M; m <= M; ++m)
    for (int n = -M; n <= M; ++n) a.at(m, n) *= static_cast<double>(m + n);
  return a;
}

/// p(r d/dr) for a polynomial p given by its coefficients (lowest degree first).
inline AnnulusSeries radial_polynomial(AnnulusSeries a, std::span<const double> poly) {
  const int M = a.bidegree();
  for (int m = -M; m <= M; ++m)
    for (int n = -M; n <= M; ++n) {
      const double e = m + n;
      double v = 0.0;
      for (std::size_t i = poly.size(); i-- > 0;) v = v * e + poly[i];
      a.at(m, n) *= v;
    }
  return a;
}

// ---------------------------------------------------------------------------
// Circle operations

/// Substitute zbar = 1/z: mode k collects c_{mn} with m - n = k.
inline CircleSeries restrict_to_circle(const AnnulusSeries& a, int bandwidth = -1) {
  const int M = a.bidegree();
  if (bandwidth < 0) bandwidth = 2 * M;
  if (bandwidth < 2 * M) throw Error(ErrorKind::domain, "restrict_to_circle needs bandwidth >= 2M");
  CircleSeries out(bandwidth);
  for (int m = -M; m <= M; ++m)
    for (int n = -M; n <= M; ++n) {
      const cplx v = a(m, n);
      if (v != cplx{}) out.at(m - n) += v;
    }
  return out;
}

/// Orthogonal projection onto H^2_{-,0}: keep modes k <= -1.
inline CircleSeries hardy_project(const CircleSeries& c) {
  CircleSeries out(c.bandwidth(), Support::exterior_vanishing);
  for (int k = -c.bandwidth(); k <= -1; ++k) out.at(k) = c[k];
  return out;
}

inline bool is_real_on_circle(const CircleSeries& u, double tol) {
  for (int k = 0; k <= u.bandwidth(); ++k)
    if (std::abs(u[-k] - std::conj(u[k])) > tol) return false;
  return true;
}

/// Herglotz transform on the exterior disk: H[u] = u_0 + 2 sum_{k>=1} u_{-k} z^{-k}.
inline CircleSeries herglotz(const CircleSeries& u, double real_tol = 1e-12) {
  if (!is_real_on_circle(u, real_tol * std::max(1.0, u.max_abs())))
    throw Error(ErrorKind::domain, "herglotz: input is not real-valued on the circle");
  CircleSeries out(u.bandwidth(), Support::exterior);
  out.at(0) = u[0].real();
  for (int k = 1; k <= u.bandwidth(); ++k) out.at(-k) = 2.0 * u[-k];
  return out;
}

/// Circle-level product (convolution of modes).
inline CircleSeries circle_multiply(const CircleSeries& a, const CircleSeries& b) {
  const int K = a.bandwidth() + b.bandwidth();
  CircleSeries out(K);
  for (int i = -a.bandwidth(); i <= a.bandwidth(); ++i) {
    const cplx av = a[i];
    if (av == cplx{}) continue;
    for (int j = -b.bandwidth(); j <= b.bandwidth(); ++j) out.at(i + j) += av * b[j];
  }
  return out;
}

/// Mean over the circle of a*b, i.e. the mode-0 coefficient of the product.
inline cplx circle_pairing(const CircleSeries& a, const CircleSeries& b) {
  cplx s{};
  const int K = std::min(a.bandwidth(), b.bandwidth());
  for (int k = -K; k <= K; ++k) s += a[k] * b[-k];
  return s;
}

/// Holomorphic extension sum c_k z^k as an annulus series.
inline Truncated<AnnulusSeries> lift_truncated(const CircleSeries& c, int bidegree, double inner_radius) {
  Truncated<AnnulusSeries> out{AnnulusSeries(bidegree, inner_radius), 0.0};
  for (int k = -c.bandwidth(); k <= c.bandwidth(); ++k) {
    if (std::abs(k) <= bidegree)
      out.value.at(k, 0) = c[k];
    else
      out.discarded += std::abs(c[k]);
  }
  return out;
}

inline AnnulusSeries lift(const CircleSeries& c, int bidegree, double inner_radius, const SeriesPolicy& policy = {}) {
  auto r = lift_truncated(c, bidegree, inner_radius);
  detail::check_truncation(r.discarded, policy, "lift", c.abs_sum());
  return std::move(r.value);
}

/// Conjugate of the holomorphic extension: sum conj(c_k) zbar^k.
inline AnnulusSeries conj_lift(const CircleSeries& c, int bidegree, double inner_radius,
                               const SeriesPolicy& policy = {}) {
  AnnulusSeries out(bidegree, inner_radius);
  double discarded = 0.0;
  for (int k = -c.bandwidth(); k <= c.bandwidth(); ++k) {
    if (std::abs(k) <= bidegree)
      out.at(0, k) = std::conj(c[k]);
    else
      discarded += std::abs(c[k]);
  }
  detail::check_truncation(discarded, policy, "conj_lift", c.abs_sum());
  return out;
}

}  // namespace ponp
