#include <catch_amalgamated.hpp>

#include "support.hpp"

using namespace ponp;
using testing_support::circle_point;

TEST_CASE("monomial products", "[series]") {
  const auto z = AnnulusSeries::monomial(1, 0, 1.0, 4, 0.7);
  const auto zb = AnnulusSeries::monomial(0, 1, 1.0, 4, 0.7);
  const auto p = series_multiply(z, zb);
  CHECK(p(1, 1) == cplx(1.0));
  CHECK(p.abs_sum() == Catch::Approx(1.0));
}

TEST_CASE("multiplying by one is the identity", "[series]") {
  auto gen = testing_support::rng();
  const auto b = testing_support::random_annulus(gen, 6, 0.7);
  const auto p = series_multiply(AnnulusSeries::constant(1.0, 6, 0.7), b);
  for (int m = -6; m <= 6; ++m)
    for (int n = -6; n <= 6; ++n) CHECK(std::abs(p(m, n) - b(m, n)) == 0.0);
}

TEST_CASE("products agree with pointwise evaluation", "[series]") {
  auto gen = testing_support::rng(7);
  SeriesPolicy policy;
  policy.max_bidegree = 16;
  const auto a = testing_support::random_annulus(gen, 8, 0.7);
  const auto b = testing_support::random_annulus(gen, 8, 0.7);
  const auto p = series_multiply(a, b, policy);
  double worst = 0.0;
  for (int i = 0; i < 32; ++i) {
    const cplx z = circle_point(i, 32, 1.05);
    worst = std::max(worst, std::abs(p.eval(z) - a.eval(z) * b.eval(z)));
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("truncation beyond the cap is reported", "[series]") {
  SeriesPolicy policy;
  policy.max_bidegree = 4;
  const auto z3 = AnnulusSeries::monomial(3, 0, 1.0, 4, 0.7);
  const auto t = multiply_truncated(z3, z3, policy);
  CHECK(t.discarded == Catch::Approx(1.0));
  CHECK_THROWS_AS(series_multiply(z3, z3, policy), Error);
  try {
    series_multiply(z3, z3, policy);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::truncation_overflow);
  }
}

TEST_CASE("exponential", "[series]") {
  SECTION("exp(0) = 1") {
    const auto e = series_exp(AnnulusSeries(6, 0.7));
    CHECK(std::abs(e(0, 0) - 1.0) <= 1e-15);
    CHECK(e.abs_sum() == Catch::Approx(1.0));
  }
  SECTION("Taylor coefficients of exp(alpha z)") {
    const double alpha = 0.3;
    const auto e = series_exp(AnnulusSeries::monomial(1, 0, alpha, 12, 0.7));
    double fact = 1.0;
    for (int k = 0; k <= 12; ++k) {
      if (k > 0) fact *= k;
      CHECK(std::abs(e(k, 0) - std::pow(alpha, k) / fact) <= 1e-15);
    }
  }
  SECTION("scalar-evaluation oracle") {
    AnnulusSeries a(16, 0.7);
    a.at(1, 0) = 0.2;
    a.at(0, 1) = 0.2;
    a.at(-1, 0) = -0.2;
    a.at(0, -1) = -0.2;
    const auto e = series_exp(a);
    double worst = 0.0;
    for (int i = 0; i < 16; ++i) {
      const cplx z = circle_point(i, 16);
      worst = std::max(worst, std::abs(e.eval(z) - std::exp(a.eval(z))));
    }
    CHECK(worst <= 1e-12);
  }
  SECTION("exp(a) exp(-a) = 1 on the circle") {
    const auto R = testing_support::disk_alpha_weight().log_pullback;
    const auto p = series_multiply(series_exp(R), series_exp(-R));
    const auto c = restrict_to_circle(p);
    CHECK(std::abs(c[0] - 1.0) <= 1e-10);
    double off = 0.0;
    for (int k = -c.bandwidth(); k <= c.bandwidth(); ++k)
      if (k != 0) off = std::max(off, std::abs(c[k]));
    CHECK(off <= 1e-10);
  }
  SECTION("norm bound") {
    SeriesPolicy policy;
    policy.exp_norm_bound = 1.0;
    CHECK_THROWS_AS(series_exp(AnnulusSeries::constant(5.0, 2, 0.7), policy), Error);
  }
}

TEST_CASE("differential operators", "[series]") {
  const auto a = AnnulusSeries::monomial(2, 1, 1.0, 4, 0.7);
  CHECK(wirtinger_z(a)(2, 1) == cplx(2.0));
  CHECK(wirtinger_zbar(a)(2, 1) == cplx(1.0));
  CHECK(radial(AnnulusSeries::constant(3.0, 4, 0.7)).max_abs() == 0.0);
  CHECK(radial(AnnulusSeries::monomial(1, 1, 1.0, 4, 0.7))(1, 1) == cplx(2.0));

  // r d/dr agrees with a centered finite difference.
  auto gen = testing_support::rng(3);
  const auto b = testing_support::random_annulus(gen, 5, 0.7);
  const cplx z = std::polar(1.1, 0.4);
  const double h = 1e-5;
  const cplx fd = (b.eval(z * (1 + h)) - b.eval(z * (1 - h))) / (2 * h);
  CHECK(std::abs(radial(b).eval(z) - fd) <= 1e-7);

  const std::vector<double> poly{1.0, -0.5};  // 1 - x/2
  const auto q = radial_polynomial(b, poly);
  const auto expected = b - radial(b) * 0.5;
  CHECK(std::abs(q.eval(z) - expected.eval(z)) <= 1e-12);
}

TEST_CASE("restriction to the circle", "[series]") {
  const auto zz = AnnulusSeries::monomial(1, 1, 1.0, 3, 0.7);
  const auto c = restrict_to_circle(zz);
  CHECK(c[0] == cplx(1.0));
  CHECK(c.max_abs() == 1.0);
  CHECK(restrict_to_circle(AnnulusSeries::monomial(2, 1, 1.0, 3, 0.7))[1] == cplx(1.0));

  auto gen = testing_support::rng(11);
  const auto a = testing_support::random_annulus(gen, 6, 0.7);
  const auto r = restrict_to_circle(a);
  double worst = 0.0;
  for (int i = 0; i < 64; ++i) {
    const double t = 2.0 * std::numbers::pi * i / 64;
    worst = std::max(worst, std::abs(a.eval(std::polar(1.0, t)) - r.eval_angle(t)));
  }
  CHECK(worst <= 1e-12);
  CHECK_THROWS_AS(restrict_to_circle(a, 4), Error);
}

TEST_CASE("restriction commutes with products", "[series][property]") {
  auto gen = testing_support::rng(99);
  SeriesPolicy policy;
  policy.max_bidegree = 12;
  for (int trial = 0; trial < 5; ++trial) {
    const auto a = testing_support::random_annulus(gen, 5, 0.7);
    const auto b = testing_support::random_annulus(gen, 5, 0.7);
    const auto lhs = restrict_to_circle(series_multiply(a, b, policy));
    const auto rhs = circle_multiply(restrict_to_circle(a), restrict_to_circle(b));
    double worst = 0.0;
    for (int k = -rhs.bandwidth(); k <= rhs.bandwidth(); ++k) worst = std::max(worst, std::abs(lhs[k] - rhs[k]));
    CHECK(worst <= 1e-12);
  }
}

TEST_CASE("Hardy projection", "[series]") {
  CircleSeries c(3);
  c.at(0) = 3.0;
  c.at(-1) = 2.0;
  c.at(1) = 5.0;
  const auto p = hardy_project(c);
  CHECK(p.support() == Support::exterior_vanishing);
  CHECK(p[-1] == cplx(2.0));
  CHECK(p[0] == cplx(0.0));
  CHECK(p[1] == cplx(0.0));

  const auto pp = hardy_project(p);
  for (int k = -3; k <= 3; ++k) CHECK(pp[k] == p[k]);

  auto gen = testing_support::rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const auto u = testing_support::random_real_circle(gen, 8);
    CHECK(hardy_project(u).l2_norm() <= u.l2_norm());
  }

  CircleSeries x(2);
  x.at(1) = testing_support::kAlpha;
  x.at(-1) = testing_support::kAlpha;
  const auto x1 = hardy_project(x);
  CHECK(x1[-1] == cplx(testing_support::kAlpha));
  CHECK(x1[1] == cplx(0.0));
}

TEST_CASE("support tags are enforced", "[series]") {
  CircleSeries e(3, Support::exterior_vanishing);
  CHECK_THROWS_AS(e.at(0), Error);
  CircleSeries g(3);
  g.at(2) = 1.0;
  CHECK_THROWS_AS(g.with_support(Support::exterior), Error);
  CHECK(g.with_support(Support::interior).support() == Support::interior);
}

TEST_CASE("Herglotz transform", "[series]") {
  SECTION("constant") {
    const auto h = herglotz(CircleSeries::constant(1.0, 2));
    CHECK(h[0] == cplx(1.0));
    CHECK(h.max_abs() == 1.0);
  }
  SECTION("cosine") {
    CircleSeries u(1);
    u.at(1) = 0.5;
    u.at(-1) = 0.5;
    const auto h = herglotz(u);
    CHECK(std::abs(h[-1] - 1.0) <= 1e-15);
    for (int i = 0; i < 8; ++i) {
      const double t = 0.3 + i;
      CHECK(std::abs(h.eval_angle(t).real() - std::cos(t)) <= 1e-14);
    }
  }
  SECTION("contour-quadrature oracle at z = 2") {
    auto gen = testing_support::rng(17);
    const auto u = testing_support::random_real_circle(gen, 16);
    const cplx z = 2.0;
    cplx q{};
    constexpr int n = 512;
    for (int i = 0; i < n; ++i) {
      const double t = 2.0 * std::numbers::pi * i / n;
      const cplx zeta = std::polar(1.0, t);
      q += (z + zeta) / (z - zeta) * u.eval_angle(t).real();
    }
    q /= static_cast<double>(n);
    CHECK(std::abs(herglotz(u).eval(z) - q) <= 1e-10);
  }
  SECTION("real part reproduces the input") {
    auto gen = testing_support::rng(23);
    const auto u = testing_support::random_real_circle(gen, 10);
    const auto h = herglotz(u);
    for (int i = 0; i < 40; ++i) {
      const double t = 0.1 * i;
      CHECK(std::abs(h.eval_angle(t).real() - u.eval_angle(t).real()) <= 1e-13);
    }
  }
  SECTION("non-real input is rejected") {
    CircleSeries u(1);
    u.at(1) = cplx(0.0, 1.0);
    CHECK_THROWS_AS(herglotz(u), Error);
  }
}

TEST_CASE("lifts", "[series]") {
  CircleSeries c(2);
  c.at(-2) = cplx(1.0, 2.0);
  c.at(1) = 3.0;
  const auto l = lift(c, 4, 0.7);
  const auto lb = conj_lift(c, 4, 0.7);
  const cplx z = std::polar(1.2, 0.7);
  CHECK(std::abs(l.eval(z) - c.eval(z)) <= 1e-14);
  CHECK(std::abs(lb.eval(z) - std::conj(c.eval(z))) <= 1e-14);
  CHECK_THROWS_AS(lift(c, 1, 0.7), Error);
}
