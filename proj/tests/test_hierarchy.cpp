#include <catch_amalgamated.hpp>

#include "support.hpp"

using namespace ponp;
using testing_support::kAlpha;

namespace {

double max_diff(const CircleSeries& a, const CircleSeries& b) {
  const int K = std::max(a.bandwidth(), b.bandwidth());
  double d = 0.0;
  for (int k = -K; k <= K; ++k) d = std::max(d, std::abs(a[k] - b[k]));
  return d;
}

}  // namespace

TEST_CASE("operator T", "[hierarchy]") {
  const auto unit = szego(testing_support::unit_weight(ExteriorMap::identity()));
  const auto disk = szego(testing_support::disk_alpha_weight());

  SECTION("identity on constants when Omega = 1") {
    const auto t = op_T(AnnulusSeries::constant(1.0, 8, 0.7), unit);
    CHECK(std::abs(t(0, 0) - 1.0) <= 1e-15);
    CHECK(t.abs_sum() == Catch::Approx(1.0));
    const auto f = AnnulusSeries::monomial(-2, 1, 1.0, 8, 0.7);
    CHECK(std::abs(op_T(f, unit)(-2, 1) - (-1.0)) <= 1e-15);
  }
  SECTION("disk weight: T1 = 1 + alpha z + alpha/z") {
    const auto t = op_T(AnnulusSeries::constant(1.0, disk.bidegree(), disk.inner_radius()), disk);
    for (int i = 0; i < 12; ++i) {
      const cplx z = std::polar(0.85 + 0.05 * i, 0.5 * i);
      CHECK(std::abs(t.eval(z) - (1.0 + kAlpha * z + kAlpha / z)) <= 1e-12);
    }
  }
  SECTION("linearity") {
    auto gen = testing_support::rng(31);
    const auto f = testing_support::random_annulus(gen, 4, disk.inner_radius());
    const auto g = testing_support::random_annulus(gen, 4, disk.inner_radius());
    const auto lhs = op_T(f + g * 2.0, disk);
    const auto rhs = op_T(f, disk) + op_T(g, disk) * 2.0;
    CHECK((lhs - rhs).max_abs() <= 1e-12);
  }
}

TEST_CASE("operator Q", "[hierarchy]") {
  CHECK(op_Q(AnnulusSeries::constant(1.0, 3, 0.7)).max_abs() == 0.0);
  CHECK(op_Q(AnnulusSeries::monomial(2, 1, 1.0, 3, 0.7)).max_abs() == 0.0);
  const auto q = op_Q(AnnulusSeries::monomial(1, 2, 1.0, 3, 0.7));
  CHECK(q[-1] == cplx(1.0));
  CHECK(q.support() == Support::exterior_vanishing);
}

TEST_CASE("hierarchy for the unweighted case vanishes", "[hierarchy]") {
  for (const auto& map : {ExteriorMap::identity(), ExteriorMap::ellipse(2.0, 1.0)}) {
    const auto s = szego(testing_support::unit_weight(map, 24, 0.75));
    const auto h = hierarchy_solve(s, 4);
    REQUIRE(h.X.size() == 5);
    CHECK(h.X[0][0] == cplx(1.0));
    for (int j = 1; j <= 4; ++j) CHECK(h.X[static_cast<std::size_t>(j)].max_abs() <= 1e-12);
    const auto alt = hierarchy_solve_alt(s, 4);
    for (int j = 1; j <= 4; ++j) CHECK(alt.X[static_cast<std::size_t>(j)].max_abs() <= 1e-12);
    for (int p = 1; p <= 4; ++p) CHECK(hierarchy_residual(h, s, p) == 0.0);
    const auto S = neumann_partial_sum(h, 7.0, 4);
    CHECK(std::abs(S[0] - 1.0) <= 1e-12);
  }
}

TEST_CASE("disk weight hierarchy", "[hierarchy]") {
  const auto s = szego(testing_support::disk_alpha_weight());
  const auto h = hierarchy_solve(s, 4);

  SECTION("first coefficient") {
    CHECK(std::abs(h.X[1][-1] - kAlpha) <= 1e-14);
    CircleSeries expected(h.X[1].bandwidth());
    expected.at(-1) = kAlpha;
    CHECK(max_diff(h.X[1], expected) <= 1e-14);
    // X_1 = P R (z d/dz log Omega)
    const auto via_log = hardy_project(restrict_to_circle(wirtinger_z(s.U)));
    CHECK(max_diff(h.X[1], via_log) <= 1e-14);
  }
  SECTION("support and alternate recursion") {
    const auto alt = hierarchy_solve_alt(s, 4);
    for (int j = 1; j <= 4; ++j) {
      const auto& X = h.X[static_cast<std::size_t>(j)];
      CHECK(X.support_consistent());
      for (int k = 0; k <= X.bandwidth(); ++k) CHECK(X[k] == cplx(0.0));
      CHECK(max_diff(X, alt.X[static_cast<std::size_t>(j)]) <= 1e-12);
    }
  }
  SECTION("residuals") {
    for (int p = 1; p <= 4; ++p) CHECK(hierarchy_residual(h, s, p) <= 1e-11);
    auto corrupted = h;
    corrupted.X[2].at(-1) += 1e-3;
    CHECK(hierarchy_residual(corrupted, s, 2) > 1e-4);
  }
  SECTION("partial Neumann sums") {
    CHECK(max_diff(neumann_partial_sum(h, 10.0, 0), CircleSeries::constant(1.0, 0)) == 0.0);
    const auto S = neumann_partial_sum(h, 10.0, 1);
    CHECK(std::abs(S[0] - 1.0) <= 1e-15);
    CHECK(std::abs(S[-1] - kAlpha / 10.0) <= 1e-15);
    CHECK_THROWS_AS(neumann_partial_sum(h, 0.5, 1), Error);
    CHECK_THROWS_AS(neumann_partial_sum(h, 10.0, 5), Error);
  }
}

TEST_CASE("ellipse weight hierarchy", "[hierarchy]") {
  const auto s = szego(testing_support::ellipse_exp_weight());
  const auto h = hierarchy_solve(s, 3);
  const auto alt = hierarchy_solve_alt(s, 3);
  for (int j = 1; j <= 3; ++j) CHECK(max_diff(h.X[static_cast<std::size_t>(j)], alt.X[static_cast<std::size_t>(j)]) <= 1e-10);
  for (int p = 1; p <= 3; ++p) CHECK(hierarchy_residual(h, s, p) <= 1e-9);
}

TEST_CASE("hierarchy invariants", "[hierarchy][property]") {
  const auto map = ExteriorMap::ellipse(2.0, 1.0);
  const cplx alpha(0.2, 0.1);

  SECTION("constant rescaling of the weight") {
    const auto a = hierarchy_solve(szego(pullback_log_polynomial(map, LogPolynomialWeight::exp_re_linear(alpha), 24, 0.75)), 3);
    const auto b =
        hierarchy_solve(szego(pullback_log_polynomial(map, LogPolynomialWeight::exp_re_linear(alpha, 7.0), 24, 0.75)), 3);
    for (int j = 1; j <= 3; ++j) CHECK(max_diff(a.X[static_cast<std::size_t>(j)], b.X[static_cast<std::size_t>(j)]) <= 1e-12);
  }
  SECTION("conjugate reflection") {
    // w(zbar) = exp(2 Re(conj(alpha) z)) on a domain symmetric under conjugation.
    const auto a = hierarchy_solve(szego(pullback_log_polynomial(map, LogPolynomialWeight::exp_re_linear(alpha), 24, 0.75)), 3);
    const auto b = hierarchy_solve(
        szego(pullback_log_polynomial(map, LogPolynomialWeight::exp_re_linear(std::conj(alpha)), 24, 0.75)), 3);
    for (int j = 1; j <= 3; ++j) {
      const auto& X = a.X[static_cast<std::size_t>(j)];
      const auto& Y = b.X[static_cast<std::size_t>(j)];
      for (int k = -X.bandwidth(); k <= X.bandwidth(); ++k) CHECK(std::abs(Y[k] - std::conj(X[k])) <= 1e-12);
    }
  }
  SECTION("all shipped weights have small residuals") {
    const std::vector<WeightSpec> weights{
        testing_support::disk_alpha_weight(), testing_support::ellipse_exp_weight(),
        testing_support::unit_weight(map, 24, 0.75),
        pullback_log_polynomial(ExteriorMap::perturbed_disk(0.1, 3), LogPolynomialWeight::exp_re_linear(0.25), 24, 0.7)};
    for (const auto& w : weights) {
      const auto s = szego(w);
      const auto h = hierarchy_solve(s, 4);
      const auto alt = hierarchy_solve_alt(s, 4);
      for (int p = 1; p <= 4; ++p) {
        CHECK(hierarchy_residual(h, s, p) <= 1e-9);
        CHECK(max_diff(h.X[static_cast<std::size_t>(p)], alt.X[static_cast<std::size_t>(p)]) <= 1e-10);
      }
    }
  }
}
