#include <catch_amalgamated.hpp>

#include "support.hpp"

using namespace ponp;

TEST_CASE("outer function", "[kernels]") {
  SECTION("identity map, w = 2, z = 3") {
    const auto p = make_offspectral_point(ExteriorMap::identity(), 2.0);
    const cplx v = outer_rho(ExteriorMap::identity(), p, 3.0);
    CHECK(std::abs(v - 3.0 * std::sqrt(3.0) / 5.0) <= 1e-15);
  }
  SECTION("boundary modulus, positivity and absence of zeros") {
    for (cplx a : {cplx(2.0, 0.0), cplx(-1.1, 0.4), cplx(0.3, 3.0)}) {
      for (int i = 0; i < 64; ++i) {
        const cplx zeta = testing_support::circle_point(i, 64);
        CHECK(std::abs(std::norm(outer_rho_zeta(a, zeta)) - (std::norm(a) - 1.0) / std::norm(zeta - a)) <= 1e-13);
        for (double r : {1.0, 1.5, 4.0, 1e3}) CHECK(std::abs(outer_rho_zeta(a, r * zeta)) > 1e-3);
      }
      const cplx at_a = outer_rho_zeta(a, a);
      CHECK(at_a.real() > 0.0);
      CHECK(std::abs(at_a.imag()) <= 1e-14 * at_a.real());
    }
  }
  SECTION("points too close to the domain") {
    CHECK_THROWS_AS(outer_rho_zeta(0.5, 2.0), Error);
    try {
      make_offspectral_point(ExteriorMap::identity(), 1.05, 0.1);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::not_off_spectral);
    }
    CHECK_NOTHROW(make_offspectral_point(ExteriorMap::identity(), 1.2, 0.1));
  }
}

TEST_CASE("off-spectral normalized kernel against the oracle", "[kernels][oracle]") {
  const auto model = testing_support::disk_alpha_model(1);
  const auto& fx = testing_support::disk_alpha_oracle();
  const auto p = make_offspectral_point(model.map, 2.0);
  const cplx z = 2.5;
  std::vector<double> dev;
  for (int N : {16, 32, 64}) {
    const cplx k = oracle_kernel(fx.polys, z, p.w, N) / std::sqrt(oracle_kernel(fx.polys, p.w, p.w, N).real());
    const cplx f = offspectral_leading(model, p, N, z) * offspectral_phase(model, p, N);
    dev.push_back(std::abs(k / f - 1.0));
    CHECK(std::abs(std::arg(k / f)) <= 1e-3);
  }
  for (std::size_t i = 0; i + 1 < dev.size(); ++i) {
    const double ratio = dev[i] / dev[i + 1];
    INFO("ratio " << ratio);
    CHECK(ratio >= 1.4);
    CHECK(ratio <= 2.8);
  }
}

TEST_CASE("off-spectral kernel is positive on the diagonal", "[kernels]") {
  const auto map = ExteriorMap::ellipse(2.0, 1.0);
  const auto model = build_expansion_model(map, testing_support::unit_weight(map, 24, 0.75), 0);
  for (cplx w : {cplx(3.0, 0.0), cplx(-1.0, 2.5), cplx(0.5, -2.0)}) {
    const auto p = make_offspectral_point(map, w, 0.1);
    for (int N : {10, 25}) {
      const cplx f = offspectral_leading(model, p, N, w) * offspectral_phase(model, p, N);
      CHECK(f.real() > 0.0);
      CHECK(std::abs(f.imag()) <= 1e-10 * f.real());
    }
  }
}

TEST_CASE("Bernstein-Walsh kernel diagonal", "[kernels]") {
  constexpr double rho = 0.6;
  SECTION("basis weights") {
    CHECK(bw_basis_weight(rho, 0) == Catch::Approx(2.0 / (1.0 - rho * rho)));
    CHECK(bw_basis_weight(rho, -1) == Catch::Approx(-1.0 / (2.0 * std::log(rho))));
    for (int n = -6; n <= 6; ++n) CHECK(bw_basis_weight(rho, n) > 0.0);
  }
  SECTION("direct sum on the disk") {
    const auto map = ExteriorMap::identity();
    for (cplx z : {cplx(0.8, 0.1), cplx(1.0, 0.0), cplx(-0.9, 1.1)}) {
      const int N = 12;
      const double x = std::norm(z);
      double direct = 1.0 / (std::log(1.0 / (rho * rho)) * x);
      for (int n = 0; n <= N; ++n) direct += 2.0 * (n + 1) * std::pow(x, n) / (1.0 - std::pow(rho, 2 * n + 2));
      // n = -(m + 1): 2 m rho^{2m} x^{-m-1} / (1 - rho^{2m})
      for (int m = 1; m <= 2000; ++m)
        direct += 2.0 * m * std::pow(rho * rho / x, m) / (x * (1.0 - std::pow(rho, 2 * m)));
      CHECK(std::abs(bw_kernel_diag(rho, map, N, z) - direct) <= 1e-12 * direct);
    }
  }
  SECTION("growth and bounds") {
    const auto map = ExteriorMap::ellipse(2.0, 1.0);
    const cplx on_boundary = map.psi(std::polar(1.0, 0.7));
    for (int N = 20; N <= 80; N += 20) {
      const double k = bw_kernel_diag(rho, map, N, on_boundary);
      const double dphi2 = 1.0 / std::norm(map.dpsi(std::polar(1.0, 0.7)));
      CHECK(k <= 1.2 * dphi2 * (N + 1.0) * (N + 2.0));
      CHECK(k >= dphi2 * (N + 1.0) * (N + 2.0) * 0.8);
      CHECK(bw_kernel_diag(rho, map, N + 1, on_boundary) > k);
    }
    const cplx outside = map.psi(1.3);
    const double r = bw_kernel_diag(rho, map, 61, outside) / bw_kernel_diag(rho, map, 60, outside);
    CHECK(std::abs(r - 1.69) <= 0.06);
  }
  CHECK_THROWS_AS(bw_kernel_diag(rho, ExteriorMap::identity(), 10, 0.5), Error);
  CHECK_THROWS_AS(bw_kernel_diag(1.2, ExteriorMap::identity(), 10, 2.0), Error);
}
