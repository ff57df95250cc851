#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "ekman/quadrature.hpp"
#include "ekman/surface_layer.hpp"

using namespace ekman;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

SurfaceState layer(double u_star, double obukhov, double delta, Complex dir = {1.0, 0.0}) {
  SurfaceState s;
  s.u_star = u_star;
  s.obukhov_length = obukhov;
  s.delta_a = delta;
  s.e_tau = dir;
  return s;
}

}  // namespace

TEST_CASE("stability functions") {
  using namespace stability;
  CHECK(phi_m(0.0) == 1.0);
  CHECK(psi_m(0.0) == 0.0);
  CHECK(psi_h(0.0) == 0.0);
  CHECK(phi_m(0.2) == doctest::Approx(2.0));
  CHECK(phi_h(-1.0) == doctest::Approx(1.0 / std::sqrt(17.0)));
  CHECK(std::abs(psi_m(-1e-9)) < 1e-7);
  // phi = 1 - zeta psi'(zeta)
  for (double zeta : {-2.0, -0.5, -0.05, 0.1, 0.8}) {
    const double d = 1e-6;
    const double dpsi_m = (psi_m(zeta + d) - psi_m(zeta - d)) / (2 * d);
    const double dpsi_h = (psi_h(zeta + d) - psi_h(zeta - d)) / (2 * d);
    CHECK(phi_m(zeta) == doctest::Approx(1.0 - zeta * dpsi_m).epsilon(1e-7));
    CHECK(phi_h(zeta) == doctest::Approx(1.0 - zeta * dpsi_h).epsilon(1e-7));
  }
}

TEST_CASE("bulk in neutral conditions") {
  const MOParameters p;
  const double speed = 0.3 / 0.4 * std::log(1.0 + 10.0 / 0.1);
  const SurfaceState s = bulk(Complex(0.0, speed), 0.0, 10.0, p, SurfaceState{});
  CHECK(std::abs(s.u_star - 0.3) < 1e-8);
  CHECK(std::isinf(s.obukhov_length));
  CHECK(s.bulk_converged);
  CHECK(std::abs(s.e_tau - Complex(0.0, 1.0)) < 1e-15);

  const SurfaceState tilted = bulk(Complex(3.0, -4.0), 0.0, 7.0, p, SurfaceState{});
  CHECK(std::abs(std::abs(tilted.e_tau) - 1.0) < 1e-12);

  CHECK_THROWS_AS(bulk(Complex(1.0), 0.0, 0.0, p, SurfaceState{}), DomainError);
  CHECK_THROWS_AS(bulk(Complex(NAN, 0.0), 0.0, 5.0, p, SurfaceState{}), NumericsError);
}

TEST_CASE("bulk with calm wind keeps the previous direction") {
  const MOParameters p;
  SurfaceState prev;
  prev.e_tau = std::polar(1.0, 0.7);
  const SurfaceState s = bulk(Complex(0.0), 2.0, 10.0, p, prev);
  CHECK(s.u_star == p.u_star_floor);
  CHECK(s.e_tau == prev.e_tau);
}

TEST_CASE("stable bulk against a bisection on 1/L") {
  const MOParameters p;
  const double z = 10.0;
  const double speed = 5.0;
  const double dtheta = 1.0;
  // Stable shapes are ln(1 + z/z_r) + 5 z / L for both momentum and heat.
  auto residual = [&](double inv_l) {
    const double f = std::log1p(z / p.roughness) + 5.0 * z * inv_l;
    const double u_star = p.kappa * speed / f;
    const double theta_star = p.kappa * dtheta / f;
    return inv_l - p.kappa * p.gravity * theta_star / (u_star * u_star * p.theta_ref);
  };
  double lo = 0.0;
  double hi = 10.0;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (residual(mid) < 0.0 ? lo : hi) = mid;
  }
  const double inv_l = 0.5 * (lo + hi);
  const double expected = p.kappa * speed / (std::log1p(z / p.roughness) + 5.0 * z * inv_l);

  const SurfaceState s = bulk(Complex(speed), dtheta, z, p, SurfaceState{});
  const SurfaceState neutral = bulk(Complex(speed), 0.0, z, p, SurfaceState{});
  CHECK(s.obukhov_length > 0.0);
  CHECK(s.u_star < neutral.u_star);
  CHECK(s.u_star == doctest::Approx(expected).epsilon(1e-5));
  CHECK(s.theta_star > 0.0);

  const SurfaceState unstable = bulk(Complex(speed), -1.0, z, p, SurfaceState{});
  CHECK(unstable.obukhov_length < 0.0);
  CHECK(unstable.u_star > neutral.u_star);
}

TEST_CASE("MO profiles match quadrature of u*^2 / K_u") {
  const MOParameters p;
  const GaussRule rule = gauss_legendre(16);
  for (double obukhov : {kInf, 40.0, -25.0}) {
    const SurfaceState s = layer(0.35, obukhov, 20.0);
    CHECK(mo_profile_u(0.0, s, p) == Complex(0.0));
    for (double z : {0.5, 3.0, 12.0, 20.0}) {
      const double q = integrate(
          rule, [&](double x) { return s.u_star * s.u_star / mo_viscosity(x, s, p); }, 0.0, z, 64);
      CHECK(std::abs(mo_profile_u(z, s, p).real() - q) <= 1e-10 * q);
    }
    const double avg = integrate(rule, [&](double x) { return mo_profile_u(x, s, p).real(); }, 2.0, 9.0, 64) / 7.0;
    CHECK(mo_average_u(2.0, 9.0, s, p).real() == doctest::Approx(avg).epsilon(1e-10));
    const double avg0 = integrate(rule, [&](double x) { return mo_profile_u(x, s, p).real(); }, 0.0, 5.0, 256) / 5.0;
    CHECK(mo_average_u(0.0, 5.0, s, p).real() == doctest::Approx(avg0).epsilon(1e-8));
  }
  const SurfaceState s = layer(0.3, 30.0, 10.0);
  CHECK_THROWS_AS(mo_profile_u(10.5, s, p), DomainError);
  CHECK_THROWS_AS(mo_viscosity(-0.1, s, p), DomainError);
}

TEST_CASE("rotating the flux direction rotates the profile") {
  const MOParameters p;
  const double alpha = 0.9;
  const SurfaceState a = layer(0.3, -50.0, 10.0);
  const SurfaceState b = layer(0.3, -50.0, 10.0, std::polar(1.0, alpha));
  for (double z : {0.1, 4.0, 10.0}) {
    CHECK(std::abs(mo_profile_u(z, b, p) - std::polar(1.0, alpha) * mo_profile_u(z, a, p)) < 1e-14);
  }
}

TEST_CASE("surface-layer viscosity") {
  const MOParameters p;
  const SurfaceState neutral = layer(0.3, kInf, 20.0);
  CHECK(mo_viscosity(10.0, neutral, p) == doctest::Approx(1.212).epsilon(1e-14));
  CHECK(mo_viscosity(0.0, neutral, p) == doctest::Approx(0.4 * 0.3 * 0.1));
  for (double obukhov : {kInf, 15.0, -15.0}) {
    const SurfaceState s = layer(0.3, obukhov, 20.0, std::polar(1.0, -0.3));
    for (double z : {0.2, 2.0, 8.0, 17.0}) {
      const double d = 1e-4 * (z + p.roughness);
      const Complex du = (mo_profile_u(z + d, s, p) - mo_profile_u(z - d, s, p)) / (2.0 * d);
      CHECK(std::abs(mo_viscosity(z, s, p) * du - s.u_star * s.u_star * s.e_tau) <= 1e-8 * 0.09);
    }
  }
}

TEST_CASE("boundary rows") {
  const MOParameters p;
  const double u_g = 8.0;
  const SurfaceState rest = bulk(Complex(u_g), 0.0, 5.0, p, SurfaceState{});
  for (SchemeKind k : {SchemeKind::FD, SchemeKind::FV1, SchemeKind::FV2, SchemeKind::FVfree}) {
    const SurfaceCoupling c = boundary_row(k, rest, 10.0, u_g, 1.0, 5.0, p);
    const Complex flux = c.drag * Complex(u_g);
    CHECK(std::abs(flux - rest.u_star * rest.u_star) < 1e-14);
  }

  SurfaceState fv2_state = rest;
  fv2_state.delta_a = 10.0;
  const SurfaceCoupling a = boundary_row(SchemeKind::FV2, fv2_state, 20.96, 7.0, 1.3, 10.0, p);
  const SurfaceCoupling b = boundary_row(SchemeKind::FVfree, fv2_state, 20.96, 7.0, 1.3, 10.0, p);
  CHECK(a.row.phi_edge == b.row.phi_edge);
  CHECK(a.row.phi_inner == b.row.phi_inner);
  CHECK(a.row.mean == b.row.mean);
  CHECK(a.row.rhs == b.row.rhs);
}

TEST_CASE("cell-average bulk input underestimates the surface flux") {
  const MOParameters p;
  const double h = 10.0;
  const SurfaceState truth = layer(0.3, kInf, h);
  const Complex average = mo_average_u(0.0, h, truth, p);
  const SurfaceState fv1 = bulk(average, 0.0, 0.5 * h, p, SurfaceState{});
  CHECK(fv1.u_star < truth.u_star);
  const SurfaceState point = bulk(mo_profile_u(0.5 * h, truth, p), 0.0, 0.5 * h, p, SurfaceState{});
  CHECK(point.u_star == doctest::Approx(0.3).epsilon(1e-10));
}

TEST_CASE("wall viscosity term scales as 1/K") {
  const SurfaceState s = layer(0.3, kInf, 5.0);
  const Complex molecular = wall_viscosity_term(s, 10.0, 1e-5);
  const Complex replaced = wall_viscosity_term(s, 10.0, 1.0);
  CHECK(std::abs(molecular) / std::abs(replaced) == doctest::Approx(1e5).epsilon(1e-12));
  CHECK(std::abs(wall_viscosity_term(s, 10.0, 2.0) - 0.5 * replaced) < 1e-16);
  CHECK(std::abs(replaced - 0.09 * 10.0 / 6.0) < 1e-15);
  CHECK_THROWS_AS(wall_viscosity_term(s, 10.0, 0.0), DomainError);
}

TEST_CASE("scheme names") {
  for (SchemeKind k : {SchemeKind::FD, SchemeKind::FV1, SchemeKind::FV2, SchemeKind::FVfree}) {
    CHECK(parse_scheme(to_string(k)) == k);
  }
  CHECK_THROWS_AS(parse_scheme("fv3"), ConfigError);
}
