#include <doctest.h>

#include <cmath>
#include <random>

#include "ekman/closure.hpp"

using namespace ekman;

namespace {

SurfaceState neutral_surface(double u_star, double delta) {
  SurfaceState s;
  s.u_star = u_star;
  s.delta_a = delta;
  return s;
}

TkeState state_with(const ColumnMesh& mesh, const RealVector& e, const RealVector& shear2,
                    const RealVector& n2, const SurfaceState& surface, const ClosureConstants& c,
                    const MOParameters& p) {
  TkeState s;
  s.e = e;
  const auto lengths = mixing_length(mesh, e, n2, surface, c, p);
  s.l_m = lengths.l_m;
  s.l_eps = lengths.l_eps;
  eddy_diffusivities(s, shear2, n2, mesh, surface, c, p);
  return s;
}

}  // namespace

TEST_CASE("pure decay of a uniform field") {
  const ClosureConstants c;
  const MOParameters p;
  const ColumnMesh mesh = mesh_above(build_uniform(10, 100.0), 5.0);
  const SurfaceState surface = neutral_surface(0.3, 5.0);
  const RealVector zero = RealVector::Zero(mesh.num_cells() + 1);
  TkeState s = state_with(mesh, RealVector::Constant(mesh.num_cells(), 0.2), zero, zero, surface, c, p);
  s.k_u.setZero();
  const double dt = 30.0;
  const TkeState next = step_tke(s, zero, zero, dt, mesh, surface, c, p, {true, false});
  for (Eigen::Index j = 0; j < mesh.num_cells(); ++j) {
    const double expected = 0.2 / (1.0 + dt * c.c_eps * std::sqrt(0.2) / s.l_eps[j]);
    CHECK(next.e[j] == doctest::Approx(expected).epsilon(1e-12));
  }
  CHECK_THROWS_AS(step_tke(s, zero, zero, -1.0, mesh, surface, c, p), DomainError);
}

TEST_CASE("production balances dissipation at equilibrium") {
  const ClosureConstants c;
  const MOParameters p;
  ColumnMesh mesh;
  mesh.interfaces = (RealVector(2) << 10.0, 30.0).finished();
  mesh.sizes = (RealVector(1) << 20.0).finished();
  mesh.centers = (RealVector(1) << 20.0).finished();
  const double s2 = 4e-4;
  const RealVector shear2 = RealVector::Constant(2, s2);
  const RealVector n2 = RealVector::Zero(2);

  const double l = mixing_length(mesh, RealVector::Constant(1, 1.0), n2, neutral_surface(0.3, 10.0), c, p).l_m[0];
  const double e_eq = c.c_k / c.c_eps * l * l * s2;
  // Surface friction chosen so the bottom-interface viscosity equals the cell value.
  const SurfaceState surface = neutral_surface(c.c_k * l * std::sqrt(e_eq) / (p.kappa * (10.0 + p.roughness)), 10.0);

  TkeState s = state_with(mesh, RealVector::Constant(1, 1e-3), shear2, n2, surface, c, p);
  for (int k = 0; k < 3000; ++k) {
    s = step_tke(s, shear2, n2, 30.0, mesh, surface, c, p, {true, false});
  }
  CHECK(s.e[0] == doctest::Approx(e_eq).epsilon(1e-4));
}

TEST_CASE("strong stratification drives e to its floor") {
  const ClosureConstants c;
  const MOParameters p;
  const ColumnMesh mesh = full_mesh(build_uniform(8, 200.0));
  const SurfaceState surface = neutral_surface(0.1, 12.5);
  const RealVector shear2 = RealVector::Constant(9, 1e-6);
  const RealVector n2 = RealVector::Constant(9, 1e-2);
  TkeState s = state_with(mesh, RealVector::Constant(8, 0.5), shear2, n2, surface, c, p);
  for (int k = 0; k < 2000; ++k) {
    s = step_tke(s, shear2, n2, 30.0, mesh, surface, c, p, {true, false});
    CHECK(s.e.minCoeff() >= c.e_min);
  }
  CHECK(s.e.maxCoeff() == c.e_min);
}

TEST_CASE("eddy diffusivities") {
  const ClosureConstants c;
  const MOParameters p;
  const ColumnMesh mesh = mesh_above(build_uniform(6, 120.0), 4.0);
  const SurfaceState surface = neutral_surface(0.25, 4.0);
  const RealVector zero = RealVector::Zero(7);
  RealVector e(6);
  e << 0.3, 0.25, 0.2, 0.1, 0.05, 0.01;
  const TkeState a = state_with(mesh, e, zero, zero, surface, c, p);
  TkeState b = a;
  b.e = 2.0 * e;
  eddy_diffusivities(b, zero, zero, mesh, surface, c, p);
  for (Eigen::Index j = 1; j <= 6; ++j) {
    CHECK(b.k_u[j] == doctest::Approx(std::sqrt(2.0) * a.k_u[j]).epsilon(1e-14));
    CHECK(a.k_theta[j] == a.k_u[j]);
  }
  CHECK(a.k_u[0] == doctest::Approx(mo_viscosity(4.0, surface, p)));

  const TkeState floor = state_with(mesh, RealVector::Constant(6, c.e_min), zero, zero, surface, c, p);
  CHECK(floor.k_u[6] == doctest::Approx(c.c_k * floor.l_m[5] * std::sqrt(c.e_min)));
  CHECK(floor.k_u.minCoeff() > 0.0);

  RealVector shear2 = RealVector::Constant(7, 1e-4);
  RealVector n2 = RealVector::Constant(7, 1e-4);
  TkeState stable = a;
  eddy_diffusivities(stable, shear2, n2, mesh, surface, c, p);
  CHECK(stable.k_theta[3] == doctest::Approx(stable.k_u[3] / 6.0));
  n2.setConstant(1.0);
  eddy_diffusivities(stable, shear2, n2, mesh, surface, c, p);
  CHECK(stable.k_theta[3] == doctest::Approx(stable.k_u[3] / c.prandtl_max));
}

TEST_CASE("mixing length") {
  ClosureConstants c;
  const MOParameters p;
  const ColumnMesh mesh = full_mesh(build_uniform(40, 400.0));
  const SurfaceState surface = neutral_surface(0.3, 5.0);
  const RealVector e = RealVector::Constant(40, 0.01);

  const auto capped = mixing_length(mesh, e, RealVector::Constant(41, 1e-4), surface, c, p);
  CHECK(capped.l_m[39] == doctest::Approx(std::sqrt(0.02) / 0.01).epsilon(1e-12));
  CHECK(capped.l_m.maxCoeff() <= 14.1422);
  CHECK(capped.l_eps == capped.l_m);

  c.wall_factor = 1.0;
  const auto free = mixing_length(mesh, e, RealVector::Zero(41), surface, c, p);
  CHECK(free.l_m[0] == doctest::Approx(p.kappa * (5.0 + p.roughness)).epsilon(0.03));
  for (Eigen::Index j = 1; j < 40; ++j) CHECK(free.l_m[j] > free.l_m[j - 1]);
  CHECK(free.l_m[39] < c.l_inf);

  CHECK(ClosureConstants::balanced_wall_factor(0.1, 0.7) == doctest::Approx(ClosureConstants{}.wall_factor));
}

TEST_CASE("frozen-coefficient energy balance") {
  const ClosureConstants c;
  const MOParameters p;
  const ColumnMesh mesh = mesh_above(build_stretched(10, 5.0, 10, 400.0), 2.5);
  const Eigen::Index n = mesh.num_cells();
  const SurfaceState surface = neutral_surface(0.3, 2.5);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  RealVector e(n), shear2(n + 1), n2(n + 1);
  for (Eigen::Index j = 0; j < n; ++j) e[j] = 0.01 + 0.5 * u(rng);
  for (Eigen::Index j = 0; j <= n; ++j) {
    shear2[j] = 1e-3 * u(rng);
    n2[j] = 2e-4 * (u(rng) - 0.5);
  }
  const TkeState s = state_with(mesh, e, shear2, n2, surface, c, p);
  const double dt = 60.0;
  TkeBudget budget;
  const TkeState next = step_tke(s, shear2, n2, dt, mesh, surface, c, p, {false, false}, &budget);
  const double change = mesh.sizes.dot(next.e - s.e);
  const double source = dt * (budget.production - budget.buoyancy - budget.dissipation);
  const double scale = mesh.sizes.dot(s.e);
  CHECK(std::abs(change - source) <= 1e-10 * scale);
  CHECK(next.k_u.minCoeff() >= 0.0);
  CHECK(next.k_theta.minCoeff() >= 0.0);
}
