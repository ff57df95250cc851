#include "ekman/closure.hpp"

#include <algorithm>
#include <cmath>

#include "ekman/tridiagonal.hpp"

namespace ekman {

double ClosureConstants::balanced_wall_factor(double c_k, double c_eps) {
  return std::pow(c_eps / (c_k * c_k * c_k), 0.25);
}

void ClosureConstants::validate() const {
  if (!(c_k > 0.0 && c_eps > 0.0 && c_mu > 0.0)) throw ConfigError("closure constants must be positive");
  if (!(e_min > 0.0)) throw ConfigError("e_min must be positive");
  if (!(l_inf > 0.0) || !(wall_factor > 0.0)) throw ConfigError("mixing length scales must be positive");
  if (!(prandtl_max >= 1.0) || prandtl_slope < 0.0) throw ConfigError("invalid turbulent Prandtl law");
}

MixingLengths mixing_length(const ColumnMesh& mesh, const RealVector& e, const RealVector& n2,
                            const SurfaceState& /*surface*/, const ClosureConstants& c,
                            const MOParameters& p) {
  const Eigen::Index n = mesh.num_cells();
  MixingLengths out{RealVector(n), RealVector(n)};
  for (Eigen::Index j = 0; j < n; ++j) {
    const double wall = c.wall_factor * p.kappa * (mesh.centers[j] + p.roughness);
    double l = 1.0 / (1.0 / wall + 1.0 / c.l_inf);
    const double n2_cell = 0.5 * (n2[j] + n2[j + 1]);
    if (n2_cell > 0.0) {
      l = std::min(l, std::sqrt(2.0 * e[j] / n2_cell));
    }
    out.l_m[j] = l;
    out.l_eps[j] = l;
  }
  return out;
}

void eddy_diffusivities(TkeState& s, const RealVector& shear2, const RealVector& n2,
                        const ColumnMesh& mesh, const SurfaceState& surface,
                        const ClosureConstants& c, const MOParameters& p) {
  const Eigen::Index n = mesh.num_cells();
  const RealVector k_cell = c.c_k * s.l_m.cwiseProduct(s.e.cwiseSqrt());
  s.k_u.resize(n + 1);
  s.k_theta.resize(n + 1);
  for (Eigen::Index j = 1; j < n; ++j) {
    s.k_u[j] = 0.5 * (k_cell[j - 1] + k_cell[j]);
  }
  s.k_u[n] = k_cell[n - 1];
  for (Eigen::Index j = 1; j <= n; ++j) {
    const double ri = n2[j] / std::max(shear2[j], 1e-12);
    const double prandtl = ri > 0.0 ? std::min(1.0 + c.prandtl_slope * ri, c.prandtl_max) : 1.0;
    s.k_theta[j] = s.k_u[j] / prandtl;
  }
  s.k_u[0] = mo_viscosity(surface.delta_a, surface, p);
  s.k_theta[0] = mo_heat_diffusivity(surface.delta_a, surface, p);
}

TkeState initial_tke(const ColumnMesh& mesh, const SurfaceState& surface,
                     const ClosureConstants& c, const MOParameters& p) {
  const Eigen::Index n = mesh.num_cells();
  TkeState s;
  s.e = RealVector::Constant(n, c.e_min);
  const RealVector zero = RealVector::Zero(n + 1);
  auto lengths = mixing_length(mesh, s.e, zero, surface, c, p);
  s.l_m = lengths.l_m;
  s.l_eps = lengths.l_eps;
  eddy_diffusivities(s, zero, zero, mesh, surface, c, p);
  return s;
}

TkeState step_tke(const TkeState& state, const RealVector& shear2, const RealVector& n2,
                  double dt, const ColumnMesh& mesh, const SurfaceState& surface,
                  const ClosureConstants& c, const MOParameters& p,
                  const TkeStepOptions& options, TkeBudget* budget) {
  if (!(dt > 0.0)) {
    throw DomainError("time step must be positive");
  }
  const Eigen::Index n = mesh.num_cells();
  const RealVector& h = mesh.sizes;
  const RealVector& k = state.k_u;

  TridiagonalSystem<double> sys(n);
  TkeBudget b;
  for (Eigen::Index j = 0; j < n; ++j) {
    const double prod = 0.5 * (k[j] * shear2[j] + k[j + 1] * shear2[j + 1]);
    const double buoy = 0.5 * (state.k_theta[j] * n2[j] + state.k_theta[j + 1] * n2[j + 1]);
    const double damping = c.c_eps * std::sqrt(state.e[j]) / state.l_eps[j];
    sys.diag[j] = 1.0 + dt * damping;
    sys.rhs[j] = state.e[j] + dt * (prod - buoy);
    b.production += h[j] * prod;
    b.buoyancy += h[j] * buoy;
    if (j > 0) {
      const double g = dt * k[j] / (mesh.centers[j] - mesh.centers[j - 1]);
      sys.diag[j] += g / h[j];
      sys.lower[j] -= g / h[j];
      sys.diag[j - 1] += g / h[j - 1];
      sys.upper[j - 1] -= g / h[j - 1];
    }
  }
  if (options.surface_dirichlet) {
    const double e_surface =
        std::max(c.e_min, surface.u_star * surface.u_star / std::sqrt(c.c_mu));
    const double g = dt * k[0] / (0.5 * h[0]);
    sys.diag[0] += g / h[0];
    sys.rhs[0] += g / h[0] * e_surface;
  }

  TkeState next = state;
  next.e = solve_tridiagonal(sys);
  for (Eigen::Index j = 0; j < n; ++j) {
    b.dissipation += h[j] * c.c_eps * std::sqrt(state.e[j]) / state.l_eps[j] * next.e[j];
  }
  if (options.clip) {
    next.e = next.e.cwiseMax(c.e_min);
  }
  if (!next.e.allFinite()) {
    throw NumericsError("non-finite turbulent kinetic energy");
  }
  auto lengths = mixing_length(mesh, next.e, n2, surface, c, p);
  next.l_m = lengths.l_m;
  next.l_eps = lengths.l_eps;
  eddy_diffusivities(next, shear2, n2, mesh, surface, c, p);
  if (budget != nullptr) {
    *budget = b;
  }
  return next;
}

}  // namespace ekman
