#pragma once

#include "ekman/grid.hpp"
#include "ekman/surface_layer.hpp"
#include "ekman/types.hpp"

namespace ekman {

/// One-equation TKE closure constants. K = c_k l sqrt(e), dissipation c_eps e^{3/2}/l.
struct ClosureConstants {
  double c_k = 0.1;
  double c_eps = 0.7;
  /// Surface TKE is u*^2 / sqrt(c_mu); c_mu = c_k c_eps balances production and
  /// dissipation in a constant-flux layer.
  double c_mu = 0.07;
  double e_min = 1e-6;
  double l_inf = 100.0;
  /// Near-wall mixing length is wall_factor * kappa (z + z_r). The default
  /// (c_eps / c_k^3)^{1/4} makes K_u = kappa u* (z + z_r) in a log layer at equilibrium.
  double wall_factor = 5.1436867;
  /// Pr_t = min(1 + prandtl_slope Ri, prandtl_max) for Ri > 0, 1 otherwise.
  double prandtl_slope = 5.0;
  double prandtl_max = 10.0;

  static double balanced_wall_factor(double c_k, double c_eps);
  void validate() const;
};

struct TkeState {
  RealVector e;        // per cell [m^2/s^2]
  RealVector l_m;      // per cell [m]
  RealVector l_eps;    // per cell [m]
  RealVector k_u;      // per interface [m^2/s]
  RealVector k_theta;  // per interface [m^2/s]
};

struct MixingLengths {
  RealVector l_m;
  RealVector l_eps;
};

/// Wall length blended with l_inf, capped by sqrt(2 e)/N where stratification is
/// stable. `n2` is given per interface.
MixingLengths mixing_length(const ColumnMesh& mesh, const RealVector& e, const RealVector& n2,
                            const SurfaceState& surface, const ClosureConstants& c,
                            const MOParameters& p);

/// K_u from the cells averaged onto interfaces, K_theta = K_u / Pr_t(Ri). The bottom
/// interface carries the surface-layer values at delta_a.
void eddy_diffusivities(TkeState& state, const RealVector& shear2, const RealVector& n2,
                        const ColumnMesh& mesh, const SurfaceState& surface,
                        const ClosureConstants& c, const MOParameters& p);

struct TkeStepOptions {
  bool clip = true;
  /// Dirichlet e = u*^2/sqrt(c_mu) at the bottom interface; zero flux otherwise.
  bool surface_dirichlet = true;
};

/// Budget terms of the last step, integrated over the column (sum of h * term).
struct TkeBudget {
  double production = 0.0;
  double buoyancy = 0.0;
  double dissipation = 0.0;
};

TkeState initial_tke(const ColumnMesh& mesh, const SurfaceState& surface,
                     const ClosureConstants& c, const MOParameters& p);

/// One implicit step of de/dt = d/dz(K_u de/dz) + K_u S^2 - K_theta N^2 - c_eps e^{3/2}/l_eps
/// with diffusivities frozen from `state` and the dissipation linearized around e^n.
TkeState step_tke(const TkeState& state, const RealVector& shear2, const RealVector& n2,
                  double dt, const ColumnMesh& mesh, const SurfaceState& surface,
                  const ClosureConstants& c, const MOParameters& p,
                  const TkeStepOptions& options = {}, TkeBudget* budget = nullptr);

}  // namespace ekman
