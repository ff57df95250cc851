#pragma once

#include <limits>
#include <string>
#include <string_view>

#include "ekman/grid.hpp"
#include "ekman/spline_fv.hpp"
#include "ekman/types.hpp"

namespace ekman {

enum class StabilityFamily { BusingerDyer };

struct MOParameters {
  double kappa = 0.4;
  double roughness = 0.1;              // z_r [m]
  double molecular_viscosity = 1e-5;   // K_mol [m^2/s]
  double gravity = 9.81;
  double theta_ref = 283.0;
  double u_star_floor = 1e-4;
  double bulk_tolerance = 1e-6;
  int bulk_max_iterations = 20;
  StabilityFamily family = StabilityFamily::BusingerDyer;

  void validate() const;
};

/// Friction scales and flux direction at the top of the surface layer.
struct SurfaceState {
  double u_star = 1e-4;
  double theta_star = 0.0;
  Complex e_tau{1.0, 0.0};
  double delta_a = 1.0;
  /// +infinity is the neutral sentinel (zeta = 0 exactly).
  double obukhov_length = std::numeric_limits<double>::infinity();
  bool bulk_converged = true;
  int bulk_iterations = 0;

  double inverse_obukhov() const { return 1.0 / obukhov_length; }
};

namespace stability {
double phi_m(double zeta);
double psi_m(double zeta);
double phi_h(double zeta);
double psi_h(double zeta);
}  // namespace stability

/// ln(1 + z/z_r) - psi_m((z + z_r)/L) + psi_m(z_r/L): the MO momentum profile shape,
/// zero at z = 0.
double momentum_shape(double z, double inverse_obukhov, const MOParameters& p);
double heat_shape(double z, double inverse_obukhov, const MOParameters& p);

/// Monin-Obukhov inversion: friction scales from the wind and the air-surface
/// temperature difference sampled at z_eval. Damped Picard on 1/L.
SurfaceState bulk(const Complex& u_at_eval, double delta_theta, double z_eval,
                  const MOParameters& params, const SurfaceState& prev);

/// u(z) = (u*/kappa) momentum_shape(z) e_tau for 0 <= z <= delta_a.
Complex mo_profile_u(double z, const SurfaceState& state, const MOParameters& params);

/// theta(z) - theta_surface in the surface layer.
double mo_profile_theta(double z, const SurfaceState& state, const MOParameters& params);

/// Average of the MO wind profile over [z_lo, z_hi] (within the surface layer).
Complex mo_average_u(double z_lo, double z_hi, const SurfaceState& state,
                     const MOParameters& params);
double mo_average_theta(double z_lo, double z_hi, const SurfaceState& state,
                        const MOParameters& params);

/// K_u(z) = kappa u* (z + z_r) / phi_m((z + z_r)/L), so that K_u du/dz = u*^2 e_tau.
double mo_viscosity(double z, const SurfaceState& state, const MOParameters& params);
double mo_heat_diffusivity(double z, const SurfaceState& state, const MOParameters& params);

enum class SchemeKind { FD, FV1, FV2, FVfree };

std::string_view to_string(SchemeKind kind);
SchemeKind parse_scheme(std::string_view name);

/// Bottom closure handed to the implicit solver. For the finite-volume schemes
/// `row` is a linear constraint on (phi_b, phi_{b+1}, u_first); for FD only the
/// drag is used, the surface flux being drag * u_first^{n+1}.
struct SurfaceCoupling {
  SchemeKind scheme = SchemeKind::FVfree;
  double drag = 0.0;          // u*^2 / |u^n(eval)|
  double k_bottom = 0.0;      // viscosity multiplying phi at the bottom interface
  double eval_height = 0.0;   // where the bulk routine samples the wind
  BoundaryRow<Complex> row;
};

/// Momentum bottom row of `scheme`.
///  FV1:        K_0 phi_0 = drag * u_{1/2}^{n+1}            (cell average)
///  FVfree/FV2: K_d phi_d = drag * u^{n+1}(delta_a)          (sub-cell spline value)
///  FD:         ghost flux drag * u_{1/2}^{n+1} (no phi row)
/// `first_size` is the size of the lowest computational cell; `u_eval_magnitude`
/// is |u^n| at the bulk sampling point.
SurfaceCoupling boundary_row(SchemeKind scheme, const SurfaceState& state, double first_size,
                             double u_eval_magnitude, double k_bottom, double eval_height,
                             const MOParameters& params);

/// Heat analogue: K phi_b = c_h (theta^{n+1}(eval) - theta_s) with c_h = kappa u* / F_h.
BoundaryRow<double> heat_boundary_row(SchemeKind scheme, const SurfaceState& state,
                                      double first_size, double k_bottom, double eval_height,
                                      double theta_surface, const MOParameters& params);

/// Transfer coefficient kappa u* / F_h(z_eval) of the heat flux.
double heat_transfer_coefficient(const SurfaceState& state, double z_eval,
                                 const MOParameters& params);

/// The spline term u*^2 e_tau h / (6 K_0) that a parabolic first cell implies when the
/// flux condition is imposed with viscosity K_0 at the wall.
Complex wall_viscosity_term(const SurfaceState& state, double first_size, double k0);

}  // namespace ekman
