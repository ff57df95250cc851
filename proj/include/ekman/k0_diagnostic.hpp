#pragma once

#include "ekman/dynamics.hpp"

namespace ekman {

/// Outcome of running FV1 twice: with the molecular viscosity at the wall, and with
/// the wall viscosity replaced by the surface-layer value K_{u,delta}.
struct K0Report {
  double k_molecular = 0.0;
  double k_replaced = 0.0;
  /// Spline value at z_1 reconstructed in the first cell at the end of each run.
  Complex u_z1_molecular{};
  Complex u_z1_replaced{};
  double inflation = 0.0;  // |u_z1_molecular| / |u_z1_replaced|
  /// Largest |u(z_1)| over each run.
  double peak_molecular = 0.0;
  double peak_replaced = 0.0;
  double u_star_molecular = 0.0;
  double u_star_replaced = 0.0;
  /// u*^2 e_tau h / (6 K) for both viscosities, on the same surface state.
  Complex term_molecular{};
  Complex term_replaced{};
  /// Steps completed by the molecular run (it may stop on non-finite values).
  long molecular_steps = 0;
  bool molecular_finite = true;
};

K0Report k0_pathology_diagnostic(const SimulationConfig& config);

}  // namespace ekman
