#include "ekman/k0_diagnostic.hpp"

#include <algorithm>
#include <cmath>

namespace ekman {

namespace {

struct RunEnd {
  ColumnState state;
  long steps = 0;
  bool finite = true;
  double peak = 0.0;
};

Complex value_at_z1(const ColumnState& s) {
  return cell_spline(s.mesh, s.u, s.phi_u, 0).top_value();
}

RunEnd run_fv1(SimulationConfig c, WallViscosity wall) {
  c.scheme = SchemeKind::FV1;
  c.bottom = BottomBoundary::SurfaceLayer;
  c.wall_viscosity = wall;
  RunEnd end{initial_state(c)};
  const long steps = std::lround(c.duration / c.dt);
  for (long k = 0; k < steps; ++k) {
    try {
      ColumnState next = step(end.state, c);
      end.state = std::move(next);
      ++end.steps;
      end.peak = std::max(end.peak, std::abs(value_at_z1(end.state)));
    } catch (const NumericsError&) {
      end.finite = false;
      break;
    }
  }
  return end;
}

}  // namespace

K0Report k0_pathology_diagnostic(const SimulationConfig& config) {
  K0Report r;
  const RunEnd molecular = run_fv1(config, WallViscosity::Molecular);
  const RunEnd replaced = run_fv1(config, WallViscosity::SurfaceLayerTop);
  r.k_molecular = config.mo.molecular_viscosity;
  r.k_replaced = mo_viscosity(replaced.state.surface.delta_a, replaced.state.surface, config.mo);
  r.u_z1_molecular = value_at_z1(molecular.state);
  r.u_z1_replaced = value_at_z1(replaced.state);
  r.inflation = std::abs(r.u_z1_molecular) / std::abs(r.u_z1_replaced);
  const double h = replaced.state.mesh.sizes[0];
  r.term_molecular = wall_viscosity_term(replaced.state.surface, h, r.k_molecular);
  r.term_replaced = wall_viscosity_term(replaced.state.surface, h, r.k_replaced);
  r.peak_molecular = molecular.peak;
  r.peak_replaced = replaced.peak;
  r.u_star_molecular = molecular.state.surface.u_star;
  r.u_star_replaced = replaced.state.surface.u_star;
  r.molecular_steps = molecular.steps;
  r.molecular_finite = molecular.finite;
  return r;
}

}  // namespace ekman
