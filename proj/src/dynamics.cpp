#include "ekman/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "ekman/tridiagonal.hpp"

namespace ekman {

double ThetaProfile::at(double z) const { return base + lapse_rate * std::max(0.0, z - mixed_height); }

double ThetaProfile::slope(double z) const { return z > mixed_height ? lapse_rate : 0.0; }

double ThetaProfile::average(double lo, double hi) const {
  // Exact average of the piecewise-linear profile.
  auto ramp_integral = [this](double z) {
    const double d = std::max(0.0, z - mixed_height);
    return 0.5 * d * d;
  };
  return base + lapse_rate * (ramp_integral(hi) - ramp_integral(lo)) / (hi - lo);
}

double SurfaceForcing::at(double t) const {
  return base + trend * t - amplitude * std::cos(2.0 * std::numbers::pi * t / period);
}

double SimulationConfig::effective_delta_a() const {
  if (bottom != BottomBoundary::SurfaceLayer) {
    return grid.centers()[0];
  }
  switch (scheme) {
    case SchemeKind::FV1:
    case SchemeKind::FV2:
      return grid.interface(1);
    case SchemeKind::FD:
      return grid.centers()[0];
    case SchemeKind::FVfree:
      return delta_a.value_or(grid.centers()[0]);
  }
  return grid.centers()[0];
}

void SimulationConfig::validate() const {
  if (!(dt > 0.0)) throw ConfigError("dt must be positive");
  if (!(duration >= dt)) throw ConfigError("duration must be at least one time step");
  if (coriolis == 0.0 || !std::isfinite(coriolis)) throw ConfigError("coriolis parameter must be nonzero");
  if (sub_iterations < 1) throw ConfigError("sub_iterations must be at least 1");
  if (constant_viscosity && !(*constant_viscosity >= 0.0)) throw ConfigError("constant viscosity must be >= 0");
  if (delta_a && !(*delta_a > 0.0)) throw ConfigError("delta_a must be positive");
  if (stratification != Stratification::Neutral && !(surface_theta.period > 0.0)) {
    throw ConfigError("surface forcing period must be positive");
  }
  mo.validate();
  closure.validate();
}

namespace {

bool uses_subcell(const SimulationConfig& c) {
  return c.bottom == BottomBoundary::SurfaceLayer &&
         (c.scheme == SchemeKind::FV2 || c.scheme == SchemeKind::FVfree);
}

bool is_fd(const SimulationConfig& c) { return c.scheme == SchemeKind::FD; }

ColumnMesh computational_mesh(const SimulationConfig& c) {
  return uses_subcell(c) ? mesh_above(c.grid, c.effective_delta_a()) : full_mesh(c.grid);
}

template <typename Scalar>
Scalar value_at_evaluation(const ColumnState& s, const SimulationConfig& c, const Vector<Scalar>& field,
                           const Vector<Scalar>& phi) {
  if (uses_subcell(c)) {
    return cell_spline(s.mesh, field, phi, 0).bottom_value();
  }
  return field[0];
}

SurfaceState surface_from(const ColumnState& s, const SimulationConfig& c, const ComplexVector& u,
                          const ComplexVector& phi_u, const RealVector& theta,
                          const RealVector& phi_theta, double theta_surface,
                          const SurfaceState& prev) {
  if (c.bottom != BottomBoundary::SurfaceLayer) {
    return prev;
  }
  const double z_eval = evaluation_height(s, c);
  double dtheta = 0.0;
  if (c.stratified()) {
    dtheta = value_at_evaluation<double>(s, c, theta, phi_theta) - theta_surface;
  }
  SurfaceState out = bulk(value_at_evaluation<Complex>(s, c, u, phi_u), dtheta, z_eval, c.mo, prev);
  out.delta_a = c.effective_delta_a();
  return out;
}

double wall_viscosity(const SimulationConfig& c, const SurfaceState& surface) {
  if (c.constant_viscosity) return *c.constant_viscosity;
  if (c.scheme == SchemeKind::FV1 && c.wall_viscosity == WallViscosity::Molecular) {
    return c.mo.molecular_viscosity;
  }
  return mo_viscosity(surface.delta_a, surface, c.mo);
}

RealVector momentum_viscosity(const ColumnState& s, const SimulationConfig& c) {
  const Eigen::Index n = s.mesh.num_cells();
  RealVector k = c.constant_viscosity ? RealVector::Constant(n + 1, *c.constant_viscosity) : s.tke.k_u;
  if (c.bottom == BottomBoundary::SurfaceLayer) {
    k[0] = wall_viscosity(c, s.surface);
  }
  if (c.top == TopBoundary::ZeroFlux) {
    k[n] = 0.0;
  }
  return k;
}

RealVector heat_diffusivity(const ColumnState& s, const SimulationConfig& c) {
  const Eigen::Index n = s.mesh.num_cells();
  RealVector k =
      c.constant_viscosity ? RealVector::Constant(n + 1, *c.constant_viscosity) : s.tke.k_theta;
  if (c.bottom == BottomBoundary::SurfaceLayer && !c.constant_viscosity) {
    k[0] = mo_heat_diffusivity(s.surface.delta_a, s.surface, c.mo);
  }
  k[n] = 0.0;  // insulated top
  return k;
}

template <typename Scalar>
struct Solved {
  Vector<Scalar> mean;
  Vector<Scalar> phi;
  double solve_residual = 0.0;
};

// Finite-volume implicit step of  (1 + i f dt) u - dt/h (K phi)| = u^n + i f dt u_G
// combined with the compact relation; `rotation` is i f dt (zero for temperature).
template <typename Scalar>
Solved<Scalar> solve_fv(const ColumnMesh& mesh, const Vector<Scalar>& previous, const RealVector& k,
                        double dt, const Scalar& rotation, const Scalar& forcing,
                        const BoundaryRow<Scalar>& bottom, const BoundaryRow<Scalar>& top) {
  const Eigen::Index n = mesh.num_cells();
  const Scalar denom = Scalar(1.0) + rotation;
  AffineMeans<Scalar> means;
  means.offset = (previous.array() + rotation * forcing) / denom;
  means.gain = (dt / mesh.sizes.array()).template cast<Scalar>() / denom;
  means.diffusivity = k;
  const auto sys = assemble_compact_system(mesh.sizes, means, bottom, top);
  Solved<Scalar> out;
  out.phi = solve_tridiagonal(sys);
  out.solve_residual = sys.relative_residual(out.phi).maxCoeff();
  out.mean = means.means(out.phi);
  (void)n;
  return out;
}

// Point-value finite-difference step; surface flux is `drag * u_0`, the wall flux of a
// no-slip bottom uses half a cell.
template <typename Scalar>
Solved<Scalar> solve_fd(const ColumnMesh& mesh, const Vector<Scalar>& previous, const RealVector& k,
                        double dt, const Scalar& rotation, const Scalar& forcing,
                        BottomBoundary bottom_kind, double drag, const Scalar& surface_value,
                        const std::optional<Scalar>& top_value) {
  const Eigen::Index n = mesh.num_cells();
  const RealVector& h = mesh.sizes;
  TridiagonalSystem<Scalar> sys(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    sys.diag[j] = Scalar(1.0) + rotation;
    sys.rhs[j] = previous[j] + rotation * forcing;
  }
  for (Eigen::Index j = 1; j < n; ++j) {
    const double g = dt * k[j] / (mesh.centers[j] - mesh.centers[j - 1]);
    sys.diag[j] += g / h[j];
    sys.lower[j] -= g / h[j];
    sys.diag[j - 1] += g / h[j - 1];
    sys.upper[j - 1] -= g / h[j - 1];
  }
  double wall = 0.0;
  if (bottom_kind == BottomBoundary::SurfaceLayer) {
    wall = drag;
  } else if (bottom_kind == BottomBoundary::NoSlip) {
    wall = k[0] / (0.5 * h[0]);
  }
  sys.diag[0] += dt * wall / h[0];
  sys.rhs[0] += dt * wall / h[0] * surface_value;
  double top_g = 0.0;
  if (top_value) {
    top_g = k[n] / (0.5 * h[n - 1]);
    sys.diag[n - 1] += dt * top_g / h[n - 1];
    sys.rhs[n - 1] += dt * top_g / h[n - 1] * *top_value;
  }
  Solved<Scalar> out;
  out.mean = solve_tridiagonal(sys);
  out.solve_residual = sys.relative_residual(out.mean).maxCoeff();
  out.phi = Vector<Scalar>::Zero(n + 1);
  for (Eigen::Index j = 1; j < n; ++j) {
    out.phi[j] = (out.mean[j] - out.mean[j - 1]) / (mesh.centers[j] - mesh.centers[j - 1]);
  }
  if (k[0] > 0.0) {
    out.phi[0] = wall * (out.mean[0] - surface_value) / k[0];
  }
  if (top_value) {
    out.phi[n] = (*top_value - out.mean[n - 1]) / (0.5 * h[n - 1]);
  }
  return out;
}

template <typename Scalar>
double budget_residual(const ColumnMesh& mesh, const Vector<Scalar>& before, const Vector<Scalar>& after,
                       double dt, const Scalar& rotation_rate, const Scalar& forcing,
                       const Scalar& top_flux, const Scalar& surface_flux) {
  Scalar lhs{};
  double scale = std::abs(top_flux) + std::abs(surface_flux);
  for (Eigen::Index m = 0; m < mesh.num_cells(); ++m) {
    const double h = mesh.sizes[m];
    lhs += h * (after[m] - before[m]) / dt + rotation_rate * h * (after[m] - forcing);
    scale += h * (std::abs(after[m]) + std::abs(before[m])) / dt;
  }
  return std::abs(lhs - (top_flux - surface_flux)) / scale;
}

}  // namespace

double evaluation_height(const ColumnState& s, const SimulationConfig& c) {
  return uses_subcell(c) ? s.mesh.bottom() : s.mesh.centers[0];
}

Complex wind_at_evaluation(const ColumnState& s, const SimulationConfig& c) {
  return value_at_evaluation<Complex>(s, c, s.u, s.phi_u);
}

ColumnState initial_state(const SimulationConfig& c) {
  c.validate();
  ColumnState s;
  s.mesh = computational_mesh(c);
  const Eigen::Index n = s.mesh.num_cells();
  s.u = ComplexVector::Constant(n, c.u_initial);
  s.phi_u = ComplexVector::Zero(n + 1);
  if (c.stratified()) {
    s.theta.resize(n);
    for (Eigen::Index m = 0; m < n; ++m) {
      s.theta[m] = is_fd(c) ? c.theta_initial.at(s.mesh.centers[m])
                            : c.theta_initial.average(s.mesh.interfaces[m], s.mesh.interfaces[m + 1]);
    }
    if (is_fd(c)) {
      s.phi_theta = RealVector::Zero(n + 1);
      for (Eigen::Index j = 1; j < n; ++j) {
        s.phi_theta[j] = (s.theta[j] - s.theta[j - 1]) / (s.mesh.centers[j] - s.mesh.centers[j - 1]);
      }
    } else {
      s.phi_theta = compact_derivatives<double>(
          s.mesh.sizes, s.theta,
          BoundaryRow<double>::derivative(c.theta_initial.slope(s.mesh.bottom())),
          BoundaryRow<double>::derivative(c.theta_initial.slope(s.mesh.interfaces[n])));
    }
    s.theta_surface = c.surface_theta.at(0.0);
  } else {
    s.theta = RealVector::Zero(n);
    s.phi_theta = RealVector::Zero(n + 1);
  }
  SurfaceState seed;
  seed.delta_a = c.effective_delta_a();
  seed.u_star = c.mo.u_star_floor;
  const Complex u0 = c.u_initial;
  seed.e_tau = std::abs(u0) > 0.0 ? u0 / std::abs(u0) : Complex(1.0, 0.0);
  s.surface = surface_from(s, c, s.u, s.phi_u, s.theta, s.phi_theta, s.theta_surface, seed);
  s.tke = initial_tke(s.mesh, s.surface, c.closure, c.mo);
  return s;
}

ColumnState step(const ColumnState& state, const SimulationConfig& c, StepDiagnostics* diagnostics) {
  const ColumnMesh& mesh = state.mesh;
  const Eigen::Index n = mesh.num_cells();
  const double dt = c.dt;
  const Complex rotation(0.0, c.coriolis * dt);
  const Complex rotation_rate(0.0, c.coriolis);
  const double t_next = state.time + dt;
  StepDiagnostics diag;

  ColumnState next = state;
  next.time = t_next;
  next.step_index = state.step_index + 1;

  // Momentum.
  const RealVector k_u = momentum_viscosity(state, c);
  const double z_eval = evaluation_height(state, c);
  SurfaceState coupling_surface = state.surface;
  double eval_magnitude = std::abs(wind_at_evaluation(state, c));
  double dtheta_prev = 0.0;
  if (c.stratified() && c.bottom == BottomBoundary::SurfaceLayer) {
    dtheta_prev = value_at_evaluation<double>(state, c, state.theta, state.phi_theta) - state.theta_surface;
  }
  Solved<Complex> mom;
  SurfaceCoupling coupling;
  for (int it = 0; it < c.sub_iterations; ++it) {
    coupling = boundary_row(c.scheme, coupling_surface, mesh.sizes[0], eval_magnitude, k_u[0], z_eval, c.mo);
    if (is_fd(c)) {
      std::optional<Complex> top;
      if (c.top == TopBoundary::Geostrophic) top = c.u_geostrophic;
      mom = solve_fd<Complex>(mesh, state.u, k_u, dt, rotation, c.u_geostrophic, c.bottom, coupling.drag,
                              Complex(0.0), top);
    } else {
      BoundaryRow<Complex> bottom = coupling.row;
      if (c.bottom == BottomBoundary::NoSlip) {
        bottom = BoundaryRow<Complex>::bottom_value(mesh.sizes[0], Complex(0.0));
      } else if (c.bottom == BottomBoundary::FluxFree) {
        bottom = BoundaryRow<Complex>::derivative(Complex(0.0));
      }
      const BoundaryRow<Complex> top = c.top == TopBoundary::Geostrophic
                                           ? BoundaryRow<Complex>::top_value(mesh.sizes[n - 1], c.u_geostrophic)
                                           : BoundaryRow<Complex>::derivative(Complex(0.0));
      mom = solve_fv<Complex>(mesh, state.u, k_u, dt, rotation, c.u_geostrophic, bottom, top);
    }
    if (it + 1 < c.sub_iterations && c.bottom == BottomBoundary::SurfaceLayer) {
      const Complex provisional = value_at_evaluation<Complex>(state, c, mom.mean, mom.phi);
      coupling_surface = bulk(provisional, dtheta_prev, z_eval, c.mo, state.surface);
      coupling_surface.delta_a = state.surface.delta_a;
      eval_magnitude = std::abs(provisional);
    }
  }
  next.u = mom.mean;
  next.phi_u = mom.phi;
  diag.solve_residual = mom.solve_residual;
  diag.surface_flux = k_u[0] * mom.phi[0];
  if (is_fd(c) && c.bottom == BottomBoundary::SurfaceLayer) {
    diag.surface_flux = coupling.drag * mom.mean[0];
  }
  diag.top_flux = k_u[n] * mom.phi[n];
  diag.budget_residual = budget_residual<Complex>(mesh, state.u, next.u, dt, rotation_rate,
                                                  c.u_geostrophic, diag.top_flux, diag.surface_flux);
  if (c.bottom == BottomBoundary::SurfaceLayer && !is_fd(c)) {
    const Complex at_eval = value_at_evaluation<Complex>(state, c, next.u, next.phi_u);
    const Complex expected = coupling.drag * at_eval;
    diag.flux_row_residual =
        std::abs(k_u[0] * next.phi_u[0] - expected) / std::max(std::abs(expected), 1e-300);
  }

  // Temperature.
  if (c.stratified()) {
    next.theta_surface = c.surface_theta.at(t_next);
    const RealVector k_t = heat_diffusivity(state, c);
    const double top_slope = c.theta_initial.slope(mesh.interfaces[n]);
    Solved<double> heat;
    if (is_fd(c)) {
      const double ch = c.bottom == BottomBoundary::SurfaceLayer
                            ? heat_transfer_coefficient(state.surface, z_eval, c.mo)
                            : 0.0;
      heat = solve_fd<double>(mesh, state.theta, k_t, dt, 0.0, 0.0, c.bottom, ch, next.theta_surface,
                              std::nullopt);
      heat.phi[n] = top_slope;
    } else {
      BoundaryRow<double> bottom = BoundaryRow<double>::derivative(0.0);
      if (c.bottom == BottomBoundary::SurfaceLayer) {
        bottom = heat_boundary_row(c.scheme, state.surface, mesh.sizes[0], k_t[0], z_eval,
                                   next.theta_surface, c.mo);
      }
      heat = solve_fv<double>(mesh, state.theta, k_t, dt, 0.0, 0.0, bottom,
                              BoundaryRow<double>::derivative(top_slope));
    }
    next.theta = heat.mean;
    next.phi_theta = heat.phi;
  }

  // Surface layer, then turbulence.
  next.surface = surface_from(next, c, next.u, next.phi_u, next.theta, next.phi_theta,
                              next.theta_surface, state.surface);
  if (uses_subcell(c)) {
    const Complex spline_value = value_at_evaluation<Complex>(next, c, next.u, next.phi_u);
    const Complex mo_value = mo_profile_u(next.surface.delta_a, next.surface, c.mo);
    diag.continuity_mismatch =
        std::abs(spline_value - mo_value) / std::max(std::abs(spline_value), c.mo.u_star_floor);
  }
  if (!c.constant_viscosity) {
    const RealVector shear2 = next.phi_u.cwiseAbs2();
    const RealVector n2 = c.stratified() ? RealVector((c.mo.gravity / c.mo.theta_ref) * next.phi_theta)
                                         : RealVector::Zero(n + 1);
    next.tke = step_tke(state.tke, shear2, n2, dt, mesh, next.surface, c.closure, c.mo);
  }

  if (!next.u.allFinite() || !next.theta.allFinite() || !next.phi_u.allFinite()) {
    throw NumericsError("non-finite state at step " + std::to_string(next.step_index));
  }
  if (diagnostics != nullptr) {
    *diagnostics = diag;
  }
  return next;
}

ComplexVector full_grid_wind(const ColumnState& s, const SimulationConfig& c) {
  if (!uses_subcell(c)) {
    return s.u;
  }
  const VerticalGrid& g = c.grid;
  ComplexVector out(g.num_cells());
  const Eigen::Index k = s.mesh.parent_offset;
  for (Eigen::Index m = 0; m < k; ++m) {
    out[m] = mo_average_u(g.interface(m), g.interface(m + 1), s.surface, c.mo);
  }
  const double delta = s.mesh.bottom();
  const double zk = g.interface(k);
  if (delta > zk) {
    out[k] = (s.mesh.sizes[0] * s.u[0] + (delta - zk) * mo_average_u(zk, delta, s.surface, c.mo)) /
             g.cell_sizes()[k];
  } else {
    out[k] = s.u[0];
  }
  out.tail(s.mesh.num_cells() - 1) = s.u.tail(s.mesh.num_cells() - 1);
  return out;
}

RealVector full_grid_theta(const ColumnState& s, const SimulationConfig& c) {
  if (!uses_subcell(c) || !c.stratified()) {
    if (uses_subcell(c)) {
      RealVector out = RealVector::Zero(c.grid.num_cells());
      out.tail(s.mesh.num_cells()) = s.theta;
      return out;
    }
    return s.theta;
  }
  const VerticalGrid& g = c.grid;
  RealVector out(g.num_cells());
  const Eigen::Index k = s.mesh.parent_offset;
  const double ts = s.theta_surface;
  for (Eigen::Index m = 0; m < k; ++m) {
    out[m] = ts + mo_average_theta(g.interface(m), g.interface(m + 1), s.surface, c.mo);
  }
  const double delta = s.mesh.bottom();
  const double zk = g.interface(k);
  if (delta > zk) {
    out[k] = (s.mesh.sizes[0] * s.theta[0] +
              (delta - zk) * (ts + mo_average_theta(zk, delta, s.surface, c.mo))) /
             g.cell_sizes()[k];
  } else {
    out[k] = s.theta[0];
  }
  out.tail(s.mesh.num_cells() - 1) = s.theta.tail(s.mesh.num_cells() - 1);
  return out;
}

SimulationResult integrate(const SimulationConfig& config, const std::vector<double>& snapshot_times) {
  const long steps = std::lround(config.duration / config.dt);
  SimulationResult r;
  r.times.resize(steps + 1);
  r.u_star.resize(steps + 1);
  ColumnState state = initial_state(config);
  r.times[0] = 0.0;
  r.u_star[0] = state.surface.u_star;

  std::vector<long> snapshot_steps;
  for (double t : snapshot_times) {
    snapshot_steps.push_back(std::clamp(std::lround(t / config.dt), 0L, steps));
  }
  auto snapshot = [&](const ColumnState& s) {
    r.snapshots.push_back(ProfileSnapshot{s.time, full_grid_wind(s, config), full_grid_theta(s, config)});
  };
  auto wants = [&](long k) { return std::find(snapshot_steps.begin(), snapshot_steps.end(), k) != snapshot_steps.end(); };
  if (wants(0)) snapshot(state);

  for (long k = 1; k <= steps; ++k) {
    StepDiagnostics d;
    state = step(state, config, &d);
    r.times[k] = state.time;
    r.u_star[k] = state.surface.u_star;
    r.max_budget_residual = std::max(r.max_budget_residual, d.budget_residual);
    r.max_flux_row_residual = std::max(r.max_flux_row_residual, d.flux_row_residual);
    r.max_continuity_mismatch = std::max(r.max_continuity_mismatch, d.continuity_mismatch);
    r.max_solve_residual = std::max(r.max_solve_residual, d.solve_residual);
    if (!state.surface.bulk_converged) ++r.bulk_failures;
    if (wants(k) && k != steps) snapshot(state);
  }
  snapshot(state);
  r.final_state = std::move(state);
  return r;
}

}  // namespace ekman
