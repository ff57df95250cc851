#pragma once

#include <optional>
#include <vector>

#include "ekman/closure.hpp"
#include "ekman/grid.hpp"
#include "ekman/spline_fv.hpp"
#include "ekman/surface_layer.hpp"
#include "ekman/types.hpp"

namespace ekman {

enum class Stratification { Neutral, Stable, Unstable };
enum class TopBoundary { ZeroFlux, Geostrophic };
/// SurfaceLayer uses the configured scheme; the other two bypass the bulk routine.
enum class BottomBoundary { SurfaceLayer, NoSlip, FluxFree };
/// Viscosity multiplying phi_0 in the FV1 wall row.
enum class WallViscosity { SurfaceLayerTop, Molecular };

/// theta(z) = base + lapse_rate * max(0, z - mixed_height).
struct ThetaProfile {
  double base = 280.0;
  double mixed_height = 0.0;
  double lapse_rate = 0.0;

  double at(double z) const;
  double average(double lo, double hi) const;
  double slope(double z) const;
};

/// theta_s(t) = base + trend * t - amplitude * cos(2 pi t / period).
struct SurfaceForcing {
  double base = 280.0;
  double trend = 0.0;
  double amplitude = 0.0;
  double period = 86400.0;

  double at(double t) const;
};

struct SimulationConfig {
  double coriolis = 1e-4;
  Complex u_geostrophic{8.0, 0.0};
  double dt = 30.0;
  double duration = 86400.0;
  SchemeKind scheme = SchemeKind::FVfree;
  /// Surface-layer height for FVfree; other schemes derive it from the grid.
  std::optional<double> delta_a;
  VerticalGrid grid = build_uniform(2, 2.0);
  Stratification stratification = Stratification::Neutral;
  TopBoundary top = TopBoundary::ZeroFlux;
  BottomBoundary bottom = BottomBoundary::SurfaceLayer;
  WallViscosity wall_viscosity = WallViscosity::SurfaceLayerTop;
  MOParameters mo;
  ClosureConstants closure;
  /// Bypasses the TKE closure with K_u = K_theta = value everywhere.
  std::optional<double> constant_viscosity;
  Complex u_initial{8.0, 0.0};
  ThetaProfile theta_initial;
  SurfaceForcing surface_theta;
  int sub_iterations = 1;

  bool stratified() const { return stratification != Stratification::Neutral; }
  /// Surface-layer height actually used by the scheme on `grid`.
  double effective_delta_a() const;
  void validate() const;
};

struct ColumnState {
  ColumnMesh mesh;       // computational cells (above delta_a for FV2/FVfree)
  ComplexVector u;       // cell averages (point values for FD)
  ComplexVector phi_u;
  RealVector theta;
  RealVector phi_theta;
  SurfaceState surface;
  TkeState tke;
  double theta_surface = 0.0;
  double time = 0.0;
  long step_index = 0;
};

struct StepDiagnostics {
  /// |telescoped momentum budget| / momentum scale.
  double budget_residual = 0.0;
  /// Residual of the surface flux row after the solve.
  double flux_row_residual = 0.0;
  /// |MO profile - spline| at delta_a over |u(delta_a)| (FV2/FVfree only).
  double continuity_mismatch = 0.0;
  /// Worst relative row residual of the momentum solve.
  double solve_residual = 0.0;
  Complex surface_flux{};
  Complex top_flux{};
};

ColumnState initial_state(const SimulationConfig& config);

/// One implicit Euler step: momentum, then temperature, then bulk, then TKE.
ColumnState step(const ColumnState& state, const SimulationConfig& config,
                 StepDiagnostics* diagnostics = nullptr);

/// Spline (or FD point) wind at the bulk sampling height.
Complex wind_at_evaluation(const ColumnState& state, const SimulationConfig& config);
double evaluation_height(const ColumnState& state, const SimulationConfig& config);

/// Averages over every cell of config.grid, the surface-layer part reconstructed
/// with the MO profiles.
ComplexVector full_grid_wind(const ColumnState& state, const SimulationConfig& config);
RealVector full_grid_theta(const ColumnState& state, const SimulationConfig& config);

struct ProfileSnapshot {
  double time = 0.0;
  ComplexVector wind;
  RealVector theta;
};

struct SimulationResult {
  RealVector times;    // t = 0 then after every step
  RealVector u_star;
  std::vector<ProfileSnapshot> snapshots;
  ColumnState final_state;
  double max_budget_residual = 0.0;
  double max_flux_row_residual = 0.0;
  double max_continuity_mismatch = 0.0;
  double max_solve_residual = 0.0;
  int bulk_failures = 0;
};

/// duration/dt steps; snapshots at the requested times (rounded to steps) and at the end.
SimulationResult integrate(const SimulationConfig& config,
                           const std::vector<double>& snapshot_times = {});

}  // namespace ekman
