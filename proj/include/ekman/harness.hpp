#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ekman/dynamics.hpp"
#include "ekman/grid.hpp"
#include "ekman/types.hpp"

namespace ekman {

enum class ExperimentCase { Neutral, Stable, Unstable };

std::string_view to_string(ExperimentCase c);
ExperimentCase parse_case(std::string_view name);

/// A low-resolution setup; the high resolution run refines its grid.
struct ExperimentConfig {
  ExperimentCase experiment = ExperimentCase::Neutral;
  SimulationConfig base;
  int refine_factor = 3;
  /// Schemes run by `experiment` when none are requested explicitly.
  std::vector<SchemeKind> schemes{SchemeKind::FD, SchemeKind::FV1, SchemeKind::FV2,
                                  SchemeKind::FVfree};
  /// Upper limit of the band used for near-surface summaries [m].
  double near_surface_height = 200.0;
};

/// Default setups of the three consistency experiments. `data_dir` holds the level file
/// of the neutral case.
ExperimentConfig default_experiment(ExperimentCase c, const std::filesystem::path& data_dir);

/// Size-weighted aggregation of a fine field onto a nested coarse grid.
template <typename Scalar>
CellField<Scalar> project_to_coarse(const VerticalGrid& fine, const VerticalGrid& coarse,
                                    const CellField<Scalar>& field) {
  if (field.size() != fine.num_cells()) {
    throw DomainError("field does not match the fine grid");
  }
  if (!is_nested(fine, coarse)) {
    throw DomainError("grids are not nested");
  }
  const double tol = 1e-9 * fine.top();
  CellField<Scalar> out = CellField<Scalar>::Zero(coarse.num_cells());
  Eigen::Index j = 0;
  for (Eigen::Index m = 0; m < coarse.num_cells(); ++m) {
    Scalar sum{};
    while (j < fine.num_cells() && fine.interface(j + 1) <= coarse.interface(m + 1) + tol) {
      sum += fine.cell_sizes()[j] * field[j];
      ++j;
    }
    out[m] = sum / coarse.cell_sizes()[m];
  }
  return out;
}

/// Pointwise |a - b| / |b|; entries with b == 0 are masked (mask false) and set to NaN.
struct RelativeDifference {
  RealVector value;
  std::vector<bool> valid;

  /// Median over valid entries whose index passes `keep`.
  template <typename Keep>
  double median(Keep&& keep) const;
  double median() const {
    return median([](Eigen::Index) { return true; });
  }
  double max() const;
};

RelativeDifference relative_difference(const RealVector& a, const RealVector& reference);

/// FNV-1a hash of every physics setting except the surface scheme and delta_a.
std::uint64_t physics_hash(const SimulationConfig& config);

struct SchemeReport {
  SchemeKind scheme = SchemeKind::FVfree;
  bool failed = false;
  std::string error;

  double delta_a_low = 0.0;
  double delta_a_high = 0.0;
  std::uint64_t physics_hash_low = 0;
  std::uint64_t physics_hash_high = 0;

  RealVector times;
  RealVector u_star_low;
  RealVector u_star_high;
  RelativeDifference u_star_difference;

  RealVector speed_low;            // |u| on the low-resolution cells, end of run
  RealVector speed_high;           // high resolution projected on the low cells
  RelativeDifference speed_difference;

  double time_mean_u_star_difference = 0.0;
  double initial_u_star_difference = 0.0;
  double median_near_surface = 0.0;
  double max_near_surface = 0.0;

  double max_budget_residual = 0.0;
  double max_continuity_mismatch = 0.0;
  int bulk_failures = 0;
};

struct ConsistencyReport {
  ExperimentCase experiment = ExperimentCase::Neutral;
  VerticalGrid low_grid = build_uniform(2, 2.0);
  VerticalGrid high_grid = build_uniform(2, 2.0);
  double near_surface_height = 200.0;
  std::vector<SchemeReport> schemes;

  const SchemeReport& at(SchemeKind kind) const;
};

/// Low- and high-resolution configurations of `scheme`. FVfree keeps the same
/// delta_a (low-resolution z_{1/2} unless configured) at both resolutions.
std::pair<SimulationConfig, SimulationConfig> resolution_pair(const ExperimentConfig& setup,
                                                              SchemeKind scheme);

SchemeReport run_scheme(const ExperimentConfig& setup, SchemeKind scheme);

ConsistencyReport run_experiment(const ExperimentConfig& setup, std::span<const SchemeKind> schemes);

/// `{case}_{scheme}_{ustar,profile,reldiff}.csv` in `dir`.
void write_report(const ConsistencyReport& report, const std::filesystem::path& dir);

/// Scalar metrics of several reports, with schemes ranked per case by their median
/// near-surface relative difference (ascending).
std::string summary_json(std::span<const ConsistencyReport> reports);

/// Runs every setup, writes all CSVs and `summary.json`.
std::vector<ConsistencyReport> run_all(std::span<const ExperimentConfig> setups,
                                       const std::filesystem::path& dir);

template <typename Keep>
double RelativeDifference::median(Keep&& keep) const {
  std::vector<double> v;
  for (Eigen::Index i = 0; i < value.size(); ++i) {
    if (valid[static_cast<std::size_t>(i)] && keep(i)) v.push_back(value[i]);
  }
  if (v.empty()) {
    throw DomainError("no valid entries for the median");
  }
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (v.size() % 2 == 1) return *mid;
  const double upper = *mid;
  const double lower = *std::max_element(v.begin(), mid);
  return 0.5 * (lower + upper);
}

}  // namespace ekman

namespace ekman {

struct ConvergenceRow {
  int cells = 0;
  double max_error = 0.0;
  double order = 0.0;  // log2 of the error ratio to the previous row (0 for the first)
};

/// Max-norm error of the compact interface derivatives of sin(z / scale) on uniform
/// grids over [0, height], with exact derivative end rows.
std::vector<ConvergenceRow> compact_convergence(double height, double scale,
                                                std::span<const int> cells);

}  // namespace ekman
