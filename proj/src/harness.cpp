#include "ekman/harness.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>

#include <nlohmann/json.hpp>

namespace ekman {

std::string_view to_string(ExperimentCase c) {
  switch (c) {
    case ExperimentCase::Neutral: return "neutral";
    case ExperimentCase::Stable: return "stable";
    case ExperimentCase::Unstable: return "unstable";
  }
  return "?";
}

ExperimentCase parse_case(std::string_view name) {
  if (name == "neutral") return ExperimentCase::Neutral;
  if (name == "stable") return ExperimentCase::Stable;
  if (name == "unstable") return ExperimentCase::Unstable;
  throw ConfigError("unknown experiment case '" + std::string(name) + "'");
}

ExperimentConfig default_experiment(ExperimentCase c, const std::filesystem::path& data_dir) {
  ExperimentConfig e;
  e.experiment = c;
  SimulationConfig& s = e.base;
  s.coriolis = 1e-4;
  s.u_geostrophic = Complex(8.0, 0.0);
  s.u_initial = Complex(8.0, 0.0);
  s.dt = 30.0;
  s.duration = 86400.0;
  switch (c) {
    case ExperimentCase::Neutral:
      s.stratification = Stratification::Neutral;
      s.grid = load_levels(data_dir / "ifs_l137_lowest25.txt");
      break;
    case ExperimentCase::Stable:
      s.stratification = Stratification::Stable;
      s.grid = build_uniform(15, 400.0);
      s.theta_initial = ThetaProfile{265.0, 100.0, 0.01};
      s.surface_theta = SurfaceForcing{265.0, -1.0 / 36000.0, 0.0, 86400.0};
      break;
    case ExperimentCase::Unstable:
      s.stratification = Stratification::Unstable;
      s.grid = build_stretched(50, 10.0, 15, 1080.0);
      s.theta_initial = ThetaProfile{280.0, 0.0, 0.0};
      s.surface_theta = SurfaceForcing{280.0, 0.0, 1.0, 86400.0};
      break;
  }
  return e;
}

double RelativeDifference::max() const {
  double m = 0.0;
  bool any = false;
  for (Eigen::Index i = 0; i < value.size(); ++i) {
    if (valid[static_cast<std::size_t>(i)]) {
      m = std::max(m, value[i]);
      any = true;
    }
  }
  if (!any) throw DomainError("no valid entries");
  return m;
}

RelativeDifference relative_difference(const RealVector& a, const RealVector& reference) {
  if (a.size() != reference.size()) {
    throw DomainError("relative difference of misaligned fields");
  }
  RelativeDifference d;
  d.value.resize(a.size());
  d.valid.assign(static_cast<std::size_t>(a.size()), false);
  bool any = false;
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double ref = std::abs(reference[i]);
    if (ref > 0.0 && std::isfinite(ref) && std::isfinite(a[i])) {
      d.value[i] = std::abs(a[i] - reference[i]) / ref;
      d.valid[static_cast<std::size_t>(i)] = true;
      any = true;
    } else {
      d.value[i] = std::numeric_limits<double>::quiet_NaN();
    }
  }
  if (!any) {
    throw DomainError("reference is zero everywhere");
  }
  return d;
}

namespace {

class Fnv1a {
 public:
  void add(std::string_view s) {
    for (unsigned char ch : s) {
      hash_ ^= ch;
      hash_ *= 1099511628211ull;
    }
  }
  void add(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g;", x);
    add(std::string_view(buf));
  }
  void add(int x) { add(static_cast<double>(x)); }
  std::uint64_t value() const { return hash_; }

 private:
  std::uint64_t hash_ = 1469598103934665603ull;
};

std::string fmt_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10e", x);
  return buf;
}

std::ofstream open_csv(const std::filesystem::path& path, std::string_view header) {
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot write " + path.string());
  }
  out << header << '\n';
  return out;
}

double safe_median(const RelativeDifference& d, const RealVector& z, double band) {
  try {
    return d.median([&](Eigen::Index i) { return z[i] < band; });
  } catch (const DomainError&) {
    return std::numeric_limits<double>::quiet_NaN();
  }
}

}  // namespace

std::uint64_t physics_hash(const SimulationConfig& c) {
  Fnv1a h;
  h.add(c.coriolis);
  h.add(c.u_geostrophic.real());
  h.add(c.u_geostrophic.imag());
  h.add(c.dt);
  h.add(c.duration);
  for (Eigen::Index m = 0; m < c.grid.num_interfaces(); ++m) h.add(c.grid.interface(m));
  h.add(static_cast<int>(c.stratification));
  h.add(static_cast<int>(c.top));
  h.add(static_cast<int>(c.bottom));
  const MOParameters& p = c.mo;
  for (double x : {p.kappa, p.roughness, p.molecular_viscosity, p.gravity, p.theta_ref,
                   p.u_star_floor, p.bulk_tolerance}) {
    h.add(x);
  }
  h.add(p.bulk_max_iterations);
  const ClosureConstants& k = c.closure;
  for (double x : {k.c_k, k.c_eps, k.c_mu, k.e_min, k.l_inf, k.wall_factor, k.prandtl_slope,
                   k.prandtl_max}) {
    h.add(x);
  }
  h.add(c.constant_viscosity ? *c.constant_viscosity : -1.0);
  h.add(c.u_initial.real());
  h.add(c.u_initial.imag());
  for (double x : {c.theta_initial.base, c.theta_initial.mixed_height, c.theta_initial.lapse_rate,
                   c.surface_theta.base, c.surface_theta.trend, c.surface_theta.amplitude,
                   c.surface_theta.period}) {
    h.add(x);
  }
  h.add(c.sub_iterations);
  return h.value();
}

const SchemeReport& ConsistencyReport::at(SchemeKind kind) const {
  for (const auto& s : schemes) {
    if (s.scheme == kind) return s;
  }
  throw DomainError("scheme not present in report");
}

std::pair<SimulationConfig, SimulationConfig> resolution_pair(const ExperimentConfig& setup,
                                                              SchemeKind scheme) {
  SimulationConfig low = setup.base;
  low.scheme = scheme;
  SimulationConfig high = low;
  high.grid = refine(low.grid, setup.refine_factor);
  if (scheme == SchemeKind::FVfree) {
    const double delta = setup.base.delta_a.value_or(low.grid.centers()[0]);
    low.delta_a = delta;
    high.delta_a = delta;
  } else {
    low.delta_a.reset();
    high.delta_a.reset();
  }
  return {low, high};
}

SchemeReport run_scheme(const ExperimentConfig& setup, SchemeKind scheme) {
  SchemeReport r;
  r.scheme = scheme;
  const auto [low, high] = resolution_pair(setup, scheme);
  r.delta_a_low = low.effective_delta_a();
  r.delta_a_high = high.effective_delta_a();
  r.physics_hash_low = physics_hash(low);
  r.physics_hash_high = physics_hash(high);
  try {
    const SimulationResult lo = integrate(low);
    const SimulationResult hi = integrate(high);
    r.times = lo.times;
    r.u_star_low = lo.u_star;
    r.u_star_high = hi.u_star;
    r.u_star_difference = relative_difference(lo.u_star, hi.u_star);
    r.initial_u_star_difference = r.u_star_difference.value[0];
    r.time_mean_u_star_difference = r.u_star_difference.value.mean();

    const ComplexVector wind_low = lo.snapshots.back().wind;
    const ComplexVector wind_high = project_to_coarse<Complex>(high.grid, low.grid, hi.snapshots.back().wind);
    r.speed_low = wind_low.cwiseAbs();
    r.speed_high = wind_high.cwiseAbs();
    r.speed_difference = relative_difference(r.speed_low, r.speed_high);
    r.median_near_surface = safe_median(r.speed_difference, low.grid.centers(), setup.near_surface_height);
    const RealVector& z = low.grid.centers();
    r.max_near_surface = 0.0;
    for (Eigen::Index i = 0; i < z.size(); ++i) {
      if (z[i] < setup.near_surface_height && r.speed_difference.valid[static_cast<std::size_t>(i)]) {
        r.max_near_surface = std::max(r.max_near_surface, r.speed_difference.value[i]);
      }
    }
    r.max_budget_residual = std::max(lo.max_budget_residual, hi.max_budget_residual);
    r.max_continuity_mismatch = std::max(lo.max_continuity_mismatch, hi.max_continuity_mismatch);
    r.bulk_failures = lo.bulk_failures + hi.bulk_failures;
  } catch (const Error& ex) {
    r.failed = true;
    r.error = ex.what();
  }
  return r;
}

ConsistencyReport run_experiment(const ExperimentConfig& setup, std::span<const SchemeKind> schemes) {
  ConsistencyReport report;
  report.experiment = setup.experiment;
  report.low_grid = setup.base.grid;
  report.high_grid = refine(setup.base.grid, setup.refine_factor);
  report.near_surface_height = setup.near_surface_height;
  for (SchemeKind s : schemes) {
    report.schemes.push_back(run_scheme(setup, s));
  }
  return report;
}

void write_report(const ConsistencyReport& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const std::string kase(to_string(report.experiment));
  const RealVector& z = report.low_grid.centers();
  for (const SchemeReport& s : report.schemes) {
    if (s.failed) continue;
    const std::string scheme(to_string(s.scheme));
    const std::string prefix = kase + "_" + scheme + "_";
    {
      auto out = open_csv(dir / (prefix + "ustar.csv"), "time_s,scheme,resolution,value");
      for (Eigen::Index k = 0; k < s.times.size(); ++k) {
        const std::string t = fmt_double(s.times[k]);
        out << t << ',' << scheme << ",low," << fmt_double(s.u_star_low[k]) << '\n';
        out << t << ',' << scheme << ",high," << fmt_double(s.u_star_high[k]) << '\n';
        out << t << ',' << scheme << ",reldiff," << fmt_double(s.u_star_difference.value[k]) << '\n';
      }
    }
    {
      auto out = open_csv(dir / (prefix + "profile.csv"), "z_m,scheme,resolution,value");
      for (Eigen::Index i = 0; i < z.size(); ++i) {
        out << fmt_double(z[i]) << ',' << scheme << ",low," << fmt_double(s.speed_low[i]) << '\n';
        out << fmt_double(z[i]) << ',' << scheme << ",high," << fmt_double(s.speed_high[i]) << '\n';
      }
    }
    {
      auto out = open_csv(dir / (prefix + "reldiff.csv"), "z_m,scheme,resolution,value");
      for (Eigen::Index i = 0; i < z.size(); ++i) {
        if (!s.speed_difference.valid[static_cast<std::size_t>(i)]) continue;  // masked
        out << fmt_double(z[i]) << ',' << scheme << ",reldiff," << fmt_double(s.speed_difference.value[i])
            << '\n';
      }
    }
  }
}

std::string summary_json(std::span<const ConsistencyReport> reports) {
  nlohmann::ordered_json root;
  root["schema_version"] = 1;
  root["masking"] = "levels where the high-resolution wind speed is zero are excluded";
  for (const ConsistencyReport& r : reports) {
    nlohmann::ordered_json c;
    c["low_cells"] = r.low_grid.num_cells();
    c["high_cells"] = r.high_grid.num_cells();
    c["near_surface_height_m"] = r.near_surface_height;
    std::vector<std::pair<double, std::string>> ranking;
    for (const SchemeReport& s : r.schemes) {
      nlohmann::ordered_json j;
      j["failed"] = s.failed;
      if (s.failed) {
        j["error"] = s.error;
      } else {
        j["delta_a_low_m"] = s.delta_a_low;
        j["delta_a_high_m"] = s.delta_a_high;
        j["initial_ustar_reldiff"] = s.initial_u_star_difference;
        j["time_mean_ustar_reldiff"] = s.time_mean_u_star_difference;
        j["median_near_surface_reldiff"] = s.median_near_surface;
        j["max_near_surface_reldiff"] = s.max_near_surface;
        j["max_budget_residual"] = s.max_budget_residual;
        j["max_continuity_mismatch"] = s.max_continuity_mismatch;
        j["bulk_failures"] = s.bulk_failures;
        char hash[24];
        std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(s.physics_hash_high));
        j["physics_hash_high"] = hash;
        ranking.emplace_back(s.median_near_surface, std::string(to_string(s.scheme)));
      }
      c["schemes"][std::string(to_string(s.scheme))] = j;
    }
    std::stable_sort(ranking.begin(), ranking.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    for (const auto& [value, name] : ranking) c["ranking"].push_back(name);
    root["cases"][std::string(to_string(r.experiment))] = c;
  }
  return root.dump(2) + "\n";
}

std::vector<ConsistencyReport> run_all(std::span<const ExperimentConfig> setups,
                                       const std::filesystem::path& dir) {
  std::vector<ConsistencyReport> reports;
  for (const ExperimentConfig& setup : setups) {
    reports.push_back(run_experiment(setup, setup.schemes));
    write_report(reports.back(), dir);
  }
  std::ofstream out(dir / "summary.json");
  if (!out) {
    throw IoError("cannot write summary.json");
  }
  out << summary_json(reports);
  return reports;
}

}  // namespace ekman

#include "ekman/spline_fv.hpp"

namespace ekman {

std::vector<ConvergenceRow> compact_convergence(double height, double scale,
                                                std::span<const int> cells) {
  std::vector<ConvergenceRow> rows;
  for (int n : cells) {
    const VerticalGrid g = build_uniform(n, height);
    RealVector avg(n);
    for (Eigen::Index m = 0; m < n; ++m) {
      const double a = g.interface(m);
      const double b = g.interface(m + 1);
      avg[m] = scale * (std::cos(a / scale) - std::cos(b / scale)) / (b - a);
    }
    const RealVector phi = compact_derivatives<double>(
        g.cell_sizes(), avg, BoundaryRow<double>::derivative(std::cos(0.0) / scale),
        BoundaryRow<double>::derivative(std::cos(height / scale) / scale));
    const RealVector exact = (g.interfaces().array() / scale).cos() / scale;
    ConvergenceRow row{n, (phi - exact).cwiseAbs().maxCoeff(), 0.0};
    if (!rows.empty()) {
      row.order = std::log(rows.back().max_error / row.max_error) /
                  std::log(static_cast<double>(n) / rows.back().cells);
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace ekman
