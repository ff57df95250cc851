// Command-line driver: single simulations, consistency experiments, the wall
// viscosity diagnostic and the compact-scheme convergence table.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "ekman/config.hpp"
#include "ekman/harness.hpp"
#include "ekman/k0_diagnostic.hpp"

#include <nlohmann/json.hpp>

namespace fs = std::filesystem;
using namespace ekman;

namespace {

enum ExitCode { kOk = 0, kOther = 1, kConfig = 2, kNumerics = 3, kIo = 4 };

struct Options {
  std::string config;
  std::string out = "out";
  std::string case_name;
  std::string schemes;
  std::string scheme;
  std::optional<double> dt;
  std::optional<double> duration;
};

void set_log_level() {
  if (const char* env = std::getenv("EKMAN_LOG_LEVEL")) {
    spdlog::set_level(spdlog::level::from_str(env));
  } else {
    spdlog::set_level(spdlog::level::info);
  }
}

std::vector<SchemeKind> parse_scheme_list(const std::string& list) {
  std::vector<SchemeKind> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(parse_scheme(item));
  }
  if (out.empty()) throw ConfigError("--schemes is empty");
  return out;
}

ExperimentConfig resolve_setup(const Options& o, std::optional<ExperimentCase> kase) {
  ExperimentConfig e;
  if (!o.config.empty()) {
    e = load_experiment_config(o.config);
  } else if (kase) {
    e = default_experiment(*kase, EKMAN_DATA_DIR);
  } else {
    throw ConfigError("either --config or --case is required");
  }
  if (o.dt) e.base.dt = *o.dt;
  if (o.duration) e.base.duration = *o.duration;
  if (!o.schemes.empty()) e.schemes = parse_scheme_list(o.schemes);
  if (!o.scheme.empty()) e.base.scheme = parse_scheme(o.scheme);
  e.base.validate();
  return e;
}

std::string num(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10e", x);
  return buf;
}

int simulate(const Options& o) {
  const ExperimentConfig e = resolve_setup(o, std::nullopt);
  SimulationConfig c = e.base;
  if (c.scheme == SchemeKind::FVfree && !c.delta_a) c.delta_a = c.grid.centers()[0];
  spdlog::info("simulate {} / {} on {} cells, {} steps", to_string(e.experiment), to_string(c.scheme),
               c.grid.num_cells(), std::lround(c.duration / c.dt));
  const SimulationResult r = integrate(c);
  fs::create_directories(o.out);
  const std::string scheme(to_string(c.scheme));
  const std::string prefix = std::string(to_string(e.experiment)) + "_" + scheme + "_";
  {
    std::ofstream out(fs::path(o.out) / (prefix + "ustar.csv"));
    if (!out) throw IoError("cannot write to " + o.out);
    out << "time_s,scheme,resolution,value\n";
    for (Eigen::Index k = 0; k < r.times.size(); ++k) {
      out << num(r.times[k]) << ',' << scheme << ",low," << num(r.u_star[k]) << '\n';
    }
  }
  {
    std::ofstream out(fs::path(o.out) / (prefix + "profile.csv"));
    if (!out) throw IoError("cannot write to " + o.out);
    out << "z_m,scheme,resolution,value\n";
    const auto& snap = r.snapshots.back();
    for (Eigen::Index m = 0; m < snap.wind.size(); ++m) {
      out << num(c.grid.centers()[m]) << ',' << scheme << ",low," << num(std::abs(snap.wind[m])) << '\n';
    }
  }
  spdlog::info("final u* = {:.6f} m/s, max budget residual {:.3e}", r.u_star[r.u_star.size() - 1],
               r.max_budget_residual);
  return kOk;
}

int experiment(const Options& o) {
  std::vector<ExperimentConfig> setups;
  if (!o.config.empty()) {
    setups.push_back(resolve_setup(o, std::nullopt));
  } else if (o.case_name.empty() || o.case_name == "all") {
    for (auto k : {ExperimentCase::Neutral, ExperimentCase::Stable, ExperimentCase::Unstable}) {
      setups.push_back(resolve_setup(o, k));
    }
  } else {
    setups.push_back(resolve_setup(o, parse_case(o.case_name)));
  }
  for (const auto& s : setups) {
    spdlog::info("experiment {}: {} schemes, {} -> {} cells", to_string(s.experiment), s.schemes.size(),
                 s.base.grid.num_cells(), s.base.grid.num_cells() * s.refine_factor);
  }
  const auto reports = run_all(setups, o.out);
  int failures = 0;
  for (const auto& r : reports) {
    for (const auto& s : r.schemes) {
      if (s.failed) {
        spdlog::error("{} / {} failed: {}", to_string(r.experiment), to_string(s.scheme), s.error);
        ++failures;
      } else {
        spdlog::info("{:>8} {:>6}: u* diff t0 {:.3e} mean {:.3e}; median speed diff < {} m {:.3e}",
                     to_string(r.experiment), to_string(s.scheme), s.initial_u_star_difference,
                     s.time_mean_u_star_difference, r.near_surface_height, s.median_near_surface);
      }
    }
  }
  return failures == 0 ? kOk : kNumerics;
}

int diagnose_k0(const Options& o) {
  const ExperimentConfig e = resolve_setup(o, ExperimentCase::Neutral);
  const K0Report r = k0_pathology_diagnostic(e.base);
  nlohmann::ordered_json j;
  j["k_molecular"] = r.k_molecular;
  j["k_replaced"] = r.k_replaced;
  j["abs_u_z1_molecular"] = std::abs(r.u_z1_molecular);
  j["abs_u_z1_replaced"] = std::abs(r.u_z1_replaced);
  j["inflation"] = r.inflation;
  j["peak_abs_u_z1_molecular"] = r.peak_molecular;
  j["peak_abs_u_z1_replaced"] = r.peak_replaced;
  j["u_star_molecular"] = r.u_star_molecular;
  j["u_star_replaced"] = r.u_star_replaced;
  j["abs_term_molecular"] = std::abs(r.term_molecular);
  j["abs_term_replaced"] = std::abs(r.term_replaced);
  j["term_ratio"] = std::abs(r.term_molecular) / std::abs(r.term_replaced);
  j["molecular_steps"] = r.molecular_steps;
  j["molecular_finite"] = r.molecular_finite;
  fs::create_directories(o.out);
  std::ofstream out(fs::path(o.out) / "k0_diagnostic.json");
  if (!out) throw IoError("cannot write to " + o.out);
  out << j.dump(2) << '\n';
  std::cout << j.dump(2) << '\n';
  return kOk;
}

int convergence(const Options& o) {
  const std::vector<int> cells{16, 32, 64, 128};
  const auto rows = compact_convergence(400.0, 50.0, cells);
  fs::create_directories(o.out);
  std::ofstream out(fs::path(o.out) / "convergence.csv");
  if (!out) throw IoError("cannot write to " + o.out);
  out << "cells,max_error,order\n";
  for (const auto& r : rows) {
    out << r.cells << ',' << num(r.max_error) << ',' << num(r.order) << '\n';
    std::cout << r.cells << " cells: max |phi - du/dz| = " << num(r.max_error) << ", order " << r.order
              << '\n';
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  set_log_level();
  CLI::App app{"1D Ekman-layer column with finite-volume surface-layer schemes"};
  app.require_subcommand(1);
  Options o;

  auto* sim = app.add_subcommand("simulate", "Run one simulation and write u* and profile CSVs");
  sim->add_option("--config", o.config, "Experiment config file")->required();
  sim->add_option("--scheme", o.scheme, "Surface scheme: fd, fv1, fv2, fvfree");

  auto* exp = app.add_subcommand("experiment", "Low- vs high-resolution consistency experiment");
  exp->add_option("--config", o.config, "Experiment config file");
  exp->add_option("--case", o.case_name, "neutral, stable, unstable or all");
  exp->add_option("--schemes", o.schemes, "Comma separated schemes");

  auto* k0 = app.add_subcommand("diagnose-k0", "Molecular vs surface-layer wall viscosity in FV1");
  k0->add_option("--config", o.config, "Experiment config file");

  auto* conv = app.add_subcommand("convergence", "Order of the compact derivative relation");

  for (auto* sub : {sim, exp, k0, conv}) {
    sub->add_option("--out", o.out, "Output directory")->capture_default_str();
  }
  for (auto* sub : {sim, exp, k0}) {
    sub->add_option("--dt", o.dt, "Time step [s]");
    sub->add_option("--duration", o.duration, "Simulated time [s]");
  }

  CLI11_PARSE(app, argc, argv);
  try {
    if (*sim) return simulate(o);
    if (*exp) return experiment(o);
    if (*k0) return diagnose_k0(o);
    if (*conv) return convergence(o);
  } catch (const ConfigError& e) {
    spdlog::error("config error: {}", e.what());
    return kConfig;
  } catch (const IoError& e) {
    spdlog::error("io error: {}", e.what());
    return kIo;
  } catch (const DomainError& e) {
    spdlog::error("config error: {}", e.what());
    return kConfig;
  } catch (const Error& e) {
    spdlog::error("numerics error: {}", e.what());
    return kNumerics;
  } catch (const std::filesystem::filesystem_error& e) {
    spdlog::error("io error: {}", e.what());
    return kIo;
  }
  return kOther;
}
