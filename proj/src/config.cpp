#include "ekman/config.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace ekman {

namespace {

namespace pt = boost::property_tree;

double to_number(const std::string& key, const std::string& value) {
  std::size_t used = 0;
  double x = 0.0;
  try {
    x = std::stod(value, &used);
  } catch (const std::exception&) {
    throw ConfigError("config key '" + key + "': '" + value + "' is not a number");
  }
  if (used != value.size()) {
    throw ConfigError("config key '" + key + "': '" + value + "' is not a number");
  }
  return x;
}

int to_int(const std::string& key, const std::string& value) {
  const double x = to_number(key, value);
  if (x != static_cast<int>(x)) {
    throw ConfigError("config key '" + key + "': expected an integer");
  }
  return static_cast<int>(x);
}

struct GridSpec {
  std::string type;
  std::string file;
  int cells = 0;
  double height = 0.0;
  int uniform_cells = 0;
  double uniform_size = 0.0;
  int stretched_cells = 0;
  double top = 0.0;
};

using Setter = std::function<void(const std::string& key, const std::string& value)>;

}  // namespace

ExperimentConfig parse_experiment_config(std::string_view text, const std::filesystem::path& base_dir,
                                         const std::filesystem::path& data_dir) {
  pt::ptree tree;
  std::istringstream in{std::string(text)};
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError("config line " + std::to_string(e.line()) + ": " + e.message());
  }

  std::string case_name = "neutral";
  if (auto c = tree.get_optional<std::string>("run.case")) {
    case_name = *c;
  }
  ExperimentConfig e = default_experiment(parse_case(case_name), data_dir);
  SimulationConfig& s = e.base;
  GridSpec grid;
  bool grid_given = false;

  auto num = [](double& target) -> Setter {
    return [&target](const std::string& k, const std::string& v) { target = to_number(k, v); };
  };
  auto integer = [](int& target) -> Setter {
    return [&target](const std::string& k, const std::string& v) { target = to_int(k, v); };
  };

  const std::map<std::string, Setter> setters = {
      {"run.case", [](const std::string&, const std::string&) {}},
      {"run.scheme", [&](const std::string&, const std::string& v) { s.scheme = parse_scheme(v); }},
      {"run.schemes",
       [&](const std::string&, const std::string& v) {
         e.schemes.clear();
         std::stringstream ss(v);
         std::string item;
         while (std::getline(ss, item, ',')) {
           const auto b = item.find_first_not_of(" \t");
           const auto t = item.find_last_not_of(" \t");
           if (b != std::string::npos) e.schemes.push_back(parse_scheme(item.substr(b, t - b + 1)));
         }
       }},
      {"run.dt", num(s.dt)},
      {"run.duration", num(s.duration)},
      {"run.coriolis", num(s.coriolis)},
      {"run.ug_real", [&](const std::string& k, const std::string& v) { s.u_geostrophic.real(to_number(k, v)); }},
      {"run.ug_imag", [&](const std::string& k, const std::string& v) { s.u_geostrophic.imag(to_number(k, v)); }},
      {"run.top_boundary",
       [&](const std::string& k, const std::string& v) {
         if (v == "zero_flux") s.top = TopBoundary::ZeroFlux;
         else if (v == "geostrophic") s.top = TopBoundary::Geostrophic;
         else throw ConfigError("config key '" + k + "': expected zero_flux or geostrophic");
       }},
      {"run.sub_iterations", integer(s.sub_iterations)},
      {"run.refine_factor", integer(e.refine_factor)},
      {"run.near_surface_height", num(e.near_surface_height)},
      {"grid.type", [&](const std::string&, const std::string& v) { grid.type = v; }},
      {"grid.file", [&](const std::string&, const std::string& v) { grid.file = v; }},
      {"grid.cells", integer(grid.cells)},
      {"grid.height", num(grid.height)},
      {"grid.uniform_cells", integer(grid.uniform_cells)},
      {"grid.uniform_size", num(grid.uniform_size)},
      {"grid.stretched_cells", integer(grid.stretched_cells)},
      {"grid.top", num(grid.top)},
      {"surface.delta_a",
       [&](const std::string& k, const std::string& v) {
         if (v == "auto") s.delta_a.reset();
         else s.delta_a = to_number(k, v);
       }},
      {"surface.kappa", num(s.mo.kappa)},
      {"surface.roughness", num(s.mo.roughness)},
      {"surface.molecular_viscosity", num(s.mo.molecular_viscosity)},
      {"surface.gravity", num(s.mo.gravity)},
      {"surface.theta_ref", num(s.mo.theta_ref)},
      {"surface.u_star_floor", num(s.mo.u_star_floor)},
      {"surface.bulk_tolerance", num(s.mo.bulk_tolerance)},
      {"surface.bulk_max_iterations", integer(s.mo.bulk_max_iterations)},
      {"closure.c_k", num(s.closure.c_k)},
      {"closure.c_eps", num(s.closure.c_eps)},
      {"closure.c_mu", num(s.closure.c_mu)},
      {"closure.e_min", num(s.closure.e_min)},
      {"closure.l_inf", num(s.closure.l_inf)},
      {"closure.wall_factor", num(s.closure.wall_factor)},
      {"closure.prandtl_slope", num(s.closure.prandtl_slope)},
      {"closure.prandtl_max", num(s.closure.prandtl_max)},
      {"initial.u_real", [&](const std::string& k, const std::string& v) { s.u_initial.real(to_number(k, v)); }},
      {"initial.u_imag", [&](const std::string& k, const std::string& v) { s.u_initial.imag(to_number(k, v)); }},
      {"initial.theta", num(s.theta_initial.base)},
      {"initial.mixed_height", num(s.theta_initial.mixed_height)},
      {"initial.lapse_rate", num(s.theta_initial.lapse_rate)},
      {"forcing.surface_theta", num(s.surface_theta.base)},
      {"forcing.surface_trend", num(s.surface_theta.trend)},
      {"forcing.surface_amplitude", num(s.surface_theta.amplitude)},
      {"forcing.surface_period", num(s.surface_theta.period)},
  };

  for (const auto& [section, body] : tree) {
    if (body.empty() && !body.data().empty()) {
      throw ConfigError("config key '" + section + "' must be inside a [section]");
    }
    for (const auto& [key, value] : body) {
      const std::string full = section + "." + key;
      const auto it = setters.find(full);
      if (it == setters.end()) {
        throw ConfigError("unknown config key '" + full + "'");
      }
      if (section == "grid") grid_given = true;
      it->second(full, value.data());
    }
  }

  if (grid_given) {
    if (grid.type == "file") {
      std::filesystem::path p = grid.file;
      if (p.is_relative()) p = base_dir / p;
      s.grid = load_levels(p);
    } else if (grid.type == "uniform") {
      s.grid = build_uniform(grid.cells, grid.height);
    } else if (grid.type == "stretched") {
      s.grid = build_stretched(grid.uniform_cells, grid.uniform_size, grid.stretched_cells, grid.top);
    } else {
      throw ConfigError("config key 'grid.type': expected file, uniform or stretched");
    }
  }
  s.validate();
  if (e.refine_factor < 2) {
    throw ConfigError("config key 'run.refine_factor': must be at least 2");
  }
  return e;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& file,
                                        const std::filesystem::path& data_dir) {
  std::ifstream in(file);
  if (!in) {
    throw IoError("cannot open config " + file.string());
  }
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_experiment_config(buffer.str(), file.parent_path(), data_dir);
}

}  // namespace ekman
