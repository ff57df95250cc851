#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "ekman/config.hpp"
#include "ekman/harness.hpp"

using namespace ekman;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

ExperimentConfig short_setup(ExperimentCase c, double hours) {
  ExperimentConfig e = default_experiment(c, EKMAN_DATA_DIR);
  e.base.duration = hours * 3600.0;
  return e;
}

}  // namespace

TEST_CASE("projection onto a nested coarse grid") {
  const VerticalGrid coarse = build_uniform(2, 6.0);
  const VerticalGrid fine = refine(coarse, 3);
  RealVector f(6);
  f << 1.0, 2.0, 3.0, 5.0, 5.0, 5.0;
  const RealVector c = project_to_coarse<double>(fine, coarse, f);
  CHECK(c[0] == doctest::Approx(2.0));
  CHECK(c[1] == doctest::Approx(5.0));

  const VerticalGrid base = build_stretched(4, 3.0, 6, 90.0);
  const VerticalGrid fine3 = refine(base, 3);
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  ComplexVector field(fine3.num_cells());
  for (Eigen::Index j = 0; j < field.size(); ++j) field[j] = Complex(u(rng), u(rng));
  const ComplexVector p = project_to_coarse<Complex>(fine3, base, field);
  for (Eigen::Index m = 0; m < base.num_cells(); ++m) {
    Complex integral{};
    for (Eigen::Index j = 0; j < fine3.num_cells(); ++j) {
      const double lo = std::max(fine3.interface(j), base.interface(m));
      const double hi = std::min(fine3.interface(j + 1), base.interface(m + 1));
      if (hi > lo) integral += (hi - lo) * field[j];
    }
    CHECK(std::abs(p[m] - integral / base.cell_sizes()[m]) < 1e-14);
  }
  const ComplexVector constant = ComplexVector::Constant(fine3.num_cells(), Complex(2.0, -1.0));
  CHECK((project_to_coarse<Complex>(fine3, base, constant).array() - Complex(2.0, -1.0)).abs().maxCoeff() < 1e-14);
  CHECK_THROWS_AS(project_to_coarse<double>(base, fine3, RealVector::Zero(base.num_cells())), DomainError);
}

TEST_CASE("relative differences") {
  RealVector b(4);
  b << 1.0, 2.0, 0.0, 4.0;
  const RelativeDifference same = relative_difference(b, b);
  CHECK(same.max() == 0.0);
  const RelativeDifference scaled = relative_difference(1.1 * b, b);
  CHECK_FALSE(scaled.valid[2]);
  CHECK(scaled.max() == doctest::Approx(0.1));
  CHECK(scaled.median() == doctest::Approx(0.1));
  CHECK_THROWS_AS(relative_difference(b, RealVector::Zero(4)), DomainError);
  CHECK_THROWS_AS(relative_difference(b, RealVector::Ones(3)), DomainError);
}

TEST_CASE("resolution pairs share the physics") {
  for (ExperimentCase ec : {ExperimentCase::Neutral, ExperimentCase::Stable, ExperimentCase::Unstable}) {
    const ExperimentConfig e = default_experiment(ec, EKMAN_DATA_DIR);
    std::uint64_t hash_high = 0;
    for (SchemeKind s : {SchemeKind::FD, SchemeKind::FV1, SchemeKind::FV2, SchemeKind::FVfree}) {
      const auto [lo, hi] = resolution_pair(e, s);
      CHECK(hi.grid.num_cells() == 3 * lo.grid.num_cells());
      CHECK(is_nested(hi.grid, lo.grid));
      if (hash_high == 0) hash_high = physics_hash(hi);
      CHECK(physics_hash(hi) == hash_high);
      if (s == SchemeKind::FVfree) {
        CHECK(lo.effective_delta_a() == hi.effective_delta_a());
        CHECK(lo.effective_delta_a() == lo.grid.centers()[0]);
      } else {
        CHECK(hi.effective_delta_a() < lo.effective_delta_a());
      }
    }
  }
}

TEST_CASE("experiment reports and their files") {
  const fs::path dir = fs::temp_directory_path() / "ekman_harness_test";
  fs::remove_all(dir);
  std::vector<ExperimentConfig> setups{short_setup(ExperimentCase::Neutral, 1.0),
                                       short_setup(ExperimentCase::Stable, 1.0),
                                       short_setup(ExperimentCase::Unstable, 1.0)};
  const auto reports = run_all(setups, dir / "a");
  REQUIRE(reports.size() == 3);
  std::size_t count = 0;
  for (const auto& r : reports) {
    for (const auto& s : r.schemes) {
      CHECK_FALSE(s.failed);
      CHECK(s.u_star_difference.value.minCoeff() >= 0.0);
      CHECK(s.max_budget_residual <= 1e-9);
      ++count;
      for (const char* kind : {"ustar", "profile", "reldiff"}) {
        const std::string name = std::string(to_string(r.experiment)) + "_" + std::string(to_string(s.scheme)) + "_" + kind + ".csv";
        CHECK(fs::exists(dir / "a" / name));
      }
    }
  }
  CHECK(count == 12);
  CHECK(fs::exists(dir / "a" / "summary.json"));

  const auto neutral = reports[0];
  CHECK(neutral.at(SchemeKind::FVfree).u_star_difference.value[0] <
        neutral.at(SchemeKind::FV1).u_star_difference.value[0]);

  run_all(setups, dir / "b");
  for (const auto& entry : fs::directory_iterator(dir / "a")) {
    CHECK(slurp(entry.path()) == slurp(dir / "b" / entry.path().filename()));
  }
  const std::string header = slurp(dir / "a" / "neutral_fvfree_ustar.csv").substr(0, 34);
  CHECK(header.rfind("time_s,scheme,resolution,value", 0) == 0);
}

TEST_CASE("compact convergence rows") {
  const std::vector<int> cells{16, 32, 64};
  const auto rows = compact_convergence(400.0, 50.0, cells);
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].order == 0.0);
  CHECK(rows[2].max_error < rows[1].max_error);
}

TEST_CASE("experiment config files") {
  const fs::path base = EKMAN_CONFIG_DIR;
  for (const char* name : {"neutral", "stable", "unstable"}) {
    const ExperimentConfig parsed = load_experiment_config(base / (std::string(name) + ".cfg"));
    const ExperimentConfig defaults = default_experiment(parse_case(name), EKMAN_DATA_DIR);
    CAPTURE(name);
    CHECK(parsed.experiment == defaults.experiment);
    CHECK(physics_hash(parsed.base) == physics_hash(defaults.base));
    CHECK(parsed.base.grid == defaults.base.grid);
    CHECK(parsed.base.dt == 30.0);
    CHECK(parsed.base.u_geostrophic == Complex(8.0, 0.0));
    CHECK(parsed.refine_factor == 3);
  }

  CHECK_THROWS_AS(parse_experiment_config("[run]\ncase = neutral\ndtt = 30\n", base), ConfigError);
  try {
    parse_experiment_config("[run]\ncase = stable\n[surface]\nroughnes = 0.1\n", base);
    FAIL("expected an unknown-key error");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("surface.roughnes") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_experiment_config("[bogus]\nx = 1\n", base), ConfigError);
  CHECK_THROWS_AS(parse_experiment_config("[run]\ncase = neutral\ndt = fast\n", base), ConfigError);
  CHECK_THROWS_AS(parse_experiment_config("[run]\ncase = neutral\ndt = -1\n", base), ConfigError);

  const ExperimentConfig custom = parse_experiment_config(
      "[run]\ncase = unstable\nscheme = fvfree\ndt = 60\nug_imag = 1.5\n"
      "[surface]\ndelta_a = 2.5\nroughness = 0.05\n[closure]\nl_inf = 80\n"
      "[grid]\ntype = uniform\ncells = 30\nheight = 600\n",
      base);
  CHECK(custom.base.dt == 60.0);
  CHECK(custom.base.u_geostrophic == Complex(8.0, 1.5));
  CHECK(custom.base.delta_a == 2.5);
  CHECK(custom.base.mo.roughness == 0.05);
  CHECK(custom.base.closure.l_inf == 80.0);
  CHECK(custom.base.grid.num_cells() == 30);
}
