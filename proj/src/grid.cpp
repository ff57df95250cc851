#include "ekman/grid.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

namespace ekman {

VerticalGrid::VerticalGrid(RealVector interfaces) : interfaces_(std::move(interfaces)) {
  const Eigen::Index n = interfaces_.size();
  if (n < 3) {
    throw DomainError("vertical grid needs at least two cells");
  }
  if (interfaces_[0] != 0.0) {
    throw DomainError("vertical grid must start at z = 0");
  }
  sizes_.resize(n - 1);
  centers_.resize(n - 1);
  for (Eigen::Index m = 0; m + 1 < n; ++m) {
    const double lo = interfaces_[m];
    const double hi = interfaces_[m + 1];
    if (!std::isfinite(hi) || !(hi > lo)) {
      throw DomainError("interface heights must be finite and strictly increasing (at index " +
                        std::to_string(m + 1) + ")");
    }
    sizes_[m] = hi - lo;
    centers_[m] = 0.5 * (lo + hi);
  }
}

VerticalGrid build_uniform(int n_cells, double column_height) {
  if (n_cells < 2) {
    throw DomainError("uniform grid needs at least two cells");
  }
  if (!(column_height > 0.0)) {
    throw DomainError("column height must be positive");
  }
  RealVector z(n_cells + 1);
  for (int m = 0; m <= n_cells; ++m) {
    z[m] = column_height * m / n_cells;
  }
  z[n_cells] = column_height;
  return VerticalGrid(std::move(z));
}

double geometric_stretch_ratio(double first_size, int n, double span) {
  auto partial_sum = [&](double r) {
    double s = 0.0;
    double p = 1.0;
    for (int i = 0; i < n; ++i) {
      p *= r;
      s += p;
    }
    return first_size * s;
  };
  if (partial_sum(1.0) > span * (1.0 + 1e-14)) {
    throw DomainError("stretched block would need a ratio below 1");
  }
  double lo = 1.0;
  double hi = 2.0;
  while (partial_sum(hi) < span) {
    hi *= 2.0;
    if (hi > 1e6) {
      throw DomainError("stretched block ratio diverges");
    }
  }
  while (hi - lo > 1e-12) {
    const double mid = 0.5 * (lo + hi);
    (partial_sum(mid) < span ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

VerticalGrid build_stretched(int uniform_cells, double uniform_size, int stretched_cells,
                             double top_height, StretchLaw /*law*/) {
  if (uniform_cells < 0 || stretched_cells < 0 || uniform_cells + stretched_cells < 2) {
    throw DomainError("stretched grid needs at least two cells");
  }
  if (!(uniform_size > 0.0)) {
    throw DomainError("uniform cell size must be positive");
  }
  const double uniform_top = uniform_cells * uniform_size;
  if (stretched_cells == 0) {
    if (std::abs(uniform_top - top_height) > 1e-12 * top_height) {
      throw DomainError("without stretched cells the top must equal the uniform block height");
    }
  } else if (!(uniform_top < top_height)) {
    throw DomainError("uniform block already reaches the column top");
  }

  RealVector z(uniform_cells + stretched_cells + 1);
  for (int m = 0; m <= uniform_cells; ++m) {
    z[m] = m * uniform_size;
  }
  if (stretched_cells > 0) {
    const double r = geometric_stretch_ratio(uniform_size, stretched_cells, top_height - uniform_top);
    double size = uniform_size;
    for (int i = 1; i <= stretched_cells; ++i) {
      size *= r;
      z[uniform_cells + i] = z[uniform_cells + i - 1] + size;
    }
  }
  z[z.size() - 1] = top_height;
  return VerticalGrid(std::move(z));
}

VerticalGrid load_levels(std::span<const double> heights) {
  RealVector z(static_cast<Eigen::Index>(heights.size()));
  for (std::size_t i = 0; i < heights.size(); ++i) {
    if (heights[i] < 0.0) {
      throw DomainError("negative level height");
    }
    z[static_cast<Eigen::Index>(i)] = heights[i];
  }
  return VerticalGrid(std::move(z));
}

VerticalGrid load_levels(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) {
    throw IoError("cannot open grid file " + file.string());
  }
  std::vector<double> heights;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) {
      line.erase(hash);
    }
    std::istringstream ss(line);
    double value = 0.0;
    if (!(ss >> value)) {
      std::string rest;
      ss.clear();
      if (ss >> rest) {
        throw IoError(file.string() + ":" + std::to_string(line_no) + ": not a number");
      }
      continue;
    }
    heights.push_back(value);
  }
  return load_levels(std::span<const double>(heights));
}

void save_levels(const VerticalGrid& grid, const std::filesystem::path& file) {
  std::ofstream out(file);
  if (!out) {
    throw IoError("cannot write grid file " + file.string());
  }
  out << std::setprecision(17);
  for (Eigen::Index m = 0; m < grid.num_interfaces(); ++m) {
    out << grid.interface(m) << '\n';
  }
}

VerticalGrid refine(const VerticalGrid& grid, int factor) {
  if (factor < 2) {
    throw DomainError("refinement factor must be at least 2");
  }
  const Eigen::Index n = grid.num_cells();
  RealVector z(n * factor + 1);
  for (Eigen::Index m = 0; m < n; ++m) {
    const double lo = grid.interface(m);
    const double h = grid.cell_sizes()[m];
    z[m * factor] = lo;
    for (int k = 1; k < factor; ++k) {
      z[m * factor + k] = lo + h * k / factor;
    }
  }
  z[n * factor] = grid.top();
  return VerticalGrid(std::move(z));
}

bool is_nested(const VerticalGrid& fine, const VerticalGrid& coarse) {
  const auto& zf = fine.interfaces();
  const double tol = 1e-9 * fine.top();
  Eigen::Index j = 0;
  for (Eigen::Index m = 0; m < coarse.num_interfaces(); ++m) {
    const double z = coarse.interface(m);
    while (j < zf.size() && zf[j] < z - tol) {
      ++j;
    }
    if (j == zf.size() || std::abs(zf[j] - z) > tol) {
      return false;
    }
  }
  return true;
}

ColumnMesh full_mesh(const VerticalGrid& grid) {
  return ColumnMesh{grid.interfaces(), grid.cell_sizes(), grid.centers(), 0};
}

ColumnMesh mesh_above(const VerticalGrid& grid, double bottom) {
  const auto& z = grid.interfaces();
  if (!(bottom >= 0.0) || bottom >= grid.interface(grid.num_cells() - 1)) {
    throw DomainError("computational bottom must lie below the last interior interface");
  }
  // Cell k with z_k <= bottom < z_{k+1}.
  Eigen::Index k = static_cast<Eigen::Index>(
                       std::upper_bound(z.data(), z.data() + z.size(), bottom) - z.data()) -
                   1;
  const double snap = 1e-9 * grid.cell_sizes()[k];
  if (z[k + 1] - bottom < snap) {
    ++k;
    bottom = z[k];
  } else if (bottom - z[k] < snap) {
    bottom = z[k];
  }
  const Eigen::Index n = grid.num_cells() - k;
  ColumnMesh mesh;
  mesh.parent_offset = k;
  mesh.interfaces = z.tail(n + 1);
  mesh.interfaces[0] = bottom;
  mesh.sizes = mesh.interfaces.tail(n) - mesh.interfaces.head(n);
  mesh.centers = 0.5 * (mesh.interfaces.tail(n) + mesh.interfaces.head(n));
  return mesh;
}

}  // namespace ekman
