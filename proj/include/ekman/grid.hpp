#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "ekman/types.hpp"

namespace ekman {

/// Vertical column of M cells delimited by interface heights z_0 = 0 < ... < z_M.
class VerticalGrid {
 public:
  /// Validates z_0 = 0, strict monotonicity and M >= 2.
  explicit VerticalGrid(RealVector interfaces);

  Eigen::Index num_cells() const { return sizes_.size(); }
  Eigen::Index num_interfaces() const { return interfaces_.size(); }

  const RealVector& interfaces() const { return interfaces_; }
  const RealVector& cell_sizes() const { return sizes_; }
  const RealVector& centers() const { return centers_; }

  double interface(Eigen::Index m) const { return interfaces_[m]; }
  double top() const { return interfaces_[interfaces_.size() - 1]; }

  bool operator==(const VerticalGrid& other) const {
    return interfaces_.size() == other.interfaces_.size() &&
           interfaces_ == other.interfaces_;
  }

 private:
  RealVector interfaces_;
  RealVector sizes_;
  RealVector centers_;
};

enum class StretchLaw { Geometric };

VerticalGrid build_uniform(int n_cells, double column_height);

/// Uniform block of `uniform_cells` cells of `uniform_size`, then `stretched_cells`
/// cells whose sizes grow geometrically (ratio >= 1) so that the last interface is
/// exactly `top_height`.
VerticalGrid build_stretched(int uniform_cells, double uniform_size, int stretched_cells,
                             double top_height, StretchLaw law = StretchLaw::Geometric);

/// Ratio r >= 1 with first_size * (r + r^2 + ... + r^n) == span, by bisection.
double geometric_stretch_ratio(double first_size, int n, double span);

VerticalGrid load_levels(std::span<const double> heights);
VerticalGrid load_levels(const std::filesystem::path& file);
void save_levels(const VerticalGrid& grid, const std::filesystem::path& file);

/// Splits every cell into `factor` equal sub-cells.
VerticalGrid refine(const VerticalGrid& grid, int factor);

/// True when every interface of `coarse` is (to rounding) an interface of `fine`.
bool is_nested(const VerticalGrid& fine, const VerticalGrid& coarse);

/// Interface list of a column whose bottom is lifted to `bottom` (used for the
/// computational domain above the surface layer). Not a VerticalGrid since z_0 != 0.
struct ColumnMesh {
  RealVector interfaces;
  RealVector sizes;
  RealVector centers;
  /// Index in the parent grid of the cell holding the lowest computational cell.
  Eigen::Index parent_offset = 0;

  Eigen::Index num_cells() const { return sizes.size(); }
  double bottom() const { return interfaces[0]; }
};

ColumnMesh full_mesh(const VerticalGrid& grid);

/// Mesh of the part of `grid` above `bottom`. The cell containing `bottom` becomes
/// a shortened sub-cell; a bottom that coincides with an interface (to 1e-9 of the
/// cell size) is snapped onto it.
ColumnMesh mesh_above(const VerticalGrid& grid, double bottom);

}  // namespace ekman
