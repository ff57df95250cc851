#pragma once

#include <cmath>

#include "ekman/grid.hpp"
#include "ekman/tridiagonal.hpp"
#include "ekman/types.hpp"

namespace ekman {

/// Quadratic reconstruction of one cell,
///   S(xi) = mean + (phi_R + phi_L)/2 xi + (phi_R - phi_L)/(2h) (xi^2 - h^2/12),
/// with xi = z - center. Its cell average is `mean` and S'(-h/2), S'(h/2) are
/// phi_L, phi_R.
template <typename Scalar>
struct CellSpline {
  Scalar mean{};
  Scalar phi_left{};
  Scalar phi_right{};
  double size = 0.0;
  double center = 0.0;

  double lower() const { return center - 0.5 * size; }
  double upper() const { return center + 0.5 * size; }

  Scalar at_offset(double xi) const {
    return mean + (phi_right + phi_left) * (0.5 * xi) +
           (phi_right - phi_left) * ((xi * xi - size * size / 12.0) / (2.0 * size));
  }

  Scalar slope_at_offset(double xi) const {
    return (phi_right + phi_left) * 0.5 + (phi_right - phi_left) * (xi / size);
  }

  Scalar bottom_value() const { return at_offset(-0.5 * size); }
  Scalar top_value() const { return at_offset(0.5 * size); }
};

template <typename Scalar>
CellSpline<Scalar> spline_from_cell(const Scalar& mean, double h, const Scalar& phi_left,
                                    const Scalar& phi_right, double cell_center) {
  if (!(h > 0.0)) {
    throw DomainError("cell size must be positive");
  }
  return CellSpline<Scalar>{mean, phi_left, phi_right, h, cell_center};
}

/// Value of the spline at height z; z must lie in the closed cell.
template <typename Scalar>
Scalar evaluate(const CellSpline<Scalar>& s, double z) {
  const double slack = 1e-12 * std::max(1.0, std::abs(s.center) + s.size);
  if (z < s.lower() - slack || z > s.upper() + slack) {
    throw DomainError("evaluation height outside of the cell");
  }
  return s.at_offset(z - s.center);
}

/// Linear constraint on the boundary unknowns of a column:
///   phi_edge * phi_b + phi_inner * phi_{b +- 1} + mean * u_adjacent = rhs,
/// where phi_b is the boundary interface derivative and u_adjacent the average of
/// the cell touching it.
template <typename Scalar>
struct BoundaryRow {
  Scalar phi_edge{};
  Scalar phi_inner{};
  Scalar mean{};
  Scalar rhs{};

  /// phi_b = value.
  static BoundaryRow derivative(const Scalar& value) {
    return BoundaryRow{Scalar(1), Scalar(0), Scalar(0), value};
  }

  /// Spline value at the bottom interface of a cell of size h equals `value`.
  static BoundaryRow bottom_value(double h, const Scalar& value) {
    return BoundaryRow{Scalar(-h / 3.0), Scalar(-h / 6.0), Scalar(1), value};
  }

  /// Spline value at the top interface of a cell of size h equals `value`.
  static BoundaryRow top_value(double h, const Scalar& value) {
    return BoundaryRow{Scalar(h / 3.0), Scalar(h / 6.0), Scalar(1), value};
  }
};

/// Cell averages expressed as an affine function of the interface fluxes:
///   mean_m = offset_m + gain_m (K_{m+1} phi_{m+1} - K_m phi_m).
/// A known field is gain = 0; an implicit Euler step of the flux-form equation
/// has gain = dt / (h (1 + i f dt)).
template <typename Scalar>
struct AffineMeans {
  Vector<Scalar> offset;
  Vector<Scalar> gain;
  RealVector diffusivity;  // per interface

  static AffineMeans known(const Vector<Scalar>& field) {
    const Eigen::Index n = field.size();
    return AffineMeans{field, Vector<Scalar>::Zero(n), RealVector::Zero(n + 1)};
  }

  Vector<Scalar> means(const Vector<Scalar>& phi) const {
    const Eigen::Index n = offset.size();
    Vector<Scalar> flux = diffusivity.cast<Scalar>().cwiseProduct(phi);
    return offset + gain.cwiseProduct(flux.tail(n) - flux.head(n));
  }
};

/// Compact relation for the interface derivatives,
///   h_{m-1/2}/6 phi_{m-1} + (h_{m+1/2} + h_{m-1/2})/3 phi_m + h_{m+1/2}/6 phi_{m+1}
///     = u_{m+1/2} - u_{m-1/2},
/// at interior interfaces, with the cell averages given by `means`, closed by the
/// two boundary rows.
template <typename Scalar>
TridiagonalSystem<Scalar> assemble_compact_system(const RealVector& sizes,
                                                  const AffineMeans<Scalar>& means,
                                                  const BoundaryRow<Scalar>& bottom,
                                                  const BoundaryRow<Scalar>& top) {
  const Eigen::Index n = sizes.size();
  if (n < 1 || means.offset.size() != n || means.gain.size() != n ||
      means.diffusivity.size() != n + 1) {
    throw DomainError("field does not match the grid");
  }
  const auto& a = means.offset;
  const auto& b = means.gain;
  const auto& k = means.diffusivity;
  TridiagonalSystem<Scalar> sys(n + 1);

  sys.diag[0] = bottom.phi_edge - bottom.mean * b[0] * k[0];
  sys.upper[0] = bottom.phi_inner + bottom.mean * b[0] * k[1];
  sys.rhs[0] = bottom.rhs - bottom.mean * a[0];

  for (Eigen::Index j = 1; j < n; ++j) {
    sys.lower[j] = sizes[j - 1] / 6.0 - b[j - 1] * k[j - 1];
    sys.diag[j] = (sizes[j - 1] + sizes[j]) / 3.0 + (b[j] + b[j - 1]) * k[j];
    sys.upper[j] = sizes[j] / 6.0 - b[j] * k[j + 1];
    sys.rhs[j] = a[j] - a[j - 1];
  }

  sys.diag[n] = top.phi_edge + top.mean * b[n - 1] * k[n];
  sys.lower[n] = top.phi_inner - top.mean * b[n - 1] * k[n - 1];
  sys.rhs[n] = top.rhs - top.mean * a[n - 1];
  return sys;
}

template <typename Scalar>
TridiagonalSystem<Scalar> assemble_compact_system(const VerticalGrid& grid,
                                                  const CellField<Scalar>& field,
                                                  const BoundaryRow<Scalar>& bottom,
                                                  const BoundaryRow<Scalar>& top) {
  if (field.size() != grid.num_cells()) {
    throw DomainError("field does not match the grid");
  }
  return assemble_compact_system(grid.cell_sizes(), AffineMeans<Scalar>::known(field), bottom,
                                 top);
}

/// Interface derivatives of a known field.
template <typename Scalar>
InterfaceDerivatives<Scalar> compact_derivatives(const RealVector& sizes,
                                                 const CellField<Scalar>& field,
                                                 const BoundaryRow<Scalar>& bottom,
                                                 const BoundaryRow<Scalar>& top) {
  return solve_tridiagonal(
      assemble_compact_system(sizes, AffineMeans<Scalar>::known(field), bottom, top));
}

template <typename Scalar>
CellSpline<Scalar> cell_spline(const ColumnMesh& mesh, const CellField<Scalar>& means,
                               const InterfaceDerivatives<Scalar>& phi, Eigen::Index m) {
  return CellSpline<Scalar>{means[m], phi[m], phi[m + 1], mesh.sizes[m], mesh.centers[m]};
}

template <typename Scalar>
CellSpline<Scalar> cell_spline(const VerticalGrid& grid, const CellField<Scalar>& means,
                               const InterfaceDerivatives<Scalar>& phi, Eigen::Index m) {
  return CellSpline<Scalar>{means[m], phi[m], phi[m + 1], grid.cell_sizes()[m],
                            grid.centers()[m]};
}

/// Piecewise reconstruction at height z inside the column described by `interfaces`.
template <typename Scalar>
Scalar reconstruct(const RealVector& interfaces, const CellField<Scalar>& means,
                   const InterfaceDerivatives<Scalar>& phi, double z) {
  const Eigen::Index n = means.size();
  Eigen::Index m = 0;
  while (m + 1 < n && z > interfaces[m + 1]) {
    ++m;
  }
  const double h = interfaces[m + 1] - interfaces[m];
  const CellSpline<Scalar> s{means[m], phi[m], phi[m + 1], h,
                             0.5 * (interfaces[m] + interfaces[m + 1])};
  return evaluate(s, z);
}

/// Spline of the sub-cell (delta_a, z_1) of the first cell, whose average follows from
/// the whole-cell average and the surface-layer average over (0, delta_a).
template <typename Scalar>
CellSpline<Scalar> first_cell_subsplit(const VerticalGrid& grid, double delta_a,
                                       const Scalar& u_avg_first, const Scalar& phi_delta,
                                       const Scalar& phi_1, const Scalar& sl_average) {
  const double z1 = grid.interface(1);
  if (!(delta_a > 0.0)) {
    throw DomainError("surface layer height must be positive");
  }
  if (delta_a >= z1) {
    throw UnsupportedConfiguration("surface layer height must lie below the first interface");
  }
  const double h_sub = z1 - delta_a;
  const Scalar mean = (u_avg_first * grid.cell_sizes()[0] - sl_average * delta_a) / h_sub;
  return CellSpline<Scalar>{mean, phi_delta, phi_1, h_sub, 0.5 * (z1 + delta_a)};
}

}  // namespace ekman
