#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "ekman/types.hpp"

namespace ekman {

/// Rows i: lower[i] x[i-1] + diag[i] x[i] + upper[i] x[i+1] = rhs[i].
/// lower[0] and upper[n-1] are ignored.
template <typename Scalar>
struct TridiagonalSystem {
  Vector<Scalar> lower;
  Vector<Scalar> diag;
  Vector<Scalar> upper;
  Vector<Scalar> rhs;

  TridiagonalSystem() = default;
  explicit TridiagonalSystem(Eigen::Index n)
      : lower(Vector<Scalar>::Zero(n)),
        diag(Vector<Scalar>::Zero(n)),
        upper(Vector<Scalar>::Zero(n)),
        rhs(Vector<Scalar>::Zero(n)) {}

  Eigen::Index size() const { return diag.size(); }

  /// Dense copy of the matrix, for tests and small diagnostics.
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> dense() const {
    const Eigen::Index n = size();
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> a =
        Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      a(i, i) = diag[i];
      if (i > 0) a(i, i - 1) = lower[i];
      if (i + 1 < n) a(i, i + 1) = upper[i];
    }
    return a;
  }

  /// |A x - rhs| per row, relative to the row's magnitude.
  RealVector relative_residual(const Vector<Scalar>& x) const {
    const Eigen::Index n = size();
    RealVector r(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      Scalar ax = diag[i] * x[i];
      double scale = magnitude(diag[i] * x[i]);
      if (i > 0) {
        ax += lower[i] * x[i - 1];
        scale = std::max(scale, magnitude(lower[i] * x[i - 1]));
      }
      if (i + 1 < n) {
        ax += upper[i] * x[i + 1];
        scale = std::max(scale, magnitude(upper[i] * x[i + 1]));
      }
      scale = std::max(scale, magnitude(rhs[i]));
      r[i] = scale > 0.0 ? magnitude(ax - rhs[i]) / scale : 0.0;
    }
    return r;
  }
};

inline constexpr double kPivotTolerance = 1e-14;

/// Thomas elimination without pivoting. A pivot smaller than 1e-14 times the
/// magnitude of its original row is reported as SingularSystem.
template <typename Scalar>
Vector<Scalar> solve_tridiagonal(const TridiagonalSystem<Scalar>& sys) {
  const Eigen::Index n = sys.size();
  if (sys.lower.size() != n || sys.upper.size() != n || sys.rhs.size() != n || n == 0) {
    throw DomainError("tridiagonal system has inconsistent dimensions");
  }
  Vector<Scalar> c(n);
  Vector<Scalar> d(n);
  auto check = [&](const Scalar& pivot, Eigen::Index i) {
    double scale = magnitude(sys.diag[i]);
    if (i > 0) scale = std::max(scale, magnitude(sys.lower[i]));
    if (i + 1 < n) scale = std::max(scale, magnitude(sys.upper[i]));
    if (!(magnitude(pivot) >= kPivotTolerance * scale) || scale == 0.0) {
      throw SingularSystem("singular tridiagonal system: zero pivot at row " + std::to_string(i), i);
    }
  };
  check(sys.diag[0], 0);
  c[0] = n > 1 ? Scalar(sys.upper[0] / sys.diag[0]) : Scalar(0);
  d[0] = sys.rhs[0] / sys.diag[0];
  for (Eigen::Index i = 1; i < n; ++i) {
    const Scalar pivot = sys.diag[i] - sys.lower[i] * c[i - 1];
    check(pivot, i);
    c[i] = i + 1 < n ? Scalar(sys.upper[i] / pivot) : Scalar(0);
    d[i] = (sys.rhs[i] - sys.lower[i] * d[i - 1]) / pivot;
  }
  Vector<Scalar> x(n);
  x[n - 1] = d[n - 1];
  for (Eigen::Index i = n - 2; i >= 0; --i) {
    x[i] = d[i] - c[i] * x[i + 1];
  }
  return x;
}

}  // namespace ekman
