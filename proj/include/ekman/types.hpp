#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace ekman {

using Complex = std::complex<double>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using RealVector = Vector<double>;
using ComplexVector = Vector<Complex>;

/// Per-cell averages aligned with a grid (complex for wind, real for temperature).
template <typename Scalar>
using CellField = Vector<Scalar>;

/// Per-interface derivatives phi_0..phi_M.
template <typename Scalar>
using InterfaceDerivatives = Vector<Scalar>;

// Error categories surfaced by the CLI as distinct exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class NumericsError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class UnsupportedConfiguration : public Error {
 public:
  using Error::Error;
};

class SingularSystem : public NumericsError {
 public:
  SingularSystem(const std::string& what, Eigen::Index row)
      : NumericsError(what), row_(row) {}
  Eigen::Index row() const { return row_; }

 private:
  Eigen::Index row_;
};

inline double magnitude(double x) { return std::abs(x); }
inline double magnitude(const Complex& x) { return std::abs(x); }

}  // namespace ekman
