#include "ekman/quadrature.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>

namespace ekman {

GaussRule gauss_legendre(int n) {
  if (n < 1) {
    throw DomainError("quadrature needs at least one node");
  }
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int k = 1; k < n; ++k) {
    const double beta = k / std::sqrt(4.0 * k * k - 1.0);
    jacobi(k, k - 1) = beta;
    jacobi(k - 1, k) = beta;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi);
  GaussRule rule;
  rule.nodes = eig.eigenvalues();
  rule.weights = 2.0 * eig.eigenvectors().row(0).transpose().array().square();
  return rule;
}

}  // namespace ekman
