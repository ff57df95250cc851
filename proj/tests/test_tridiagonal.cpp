#include <doctest.h>

#include <random>

#include "ekman/tridiagonal.hpp"

using namespace ekman;

TEST_CASE("identity system returns its right-hand side") {
  TridiagonalSystem<double> sys(5);
  sys.diag.setOnes();
  sys.rhs << 1.0, -2.0, 3.5, 0.0, 7.0;
  CHECK(solve_tridiagonal(sys) == sys.rhs);
}

TEST_CASE("3x3 system against a dense inverse") {
  TridiagonalSystem<double> sys(3);
  sys.diag << 4.0, 5.0, 3.0;
  sys.lower << 0.0, 1.0, -2.0;
  sys.upper << 2.0, -1.0, 0.0;
  sys.rhs << 1.0, 2.0, 3.0;
  const Eigen::Vector3d expected = sys.dense().inverse() * sys.rhs;
  const RealVector x = solve_tridiagonal(sys);
  CHECK((x - expected).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("random diagonally dominant systems") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  TridiagonalSystem<double> sys(100);
  for (Eigen::Index i = 0; i < 100; ++i) {
    sys.lower[i] = i > 0 ? u(rng) : 0.0;
    sys.upper[i] = i < 99 ? u(rng) : 0.0;
    sys.diag[i] = std::abs(sys.lower[i]) + std::abs(sys.upper[i]) + 0.5 + std::abs(u(rng));
    sys.rhs[i] = u(rng);
  }
  const RealVector x = solve_tridiagonal(sys);
  const RealVector r = sys.dense() * x - sys.rhs;
  CHECK(r.cwiseAbs().maxCoeff() <= 1e-10);
  CHECK(sys.relative_residual(x).maxCoeff() <= 1e-14);

  TridiagonalSystem<Complex> csys(50);
  for (Eigen::Index i = 0; i < 50; ++i) {
    csys.lower[i] = i > 0 ? Complex(u(rng), u(rng)) : Complex(0.0);
    csys.upper[i] = i < 49 ? Complex(u(rng), u(rng)) : Complex(0.0);
    csys.diag[i] = Complex(3.0, u(rng));
    csys.rhs[i] = Complex(u(rng), u(rng));
  }
  const ComplexVector z = solve_tridiagonal(csys);
  CHECK((csys.dense() * z - csys.rhs).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("singular pivots name their row") {
  TridiagonalSystem<double> sys(3);
  sys.diag << 1.0, 1.0, 1.0;
  sys.lower << 0.0, 1.0, 1.0;
  sys.upper << 1.0, 1.0, 0.0;
  sys.rhs.setOnes();
  try {
    solve_tridiagonal(sys);
    FAIL("expected a singular system");
  } catch (const SingularSystem& e) {
    CHECK(e.row() == 1);
  }

  TridiagonalSystem<double> zero(2);
  zero.diag << 0.0, 1.0;
  CHECK_THROWS_AS(solve_tridiagonal(zero), SingularSystem);
}
