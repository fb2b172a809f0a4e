#include <doctest.h>

#include <cmath>

#include "test_support.hpp"
#include "xtalk/errors.hpp"
#include "xtalk/modes.hpp"

using namespace xtalk;

namespace {

double orthonormality_error(const Eigen::MatrixXd& b) {
  return (b * b.transpose() - Eigen::MatrixXd::Identity(b.rows(), b.rows())).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("participation rows are orthonormal for both sources") {
  for (int n = 2; n <= 20; ++n) {
    const ModeSet h = test::long_string(n);
    CHECK(orthonormality_error(h.participation) < 1e-10);
    CHECK(orthonormality_error(sinusoidal_modes(n).participation) < 1e-10);
    // Columns as well: the participation matrix is square and orthogonal.
    const ModeSet s = sinusoidal_modes(n);
    CHECK((s.participation.transpose() * s.participation - Eigen::MatrixXd::Identity(n, n))
              .cwiseAbs()
              .maxCoeff() < 1e-12);
    for (int m = 0; m < n; ++m) {
      CHECK(h.participation(m, 0) >= 0.0);
      CHECK(s.participation(m, 0) >= 0.0);
    }
  }
}

TEST_CASE("harmonic modes ascend with the centre-of-mass mode on top") {
  for (int n = 2; n <= 20; ++n) {
    const ModeSet h = test::long_string(n);
    for (int m = 1; m < n; ++m) CHECK(h.freqs(m) > h.freqs(m - 1) * (1.0 + 1e-6));
    const Eigen::VectorXd com = h.participation.row(n - 1);
    CHECK((com.array() - 1.0 / std::sqrt(n)).abs().maxCoeff() < 1e-10);
    CHECK(h.freqs(n - 1) == doctest::Approx(units::mhz_to_angular(3.0)).epsilon(1e-10));
  }
}

TEST_CASE("three-ion participation matches the hand-derived vectors") {
  const ModeSet m = test::qscout3();
  Eigen::MatrixXd expected(3, 3);
  expected << 1, -2, 1, 1, 0, -1, 1, 1, 1;
  expected.row(0) /= std::sqrt(6.0);
  expected.row(1) /= std::sqrt(2.0);
  expected.row(2) /= std::sqrt(3.0);
  CHECK((m.participation - expected).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("three-ion transverse frequencies follow the axial Hessian eigenvalues") {
  // Axial Hessian eigenvalues of a 3-ion string are 1, 3 and 29/5; the
  // transverse Coulomb term is minus half the axial one, so the modes sit at
  // sqrt(wx^2 - (lambda - 1) wz^2 / 2).
  const double wz = units::mhz_to_angular(0.7);
  const double wx = units::mhz_to_angular(2.506);
  const ModeSet m = test::qscout3();
  CHECK(m.freqs(2) == doctest::Approx(wx).epsilon(1e-12));
  CHECK(m.freqs(1) == doctest::Approx(std::sqrt(wx * wx - wz * wz)).epsilon(1e-10));
  CHECK(m.freqs(0) == doctest::Approx(std::sqrt(wx * wx - 2.4 * wz * wz)).epsilon(1e-10));
}

TEST_CASE("equilibrium positions") {
  SUBCASE("two and three ions against closed forms") {
    const Eigen::VectorXd u2 = equilibrium_positions_dimensionless(2);
    CHECK(u2(1) == doctest::Approx(std::cbrt(0.25)).epsilon(1e-12));
    CHECK(u2(0) == doctest::Approx(-std::cbrt(0.25)).epsilon(1e-12));
    const Eigen::VectorXd u3 = equilibrium_positions_dimensionless(3);
    CHECK(std::abs(u3(1)) < 1e-12);
    CHECK(u3(2) == doctest::Approx(std::cbrt(1.25)).epsilon(1e-12));
  }
  SUBCASE("force residual and ordering up to 20 ions") {
    for (int n = 2; n <= 20; ++n) {
      const Eigen::VectorXd u = equilibrium_positions_dimensionless(n);
      CHECK(equilibrium_force_residual(u) < 1e-12);
      for (int j = 1; j < n; ++j) CHECK(u(j) > u(j - 1));
      CHECK(std::abs(u.sum()) < 1e-10);
    }
  }
  SUBCASE("four Yb ions in the 0.5 MHz trap sit about 4 um apart") {
    const auto cfg = yb171_trap(4, units::mhz_to_angular(0.5), units::mhz_to_angular(3.0));
    const Eigen::VectorXd x = equilibrium_positions(cfg);
    double gap = 1.0;
    for (int j = 1; j < 4; ++j) gap = std::min(gap, x(j) - x(j - 1));
    CHECK(gap > 3.5e-6);
    CHECK(gap < 4.5e-6);
  }
}

TEST_CASE("sinusoidal modes follow the closed form") {
  const int n = 7;
  const ModeSet s = sinusoidal_modes(n);
  for (int m = 1; m <= n; ++m)
    for (int j = 1; j <= n; ++j) {
      const double norm = std::sqrt((m == 1 ? 1.0 : 2.0) / n);
      CHECK(s.b(m, j) == doctest::Approx(norm * std::cos((2 * j - 1) * (m - 1) * units::pi / (2 * n))));
    }
}

TEST_CASE("Lamb-Dicke parameters") {
  const ModeSet m = test::qscout3();
  const double dk = std::sqrt(2.0) * units::two_pi / 355e-9;
  const double mass = units::yb171_mass_amu * units::atomic_mass_unit;
  for (int k = 0; k < 3; ++k)
    CHECK(m.lamb_dicke(k) ==
          doctest::Approx(dk * std::sqrt(units::hbar / (2.0 * mass * m.freqs(k)))).epsilon(1e-12));
  // Roughly 0.07-0.08 for Yb at 2.5 MHz with 355 nm Raman beams.
  CHECK(m.lamb_dicke(2) > 0.05);
  CHECK(m.lamb_dicke(2) < 0.1);
}

TEST_CASE("trap validation") {
  CHECK_THROWS_AS(yb171_trap(1, 1e6, 1e7).validate(), ValidationError);
  CHECK_THROWS_AS(yb171_trap(3, 1e7, 1e6).validate(), ValidationError);
  CHECK_THROWS_AS(yb171_trap(3, 0.0, 1e6).validate(), ValidationError);
  // Radial barely above axial: the long string goes zigzag.
  CHECK_THROWS_AS(harmonic_modes(yb171_trap(20, units::mhz_to_angular(1.0),
                                            units::mhz_to_angular(1.2))),
                  UnstableStringError);
}
