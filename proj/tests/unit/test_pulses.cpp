#include <doctest.h>

#include <cmath>
#include <random>

#include "quadrature.hpp"
#include "test_support.hpp"
#include "xtalk/errors.hpp"
#include "xtalk/pulses.hpp"

using namespace xtalk;
using cplx = std::complex<double>;

namespace {

PulseLoop random_closed_loop(const ModeSet& modes, double wd, double tau, int d, std::mt19937_64& rng) {
  const Eigen::MatrixXd k = closure_basis(modes, wd, tau, d);
  std::normal_distribution<double> g;
  Eigen::VectorXd y(k.cols());
  for (Eigen::Index i = 0; i < y.size(); ++i) y(i) = g(rng);
  PulseLoop loop;
  loop.detuning = wd;
  loop.duration = tau;
  loop.amplitudes = k * y;
  loop.amplitudes *= units::khz_to_angular(50.0) / loop.amplitudes.cwiseAbs().maxCoeff();
  return loop;
}

}  // namespace

TEST_CASE("loop and schedule basics") {
  PulseLoop l;
  l.detuning = 1e7;
  l.duration = 30e-6;
  l.amplitudes = Eigen::VectorXd::LinSpaced(3, -2.0, 1.0);
  CHECK(l.segments() == 3);
  CHECK(l.segment_start(0) == 0.0);
  CHECK(l.segment_end(2) == 30e-6);
  CHECK(l.segment_end(0) == doctest::Approx(10e-6));
  CHECK(l.peak() == 2.0);
  CHECK_NOTHROW(l.validate(2.0));
  CHECK_THROWS_AS(l.validate(1.5), ValidationError);
  PulseSchedule s{{l, l}};
  CHECK(s.total_duration() == doctest::Approx(60e-6));
  CHECK(s.peak() == 2.0);

  PulseLoop bad = l;
  bad.duration = 0.0;
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = l;
  bad.amplitudes.resize(0);
  CHECK_THROWS_AS(bad.validate(), ValidationError);
  bad = l;
  bad.amplitudes(1) = std::nan("");
  CHECK_THROWS_AS(bad.validate(), ValidationError);
}

TEST_CASE("closure basis is orthonormal and closes every mode") {
  const ModeSet m = test::qscout3();
  for (double off : {-15.0, -1.0, 8.0}) {
    const double wd = m.freqs(1) + units::khz_to_angular(off);
    const Eigen::MatrixXd c = closure_constraints(m, wd, 250e-6, 10);
    const Eigen::MatrixXd k = closure_basis(m, wd, 250e-6, 10);
    CHECK(k.cols() == 4);
    CHECK((k.transpose() * k - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((c * k).cwiseAbs().maxCoeff() < 1e-10 * c.cwiseAbs().maxCoeff());
  }
  CHECK_THROWS_AS(closure_basis(m, m.freqs(0), 100e-6, 6), ValidationError);
}

TEST_CASE("closure residual against quadrature") {
  const ModeSet m = test::qscout3();
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  test::Quadrature q;
  for (int trial = 0; trial < 5; ++trial) {
    PulseLoop l;
    l.detuning = m.freqs(trial % 3) - units::khz_to_angular(10.0 + trial);
    l.duration = 40e-6;
    l.amplitudes.resize(4);
    for (int s = 0; s < 4; ++s) l.amplitudes(s) = g(rng);
    const Eigen::VectorXcd r = closure_residual(l, m);
    for (int mode = 0; mode < 3; ++mode) {
      cplx want = 0.0;
      for (int s = 0; s < 4; ++s)
        want += l.amplitudes(s) * q.integrate_complex(
                                      [&](double t) {
                                        return std::exp(cplx(0.0, m.freqs(mode) * t)) *
                                               std::sin(l.detuning * t);
                                      },
                                      l.segment_start(s), l.segment_end(s));
      CHECK(std::abs(r(mode) - want) < 1e-8 * std::abs(want));
    }
  }
}

TEST_CASE("exact phase matrix against quadrature") {
  const ModeSet m = test::qscout3();
  const int d = 3;
  const double tau = 12e-6;
  for (int mode = 0; mode < 3; ++mode) {
    const double nu = m.freqs(mode);
    const double wd = m.freqs(1) - units::khz_to_angular(20.0);
    const auto ps = phase_matrix(m, wd, tau, d, PhaseModel::exact);
    const Eigen::MatrixXd& p = ps[mode];
    const double eta2 = m.lamb_dicke(mode) * m.lamb_dicke(mode);
    const auto kernel = [&](double t1, double t2) {
      return std::sin(nu * (t1 - t2)) * std::sin(wd * t1) * std::sin(wd * t2);
    };
    const double h = tau / d;
    for (int s1 = 0; s1 < d; ++s1)
      for (int s2 = 0; s2 <= s1; ++s2) {
        double want = s1 == s2 ? test::ordered_double_integral(kernel, s1 * h, (s1 + 1) * h)
                               : 0.5 * test::rectangle_integral(kernel, s1 * h, (s1 + 1) * h,
                                                                s2 * h, (s2 + 1) * h);
        want *= eta2;
        CAPTURE(mode);
        CAPTURE(s1);
        CAPTURE(s2);
        CHECK(std::abs(p(s1, s2) - want) < 1e-8 * std::abs(want));
        CHECK(p(s2, s1) == p(s1, s2));
      }
  }
}

TEST_CASE("chi is a quadratic form in the amplitudes") {
  const ModeSet m = test::qscout3();
  std::mt19937_64 rng(5);
  const PulseLoop l = random_closed_loop(m, m.freqs(2) - units::khz_to_angular(15.0), 250e-6, 10, rng);
  for (PhaseModel model : {PhaseModel::exact, PhaseModel::rotating_wave}) {
    const Eigen::VectorXd chi = loop_chi(l, m, model).chi;
    PulseLoop flipped = l;
    flipped.amplitudes = -l.amplitudes;
    CHECK((loop_chi(flipped, m, model).chi - chi).cwiseAbs().maxCoeff() <=
          1e-14 * chi.cwiseAbs().maxCoeff());
    PulseLoop scaled = l;
    scaled.amplitudes = 1.7 * l.amplitudes;
    CHECK((loop_chi(scaled, m, model).chi - 1.7 * 1.7 * chi).cwiseAbs().maxCoeff() <=
          1e-12 * chi.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("detuning sign sets the sign of the dominant phase") {
  // Constant-amplitude loops of four full turns about each sideband.
  const ModeSet m = test::qscout3();
  const double delta = units::khz_to_angular(15.0);
  for (int mode = 1; mode <= 3; ++mode)
    for (double sign : {-1.0, 1.0}) {
      PulseLoop l;
      l.detuning = m.freqs(mode - 1) + sign * delta;
      l.duration = 4.0 * units::two_pi / delta;
      l.amplitudes = Eigen::VectorXd::Constant(1, units::khz_to_angular(20.0));
      const Eigen::VectorXd chi = loop_chi(l, m).chi;
      Eigen::Index dominant = 0;
      chi.cwiseAbs().maxCoeff(&dominant);
      CAPTURE(mode);
      CAPTURE(sign);
      CHECK(dominant == mode - 1);
      CHECK(chi(mode - 1) * sign < 0.0);
    }
}

TEST_CASE("rotating-wave phases track the exact phases far from the carrier") {
  // Three-ion experiment regime: 15 kHz from a sideband over 250 us, where
  // the dropped counter-rotating terms are of order delta / 2 nu.
  const ModeSet m = test::qscout3();
  for (int l = 1; l <= 3; ++l) {
    const double wd = m.freqs(l - 1) - units::khz_to_angular(15.0);
    PulseLoop constant;
    constant.detuning = wd;
    constant.duration = 250e-6;
    constant.amplitudes = Eigen::VectorXd::Constant(10, units::khz_to_angular(50.0));
    PulseLoop smooth = constant;
    for (int s = 0; s < 10; ++s) smooth.amplitudes(s) *= std::pow(std::sin(units::pi * (s + 0.5) / 10), 2);
    for (const PulseLoop& loop : {constant, smooth}) {
      const Eigen::VectorXd ex = loop_chi(loop, m, PhaseModel::exact).chi;
      const Eigen::VectorXd rw = loop_chi(loop, m, PhaseModel::rotating_wave).chi;
      CAPTURE(l);
      CHECK((rw - ex).norm() < 1e-2 * ex.norm());
    }
  }
}

TEST_CASE("accumulate_chi sums closed loops and rejects open ones") {
  const ModeSet m = test::qscout3();
  std::mt19937_64 rng(9);
  const PulseLoop a = random_closed_loop(m, m.freqs(0) - units::khz_to_angular(15.0), 250e-6, 10, rng);
  const PulseLoop b = random_closed_loop(m, m.freqs(2) + units::khz_to_angular(15.0), 250e-6, 10, rng);
  PulseSchedule s{{a, b}};
  const Eigen::VectorXd total = accumulate_chi(s, m).chi;
  CHECK((total - loop_chi(a, m).chi - loop_chi(b, m).chi).cwiseAbs().maxCoeff() <
        1e-14 * total.cwiseAbs().maxCoeff());
  PulseLoop open = b;
  open.amplitudes(3) += 0.1 * open.amplitudes.cwiseAbs().maxCoeff();
  s.loops.push_back(open);
  try {
    accumulate_chi(s, m);
    FAIL("expected ClosureError");
  } catch (const ClosureError& e) {
    CHECK(e.loop() == 2);
    CHECK(e.residual() > 0.0);
  }
}

TEST_CASE("trajectory starts at the origin and ends at the closure residual") {
  const ModeSet m = test::qscout3();
  std::mt19937_64 rng(11);
  const PulseLoop closed = random_closed_loop(m, m.freqs(1) - units::khz_to_angular(15.0), 250e-6, 10, rng);
  const Eigen::MatrixXcd path = trajectory(closed, m, 301);
  CHECK(path.col(0).cwiseAbs().maxCoeff() == 0.0);
  CHECK(path.col(300).cwiseAbs().maxCoeff() < 1e-9 * path.cwiseAbs().maxCoeff());
  PulseLoop open = closed;
  open.amplitudes(0) *= 2.0;
  const Eigen::MatrixXcd p2 = trajectory(open, m, 301);
  const Eigen::VectorXcd r = closure_residual(open, m);
  for (int mode = 0; mode < 3; ++mode)
    CHECK(std::abs(p2(mode, 300) - m.lamb_dicke(mode) * r(mode)) <
          1e-12 * std::abs(p2(mode, 300)));
}

TEST_CASE("chi equals the enclosed phase-space area") {
  // chi_m = Im integral conj(alpha_m) d alpha_m, evaluated on a fine path.
  const ModeSet m = test::qscout3();
  std::mt19937_64 rng(13);
  const PulseLoop l = random_closed_loop(m, m.freqs(2) - units::khz_to_angular(15.0), 250e-6, 10, rng);
  const int samples = 400001;
  const Eigen::MatrixXcd path = trajectory(l, m, samples);
  const Eigen::VectorXd chi = loop_chi(l, m).chi;
  for (int mode = 0; mode < 3; ++mode) {
    double area = 0.0;
    for (int k = 1; k < samples; ++k)
      area += (std::conj(0.5 * (path(mode, k) + path(mode, k - 1))) *
               (path(mode, k) - path(mode, k - 1)))
                  .imag();
    CAPTURE(mode);
    CHECK(area == doctest::Approx(chi(mode)).epsilon(1e-4));
  }
}
