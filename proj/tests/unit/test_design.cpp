#include <doctest.h>

#include <cmath>

#include "test_support.hpp"
#include "xtalk/design.hpp"
#include "xtalk/errors.hpp"
#include "xtalk/simulate.hpp"

using namespace xtalk;

TEST_CASE("insensitive target chi is the minimum-norm solution") {
  const ModeSet m = test::chain_string(12);
  for (auto [t1, t2] : {std::pair{5, 6}, std::pair{3, 10}, std::pair{1, 2}}) {
    const GateSpec spec = make_gate_spec(12, t1, t2, units::pi / 4, 0.1);
    const CouplingAnalysis a = crosstalk_analysis(m, spec);
    const Eigen::VectorXd chi = insensitive_target_chi(a, spec.theta);
    // Minimum-norm solution of [R^T; g^T] chi = [0; theta / 2].
    Eigen::MatrixXd sys(a.crosstalk_matrix.cols() + 1, 12);
    sys.topRows(a.crosstalk_matrix.cols()) = a.crosstalk_matrix.transpose();
    sys.bottomRows(1) = a.g_target.transpose();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(sys.rows());
    rhs(rhs.size() - 1) = spec.theta / 2;
    Eigen::BDCSVD<Eigen::MatrixXd> svd(sys, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(1e-10);  // mirror pairs repeat rows exactly
    const Eigen::VectorXd ref = svd.solve(rhs);
    CHECK((chi - ref).norm() < 1e-9 * ref.norm());
    CHECK(crosstalk_leakage(m, spec, chi) < 1e-10);
  }
  const ModeSet s = sinusoidal_modes(5);
  const CouplingAnalysis dead = crosstalk_analysis(s, make_gate_spec(5, 2, 3, 1.0, 0.1));
  CHECK_THROWS_AS(insensitive_target_chi(dead, 1.0), InfeasibleDesign);
}

TEST_CASE("three-ion linearized designs are insensitive") {
  for (const char* name : {"qscout3_insensitive", "qscout3_composite"}) {
    const DesignProblem p = test::problem(name);
    const DesignResult r = design_linearized(p);
    const test::Verified v = test::verify(p, r.schedule);
    CAPTURE(name);
    CHECK(v.leakage < 1e-6);
    CHECK(std::abs(v.theta - units::pi / 4) < 1e-6);
    CHECK(r.crosstalk_leakage == doctest::Approx(v.leakage).epsilon(1e-3).scale(1e-12));
    CHECK(static_cast<int>(r.schedule.loops.size()) <= p.budget.loops);
    CHECK(r.peak_rabi <= p.budget.max_peak_rabi);
    CHECK(r.method == "linearized");
  }
}

TEST_CASE("composite gate: a COM loop followed by a mode-1 loop") {
  const DesignProblem p = test::problem("qscout3_composite");
  const DesignResult r = design_linearized(p);
  REQUIRE(r.loops.size() == 2);
  const Eigen::VectorXd g = g_vector(p.modes, 1, 3);
  CHECK(r.loops[0].sideband == 3);
  CHECK(r.loops[1].sideband == 1);
  // The experiment splits the angle pi/6 + pi/12. Off-resonant phase from the
  // other sidebands shifts the split; 0.03 rad covers it at -8 kHz.
  CHECK(std::abs(2.0 * g.dot(r.loops[0].chi) - units::pi / 6) < 0.03);
  CHECK(std::abs(2.0 * g.dot(r.loops[1].chi) - units::pi / 12) < 0.03);
  // Each loop alone entangles the centre ion with the targets.
  const Eigen::VectorXd g12 = g_vector(p.modes, 1, 2);
  CHECK(std::abs(g12.dot(r.loops[0].chi)) > 0.05);
  CHECK(std::abs(g12.dot(r.loops[1].chi)) > 0.05);
}

TEST_CASE("plain single-sideband gates set the angle without cancelling crosstalk") {
  for (const char* name : {"qscout3_tilt", "qscout3_com", "qscout3_mode1"}) {
    const DesignProblem p = test::problem(name);
    const DesignResult r = design_linearized(p);
    CAPTURE(name);
    CHECK(r.schedule.loops.size() == 1);
    CHECK(std::abs(test::verify(p, r.schedule).theta - units::pi / 4) < 1e-6);
  }
  // The tilt loop leaks only through off-resonant modes; COM and mode 1 leak
  // at order one.
  CHECK(design_linearized(test::problem("qscout3_tilt")).crosstalk_leakage < 0.2);
  CHECK(design_linearized(test::problem("qscout3_com")).crosstalk_leakage > 0.5);
  CHECK(design_linearized(test::problem("qscout3_mode1")).crosstalk_leakage > 1.0);
}

TEST_CASE("four-ion designs by both methods") {
  const DesignProblem lp = test::problem("chain_4ion_linearized");
  const DesignProblem qp = test::problem("chain_4ion_quadratic");
  const DesignResult lin = design_linearized(lp);
  const DesignResult quad = design_quadratic(qp, 32, 1);
  for (const auto& [p, r] : {std::pair{&lp, &lin}, std::pair{&qp, &quad}}) {
    const test::Verified v = test::verify(*p, r->schedule);
    CHECK(v.leakage < 1e-6);
    CHECK(std::abs(v.theta - units::pi / 4) < 1e-6);
  }
  CHECK(quad.schedule.loops.size() == 1);
  CHECK(quad.schedule.loops[0].segments() == 20);
  CHECK(quad.restarts_feasible > 0);
  // Both land on the same insensitive coupling matrix.
  const Eigen::MatrixXd jl = coupling_matrix(lp.modes, lin.chi.chi);
  const Eigen::MatrixXd jq = coupling_matrix(qp.modes, quad.chi.chi);
  const Eigen::MatrixXd nl = jl / jl(1, 2);
  const Eigen::MatrixXd nq = jq / jq(1, 2);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      if (i != j) CHECK(std::abs(nl(i, j) - nq(i, j)) < 1e-6);
}

TEST_CASE("twelve-ion linearized design with nine loops") {
  const DesignProblem p = test::problem("chain_12ion");
  const DesignResult r = design_linearized(p);
  const test::Verified v = test::verify(p, r.schedule);
  CHECK(v.leakage < 1e-6);
  CHECK(std::abs(v.theta - units::pi / 4) < 1e-6);
  CHECK(static_cast<int>(r.schedule.loops.size()) <= 9);
  for (const auto& l : r.schedule.loops) {
    CHECK(l.segments() == 26);
    CHECK(l.duration == doctest::Approx(500e-6 / 9));
  }
}

TEST_CASE("angle scaling scales loop coefficients linearly") {
  DesignProblem p = test::problem("chain_4ion_linearized");
  const DesignResult base = design_linearized(p);
  p.spec.theta *= 0.5;
  const DesignResult half = design_linearized(p);
  REQUIRE(half.loops.size() == base.loops.size());
  for (std::size_t l = 0; l < base.loops.size(); ++l) {
    CHECK(half.loops[l].coefficient == doctest::Approx(0.5 * base.loops[l].coefficient).epsilon(1e-9));
    CHECK((half.schedule.loops[l].amplitudes - std::sqrt(0.5) * base.schedule.loops[l].amplitudes)
              .cwiseAbs()
              .maxCoeff() < 1e-9 * base.schedule.loops[l].peak());
  }
  CHECK(std::abs(test::verify(p, half.schedule).theta - units::pi / 8) < 1e-6);
}

TEST_CASE("zero angle gives an empty pulse") {
  DesignProblem p = test::problem("chain_4ion_linearized");
  p.spec.theta = 0.0;
  CHECK(design_linearized(p).schedule.loops.empty());
  DesignProblem q = test::problem("chain_4ion_quadratic");
  q.spec.theta = 0.0;
  const DesignResult r = design_quadratic(q, 4, 1);
  CHECK(r.peak_rabi == 0.0);
}

TEST_CASE("designs are deterministic") {
  const DesignProblem p = test::problem("chain_4ion_linearized");
  const DesignResult a = design_linearized(p);
  const DesignResult b = design_linearized(p);
  REQUIRE(a.schedule.loops.size() == b.schedule.loops.size());
  for (std::size_t l = 0; l < a.schedule.loops.size(); ++l)
    CHECK(a.schedule.loops[l].amplitudes == b.schedule.loops[l].amplitudes);
  const DesignProblem q = test::problem("chain_4ion_quadratic");
  const DesignResult q1 = design_quadratic(q, 8, 42);
  const DesignResult q2 = design_quadratic(q, 8, 42);
  CHECK(q1.schedule.loops[0].amplitudes == q2.schedule.loops[0].amplitudes);
}

TEST_CASE("infeasible budgets are reported") {
  DesignProblem p = test::problem("chain_12ion");
  p.budget.loops = 1;
  p.budget.gate_time = 500e-6 / 9;
  CHECK_THROWS_AS(design_linearized(p), InfeasibleDesign);
  DesignProblem q = test::problem("chain_4ion_linearized");
  q.budget.max_peak_rabi = units::khz_to_angular(1.0);
  CHECK_THROWS_AS(design_linearized(q), InfeasibleDesign);
  DesignProblem bad = test::problem("chain_4ion_linearized");
  bad.budget.segments = 0;
  CHECK_THROWS_AS(design_linearized(bad), ValidationError);
  bad = test::problem("chain_4ion_linearized");
  bad.budget.gate_time = -1.0;
  CHECK_THROWS_AS(design_linearized(bad), ValidationError);
}

TEST_CASE("feasibility report") {
  const ModeSet m = test::chain_string(6);
  DesignBudget ref;
  ref.gate_time = 300e-6;
  ref.loops = 6;
  ref.segments = 16;
  const auto rows = feasibility_report(m, 0.1, ref);
  CHECK(rows.size() == 15);
  for (const auto& row : rows) {
    CAPTURE(row.t1);
    CAPTURE(row.t2);
    CHECK(row.feasible == (row.independence > 0.1));
    if (!row.feasible) CHECK_FALSE(row.peak_rabi.has_value());
    if (row.peak_rabi) CHECK(*row.peak_rabi > 0.0);
  }
  const auto bare = feasibility_report(sinusoidal_modes(6), 0.1);
  for (const auto& row : bare) CHECK_FALSE(row.peak_rabi.has_value());
}
