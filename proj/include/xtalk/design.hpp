#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "xtalk/coupling.hpp"
#include "xtalk/modes.hpp"
#include "xtalk/pulses.hpp"
#include "xtalk/units.hpp"

namespace xtalk {

struct DesignBudget {
  double max_peak_rabi = std::numeric_limits<double>::infinity();  // rad/s
  double gate_time = 0.0;  // tau_gate, s
  int loops = 1;           // L; linearized loops last gate_time / L each
  int segments = 0;        // D_loop (linearized) or D (quadratic)
  /// Linearized: signed offsets omega_d - nu_l tried for every sideband.
  std::vector<double> detuning_offsets{-units::khz_to_angular(1.0), units::khz_to_angular(1.0)};
  /// Linearized: 1-based sideband modes to build loops on; empty means all.
  std::vector<int> sidebands;
  /// Quadratic: absolute drive frequency; defaults to the mean mode frequency.
  std::optional<double> detuning;
  /// Linearized: rotations between closure-space eigenvectors per pair.
  int shape_angles = 12;
  double leakage_tolerance = 1e-6;
  double angle_tolerance = 1e-6;
  /// false designs a plain gate on the target pair: crosstalk couplings are
  /// neither constrained nor checked.
  bool cancel_crosstalk = true;
  PhaseModel model = PhaseModel::exact;

  void validate() const;
};

struct DesignProblem {
  ModeSet modes;
  GateSpec spec;
  DesignBudget budget;
};

/// One loop of a linearized schedule and where it came from.
struct LoopContribution {
  int sideband = 0;         // 1-based mode the loop is tuned near
  double offset = 0.0;      // omega_d - nu_sideband, rad/s
  double coefficient = 0.0; // c_l; amplitudes scale with sqrt(c_l)
  Eigen::VectorXd chi;      // chi of this loop after scaling
};

struct DesignResult {
  PulseSchedule schedule;
  PhaseVector chi;             // recomputed through accumulate_chi
  Eigen::VectorXd target_chi;  // minimum-norm insensitive chi for the target angle
  double achieved_theta = 0.0; // 2 g^{(t1,t2)} . chi
  double crosstalk_leakage = 0.0;
  double peak_rabi = 0.0;      // rad/s
  double independence = 0.0;
  std::string method;
  std::vector<LoopContribution> loops;  // linearized only
  int restarts_feasible = 0;            // quadratic only
};

/// chi* = P_null g^{(t1,t2)} scaled so that g^{(t1,t2)} . chi* = theta / 2.
/// Throws InfeasibleDesign when the projection vanishes.
Eigen::VectorXd insensitive_target_chi(const CouplingAnalysis& analysis, double theta);

/// max |g^{(t,n)} . chi| / |g^{(t1,t2)} . chi| over crosstalk pairs
/// (0 when there are no neighbours or chi vanishes).
double crosstalk_leakage(const ModeSet& modes, const GateSpec& spec, const Eigen::VectorXd& chi);

/// Multi-loop design. Every sideband/offset pair contributes a dictionary of
/// mode-closing loop shapes; a nonnegative least-squares fit over the
/// dictionary cancels every crosstalk coupling and sets the target angle.
/// Negative phase contributions come from loops mirrored across a sideband.
/// Throws InfeasibleDesign on residual, loop-count or power violations.
DesignResult design_linearized(const DesignProblem& problem);

/// Single-loop l1-penalty design with multi-start local descent. Restarts
/// are seeded from `seed` and evaluated concurrently; the feasible restart
/// with the lowest peak amplitude wins. Throws InfeasibleDesign with the best
/// leakage when no restart meets the tolerance.
DesignResult design_quadratic(const DesignProblem& problem, int restarts = 32,
                              std::uint64_t seed = 1);

struct FeasibilityRow {
  int t1 = 0;
  int t2 = 0;
  double independence = 0.0;
  bool feasible = false;                // independence above threshold
  std::optional<double> peak_rabi;      // linearized design peak, rad/s
  std::string note;                     // why no peak was reported
};

/// Independence of every pair and, for pairs above the threshold, the peak
/// Rabi frequency of a linearized design under `reference` (skipped when the
/// mode set has no frequencies or reference.segments is 0).
std::vector<FeasibilityRow> feasibility_report(const ModeSet& modes, double threshold = 0.1,
                                               const std::optional<DesignBudget>& reference = {},
                                               double theta = units::pi / 4);

}  // namespace xtalk
