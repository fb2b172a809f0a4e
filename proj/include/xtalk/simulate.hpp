#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

#include "xtalk/coupling.hpp"
#include "xtalk/modes.hpp"
#include "xtalk/pulses.hpp"

// Qubit register convention: ion j (1-based) of an n-ion string is bit n - j
// of the basis index, so ion 1 is the leftmost tensor factor. |0> and |1>
// are Z eigenstates.

namespace xtalk {

/// Dimensionless illumination factor c_j of every ion relative to a target.
struct IlluminationProfile {
  Eigen::VectorXd factors;

  [[nodiscard]] int size() const { return static_cast<int>(factors.size()); }
  /// Throws ValidationError unless 0 <= c_j <= 1 and targets have c = 1.
  void validate(const GateSpec& spec) const;
};

/// Targets at 1, every neighbour at epsilon, all other ions dark.
IlluminationProfile uniform_illumination(int ion_count, const GateSpec& spec, double epsilon);

/// J_{j1,j2} = g^{(j1,j2)} . chi for every pair, diagonal included.
Eigen::MatrixXd coupling_matrix(const ModeSet& modes, const Eigen::VectorXd& chi);

/// theta_{j1,j2} = 2 c_{j1} c_{j2} J_{j1,j2}; zero diagonal.
Eigen::MatrixXd rotation_angles(const Eigen::MatrixXd& coupling, const IlluminationProfile& light);

/// prod_{j1<j2} exp(i theta_{j1,j2} X_{j1} X_{j2}). The gate is diagonal in
/// the X basis and is applied with two Walsh-Hadamard transforms.
class XXRotationGate {
 public:
  static constexpr int max_dense_ions = 12;
  static constexpr int max_state_ions = 24;

  explicit XXRotationGate(Eigen::MatrixXd angles);

  [[nodiscard]] int size() const { return static_cast<int>(angles_.rows()); }
  [[nodiscard]] const Eigen::MatrixXd& angles() const { return angles_; }
  /// sum_{j1<j2} theta s_{j1} s_{j2} for the X-basis state with bits `x`
  /// (bit set means eigenvalue -1).
  [[nodiscard]] double phase(std::uint64_t x) const;
  [[nodiscard]] Eigen::VectorXcd apply(const Eigen::VectorXcd& state) const;
  /// Dense 2^n x 2^n matrix; throws ValidationError above max_dense_ions.
  [[nodiscard]] Eigen::MatrixXcd dense() const;
  /// Gate restricted to ions that take part in at least one nonzero
  /// rotation; `ions` receives their 1-based indices.
  [[nodiscard]] XXRotationGate reduced(std::vector<int>& ions) const;
  /// Product with another gate on the same ions (angles add).
  [[nodiscard]] XXRotationGate then(const XXRotationGate& other) const;

 private:
  Eigen::MatrixXd angles_;
};

/// Dense qubit unitary for a coupling matrix under an illumination profile.
/// Strings above 12 ions throw ValidationError pointing at
/// XXRotationGate::reduced.
Eigen::MatrixXcd qubit_unitary(const Eigen::MatrixXd& coupling, const IlluminationProfile& light);

XXRotationGate gate_from_coupling(const Eigen::MatrixXd& coupling,
                                  const IlluminationProfile& light);

/// |0...0> on n qubits.
Eigen::VectorXcd ground_state(int ion_count);

/// exp(i theta X_{t1} X_{t2}) |0...0>.
Eigen::VectorXcd ideal_state(int ion_count, double theta, int t1, int t2);

/// |<psi_ideal| U |0...0>|^2.
double fidelity(const Eigen::MatrixXcd& unitary, double theta, int t1, int t2);
double fidelity(const XXRotationGate& gate, double theta, int t1, int t2);

/// Factors of the full gate: target-neighbour rotations with angles
/// (c_n / c_t)(J_{t,n} / J_{t1,t2}) Theta, the ideal target rotation by
/// Theta, and every remaining illuminated pair (neighbour-neighbour terms).
struct CrosstalkFactors {
  XXRotationGate crosstalk;
  XXRotationGate ideal;
  XXRotationGate spectator;
};

/// Throws ValidationError when J_{t1,t2} = 0.
CrosstalkFactors crosstalk_decomposition(const Eigen::MatrixXd& coupling, const GateSpec& spec,
                                         const IlluminationProfile& light);

/// Dense U_crosstalk.
Eigen::MatrixXcd crosstalk_unitary(const Eigen::MatrixXd& coupling, const GateSpec& spec,
                                   const IlluminationProfile& light);

/// Parity <Z_a Z_b> after a pi/2 analysis rotation about cos(phi) X + sin(phi) Y
/// on ions a and b, sampled at phi = 2 pi k / samples.
struct ParityCurve {
  int a = 0;
  int b = 0;
  std::vector<double> phi;
  std::vector<double> parity;
  double amplitude = 0.0;      // magnitude of the cos(2 phi) / sin(2 phi) component
  double p00 = 0.0;            // pair populations before the analysis pulse
  double p11 = 0.0;
  double bell_fidelity = 0.0;  // (p00 + p11 + amplitude) / 2
};

ParityCurve parity_scan(const Eigen::VectorXcd& state, int a, int b, int phi_samples);
ParityCurve parity_scan(const XXRotationGate& gate, int a, int b, int phi_samples);

/// chi that drives only `mode` (1-based) with g^{(t1,t2)} . chi = theta / 2.
Eigen::VectorXd single_mode_chi(const ModeSet& modes, int mode, int t1, int t2, double theta);

struct GateReport {
  Eigen::VectorXd chi;
  Eigen::MatrixXd coupling;  // J
  Eigen::MatrixXd angles;    // theta under the illumination profile
  double fidelity = 0.0;
  double bell_fidelity = 0.0;             // target pair
  std::vector<ParityCurve> parity_scans;  // target pair first, then target-neighbour pairs
  Eigen::VectorXd closure_residuals;      // per mode, worst loop, |integral| / (max|w| tau)
};

/// Gate report from chi directly (no schedule).
GateReport simulate_chi(const ModeSet& modes, const Eigen::VectorXd& chi, const GateSpec& spec,
                        const IlluminationProfile& light, int phi_samples);

/// accumulate_chi on the schedule followed by simulate_chi.
GateReport simulate_schedule(const ModeSet& modes, const PulseSchedule& schedule,
                             const GateSpec& spec, const IlluminationProfile& light,
                             int phi_samples, PhaseModel model = PhaseModel::exact);

}  // namespace xtalk
