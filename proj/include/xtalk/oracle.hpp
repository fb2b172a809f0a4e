#pragma once

#include <Eigen/Dense>

#include <vector>

#include "xtalk/modes.hpp"
#include "xtalk/pulses.hpp"
#include "xtalk/simulate.hpp"

namespace xtalk {

struct OracleOptions {
  int fock_cutoff = 8;              // Fock states kept per mode
  double steps_per_period = 40.0;   // steps per period of the fastest drive component
  double halving_tolerance = 1e-6;  // max state difference between dt and 2 dt runs
  bool check_halving = true;
  std::vector<double> snapshot_times;  // seconds from the start of the schedule
};

struct OracleSnapshot {
  double time = 0.0;
  Eigen::MatrixXcd spin_density;  // Z basis
  double entropy = 0.0;           // spin-motion entanglement entropy (nats)
};

struct OracleResult {
  Eigen::MatrixXcd spin_unitary;  // Z basis; vacuum-to-vacuum block of the evolution
  double entropy = 0.0;           // spin-motion entropy at the end, starting from |0...0>
  Eigen::VectorXd mean_phonons;   // per mode at the end, worst spin sector
  double halving_error = 0.0;
  double step = 0.0;              // largest step used, s
  long steps = 0;
  std::vector<OracleSnapshot> snapshots;
};

/// Time-ordered integration of the Lamb-Dicke interaction Hamiltonian
///   H(t) = sum_{j,m} eta_m b_{m,j} c_j f(t) X_j (a_m^dag e^{i nu_m t} + h.c.)
/// over the spin (x) Fock space, starting in the motional vacuum. X_j is
/// conserved, so every X-basis spin configuration evolves its own joint
/// Fock state of all modes. Requires n <= 3 and fock_cutoff <= 8.
/// Throws ConvergenceError if the step-halving check disagrees.
OracleResult full_hamiltonian_oracle(const PulseSchedule& schedule, const ModeSet& modes,
                                     const IlluminationProfile& light,
                                     const OracleOptions& options = {});

/// min over phi of the operator 2-norm of a - e^{i phi} b.
double unitary_distance_up_to_phase(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);

/// Von Neumann entropy (nats) of a density matrix.
double von_neumann_entropy(const Eigen::MatrixXcd& rho);

/// 1 - Tr(rho_j^2) for ion j of an n-qubit density matrix (Z basis).
double single_ion_linear_entropy(const Eigen::MatrixXcd& rho, int ion);

}  // namespace xtalk
