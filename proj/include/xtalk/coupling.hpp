#pragma once

#include <Eigen/Dense>

#include <optional>
#include <utility>
#include <vector>

#include "xtalk/modes.hpp"

namespace xtalk {

/// Target pair, crosstalk-affected neighbours and the requested rotation.
/// Ion indices are 1-based.
struct GateSpec {
  int t1 = 0;
  int t2 = 0;
  std::vector<int> neighbors;  // sorted, disjoint from {t1, t2}
  double theta = 0.0;          // target XX rotation angle
  double epsilon = 0.0;        // worst-case neighbour/target Rabi ratio

  /// Targets first, then every (target, neighbour) combination.
  [[nodiscard]] std::vector<std::pair<int, int>> crosstalk_pairs() const;
  /// Throws ValidationError if the gate does not fit an n-ion string.
  void validate(int ion_count) const;
};

/// Nearest neighbours {t1-1, t1+1, t2-1, t2+1} clipped to [1, n] minus the targets.
std::vector<int> default_neighbors(int ion_count, int t1, int t2);

/// Builds and validates a spec; `neighbors` defaults to default_neighbors().
GateSpec make_gate_spec(int ion_count, int t1, int t2, double theta, double epsilon,
                        std::optional<std::vector<int>> neighbors = std::nullopt);

struct CouplingAnalysis {
  Eigen::VectorXd g_target;         // g^{(t1,t2)}
  Eigen::MatrixXd crosstalk_matrix; // R, one column g^{(t,n)} per crosstalk pair
  Eigen::MatrixXd null_basis;       // orthonormal columns spanning {v : R^T v = 0}
  int rank = 0;                     // numerical rank of R
  double independence = 0.0;        // |P_null g_target| / |g_target|
};

/// g^{(j1,j2)}_m = b_{m,j1} b_{m,j2}, 1-based ions.
Eigen::VectorXd g_vector(const ModeSet& modes, int j1, int j2);

/// Crosstalk matrix R for a spec (N x |T x N|; zero columns if no neighbours).
Eigen::MatrixXd crosstalk_matrix(const ModeSet& modes, const GateSpec& spec);

/// Null space and independence metric. Singular values below
/// rank_tolerance * sigma_max count as zero.
CouplingAnalysis crosstalk_analysis(const ModeSet& modes, const GateSpec& spec,
                                    double rank_tolerance = 1e-9);

/// Upper-triangular independence values for every pair with the default
/// neighbour sets; entry (t1-1, t2-1) for t1 < t2, zero elsewhere.
Eigen::MatrixXd independence_map(const ModeSet& modes);

/// Pairs (t1, t2), t1 < t2, whose independence exceeds the threshold.
std::vector<std::pair<int, int>> feasible_pairs(const Eigen::MatrixXd& independence,
                                                double threshold = 0.1);

/// Cosine phase vector for sinusoidal modes, C_m = 2 cos(h (m - 1) pi / n)
/// with h = t2 - t1, normalised so that C . g^{(t1,t2)} = 1. Edge targets
/// throw ValidationError.
///
/// C^{(h)} . g^{(j1,j2)} = [h = j2 - j1] + [h = j1 + j2 - 1] + [h = 2n + 1 - j1 - j2],
/// so C cancels a target-neighbour coupling only when none of those three
/// separations equals h. Adjacent targets (h = 1) never qualify because each
/// target has a neighbour one site away; crosstalk_analysis gives the
/// insensitive direction in every case.
Eigen::VectorXd analytic_insensitive_chi(int n, int t1, int t2);

/// The cosine vector C^{(h)} for arbitrary h (no target checks).
Eigen::VectorXd cosine_vector(int n, int h);

}  // namespace xtalk
