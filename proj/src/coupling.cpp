#include "xtalk/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "xtalk/errors.hpp"
#include "xtalk/units.hpp"

namespace xtalk {

std::vector<std::pair<int, int>> GateSpec::crosstalk_pairs() const {
  std::vector<std::pair<int, int>> pairs;
  for (int t : {t1, t2})
    for (int n : neighbors) pairs.emplace_back(t, n);
  return pairs;
}

void GateSpec::validate(int ion_count) const {
  auto fail = [](const std::string& msg) { throw ValidationError("gate spec: " + msg); };
  if (t1 < 1 || t2 > ion_count || t1 >= t2) {
    std::ostringstream msg;
    msg << "targets (" << t1 << ", " << t2 << ") must satisfy 1 <= t1 < t2 <= " << ion_count;
    fail(msg.str());
  }
  if (neighbors.size() > 4) fail("at most four neighbour ions");
  for (int n : neighbors) {
    if (n < 1 || n > ion_count) fail("neighbour index out of range");
    if (n == t1 || n == t2) fail("neighbour set must not contain a target");
  }
  if (std::set<int>(neighbors.begin(), neighbors.end()).size() != neighbors.size())
    fail("duplicate neighbour index");
  if (!(epsilon >= 0.0 && epsilon < 1.0)) fail("epsilon must lie in [0, 1)");
  if (!std::isfinite(theta)) fail("theta must be finite");
}

std::vector<int> default_neighbors(int ion_count, int t1, int t2) {
  std::set<int> s;
  for (int c : {t1 - 1, t1 + 1, t2 - 1, t2 + 1})
    if (c >= 1 && c <= ion_count && c != t1 && c != t2) s.insert(c);
  return {s.begin(), s.end()};
}

GateSpec make_gate_spec(int ion_count, int t1, int t2, double theta, double epsilon,
                        std::optional<std::vector<int>> neighbors) {
  GateSpec spec;
  spec.t1 = t1;
  spec.t2 = t2;
  spec.theta = theta;
  spec.epsilon = epsilon;
  if (neighbors) {
    spec.neighbors = *neighbors;
    std::sort(spec.neighbors.begin(), spec.neighbors.end());
  } else {
    spec.neighbors = default_neighbors(ion_count, t1, t2);
  }
  spec.validate(ion_count);
  return spec;
}

Eigen::VectorXd g_vector(const ModeSet& modes, int j1, int j2) {
  const int n = modes.size();
  if (j1 < 1 || j1 > n || j2 < 1 || j2 > n) throw ValidationError("g_vector: ion index out of range");
  return modes.participation.col(j1 - 1).cwiseProduct(modes.participation.col(j2 - 1));
}

Eigen::MatrixXd crosstalk_matrix(const ModeSet& modes, const GateSpec& spec) {
  const auto pairs = spec.crosstalk_pairs();
  Eigen::MatrixXd r(modes.size(), static_cast<Eigen::Index>(pairs.size()));
  for (std::size_t k = 0; k < pairs.size(); ++k)
    r.col(static_cast<Eigen::Index>(k)) = g_vector(modes, pairs[k].first, pairs[k].second);
  return r;
}

CouplingAnalysis crosstalk_analysis(const ModeSet& modes, const GateSpec& spec,
                                    double rank_tolerance) {
  spec.validate(modes.size());
  const int n = modes.size();
  CouplingAnalysis out;
  out.g_target = g_vector(modes, spec.t1, spec.t2);
  out.crosstalk_matrix = crosstalk_matrix(modes, spec);

  if (out.crosstalk_matrix.cols() == 0) {
    out.rank = 0;
    out.null_basis = Eigen::MatrixXd::Identity(n, n);
  } else {
    // Left singular vectors beyond the numerical rank span Null(R^T).
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(out.crosstalk_matrix, Eigen::ComputeFullU);
    const Eigen::VectorXd& sigma = svd.singularValues();
    const double cutoff = rank_tolerance * sigma(0);
    int rank = 0;
    for (Eigen::Index i = 0; i < sigma.size(); ++i)
      if (sigma(i) > cutoff) ++rank;
    out.rank = rank;
    out.null_basis = svd.matrixU().rightCols(n - rank);
  }

  const double gnorm = out.g_target.norm();
  out.independence =
      gnorm > 0.0 ? (out.null_basis.transpose() * out.g_target).norm() / gnorm : 0.0;
  return out;
}

Eigen::MatrixXd independence_map(const ModeSet& modes) {
  const int n = modes.size();
  if (n < 3) throw ValidationError("independence_map needs at least three ions");
  Eigen::MatrixXd map = Eigen::MatrixXd::Zero(n, n);
  for (int t1 = 1; t1 <= n; ++t1)
    for (int t2 = t1 + 1; t2 <= n; ++t2)
      map(t1 - 1, t2 - 1) =
          crosstalk_analysis(modes, make_gate_spec(n, t1, t2, 0.0, 0.0)).independence;
  return map;
}

std::vector<std::pair<int, int>> feasible_pairs(const Eigen::MatrixXd& independence,
                                                double threshold) {
  std::vector<std::pair<int, int>> out;
  for (Eigen::Index i = 0; i < independence.rows(); ++i)
    for (Eigen::Index j = i + 1; j < independence.cols(); ++j)
      if (independence(i, j) > threshold)
        out.emplace_back(static_cast<int>(i + 1), static_cast<int>(j + 1));
  return out;
}

Eigen::VectorXd cosine_vector(int n, int h) {
  Eigen::VectorXd c(n);
  for (int m = 1; m <= n; ++m) c(m - 1) = 2.0 * std::cos(h * (m - 1) * units::pi / n);
  return c;
}

Eigen::VectorXd analytic_insensitive_chi(int n, int t1, int t2) {
  if (!(t1 < t2) || t1 < 1 || t2 > n)
    throw ValidationError("analytic_insensitive_chi: need 1 <= t1 < t2 <= n");
  if (t1 == 1 || t2 == n) {
    std::ostringstream msg;
    msg << "analytic_insensitive_chi: targets (" << t1 << ", " << t2
        << ") include an edge ion; the cosine construction only cancels crosstalk when "
           "t1 != 1 and t2 != "
        << n;
    throw ValidationError(msg.str());
  }
  return cosine_vector(n, t2 - t1);
}

}  // namespace xtalk
