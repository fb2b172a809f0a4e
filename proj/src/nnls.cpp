#include "xtalk/nnls.hpp"

#include <limits>
#include <vector>

#include "xtalk/errors.hpp"

namespace xtalk {

namespace {

// Unconstrained least squares restricted to the passive columns.
Eigen::VectorXd passive_solve(const Eigen::MatrixXd& a, const Eigen::VectorXd& b,
                              const std::vector<bool>& passive) {
  std::vector<Eigen::Index> cols;
  for (Eigen::Index j = 0; j < a.cols(); ++j)
    if (passive[j]) cols.push_back(j);
  Eigen::MatrixXd sub(a.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t k = 0; k < cols.size(); ++k) sub.col(k) = a.col(cols[k]);
  const Eigen::VectorXd zs = sub.completeOrthogonalDecomposition().solve(b);
  Eigen::VectorXd z = Eigen::VectorXd::Zero(a.cols());
  for (std::size_t k = 0; k < cols.size(); ++k) z(cols[k]) = zs(k);
  return z;
}

}  // namespace

NnlsResult nnls(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, double tolerance,
                int max_iterations) {
  if (a.rows() != b.size()) throw ValidationError("nnls: A and b have mismatched rows");
  const Eigen::Index n = a.cols();
  if (tolerance <= 0.0)
    tolerance = 10.0 * std::numeric_limits<double>::epsilon() *
                a.cwiseAbs().colwise().sum().maxCoeff() *
                static_cast<double>(std::max(a.rows(), n));
  if (max_iterations <= 0) max_iterations = static_cast<int>(3 * n) + 10;

  NnlsResult out;
  out.x = Eigen::VectorXd::Zero(n);
  std::vector<bool> passive(n, false);
  std::vector<bool> rejected(n, false);  // reset whenever x moves
  Eigen::VectorXd& x = out.x;

  int it = 0;
  while (true) {
    const Eigen::VectorXd w = a.transpose() * (b - a * x);
    Eigen::Index pick = -1;
    double best = tolerance;
    for (Eigen::Index j = 0; j < n; ++j)
      if (!passive[j] && !rejected[j] && w(j) > best) {
        best = w(j);
        pick = j;
      }
    if (pick < 0) break;
    if (++it > max_iterations) {
      out.iterations = it;
      out.residual = (a * x - b).norm();
      throw ConvergenceError("nnls: iteration budget exhausted", out.residual);
    }
    passive[pick] = true;

    Eigen::VectorXd z = passive_solve(a, b, passive);
    if (z(pick) <= 0.0) {
      // Column is numerically dependent on the passive set; skip it until x changes.
      passive[pick] = false;
      rejected[pick] = true;
      continue;
    }
    std::fill(rejected.begin(), rejected.end(), false);

    // Inner loop: step back toward the feasible region until z is positive.
    while (true) {
      double alpha = 1.0;
      bool blocked = false;
      for (Eigen::Index j = 0; j < n; ++j)
        if (passive[j] && z(j) <= 0.0) {
          blocked = true;
          alpha = std::min(alpha, x(j) / (x(j) - z(j)));
        }
      if (!blocked) break;
      x += alpha * (z - x);
      const double drop = 1e-14 * x.cwiseAbs().maxCoeff();
      for (Eigen::Index j = 0; j < n; ++j)
        if (passive[j] && x(j) <= drop) {
          passive[j] = false;
          x(j) = 0.0;
        }
      z = passive_solve(a, b, passive);
    }
    x = z;
  }
  out.iterations = it;
  out.residual = (a * x - b).norm();
  return out;
}

}  // namespace xtalk
