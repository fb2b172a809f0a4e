#pragma once

#include <Eigen/Dense>

namespace xtalk {

struct NnlsResult {
  Eigen::VectorXd x;
  double residual = 0.0;  // ||A x - b||_2
  int iterations = 0;
};

/// Lawson-Hanson active-set solution of min ||A x - b|| subject to x >= 0.
/// tolerance <= 0 picks 10 * eps * ||A||_1 * max(rows, cols).
NnlsResult nnls(const Eigen::MatrixXd& a, const Eigen::VectorXd& b, double tolerance = 0.0,
                int max_iterations = 0);

}  // namespace xtalk
