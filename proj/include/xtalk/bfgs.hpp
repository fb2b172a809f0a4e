#pragma once

#include <Eigen/Dense>

#include <functional>

namespace xtalk {

/// Returns f(x) and writes the gradient into `grad` (already sized).
using Objective = std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd& grad)>;

struct BfgsOptions {
  int max_iterations = 1000;
  double gradient_tolerance = 1e-10;  // on ||grad||_inf
  double step_tolerance = 1e-15;      // relative change in x
};

struct BfgsResult {
  Eigen::VectorXd x;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Dense BFGS with a strong Wolfe line search.
BfgsResult bfgs_minimize(const Objective& f, Eigen::VectorXd x0, const BfgsOptions& options = {});

}  // namespace xtalk
