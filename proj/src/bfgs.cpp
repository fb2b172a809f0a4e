#include "xtalk/bfgs.hpp"

#include <cmath>

namespace xtalk {

namespace {

constexpr double c1 = 1e-4;
constexpr double c2 = 0.9;

struct Probe {
  double t = 0.0;
  double f = 0.0;
  double slope = 0.0;
  Eigen::VectorXd grad;
};

Probe probe(const Objective& f, const Eigen::VectorXd& x, const Eigen::VectorXd& dir, double t) {
  Probe p;
  p.t = t;
  p.grad.resize(x.size());
  p.f = f(x + t * dir, p.grad);
  p.slope = p.grad.dot(dir);
  return p;
}

// Zoom phase of the strong Wolfe search between lo (satisfies Armijo) and hi.
Probe zoom(const Objective& f, const Eigen::VectorXd& x, const Eigen::VectorXd& dir,
           const Probe& start, Probe lo, Probe hi) {
  for (int k = 0; k < 40; ++k) {
    // Safeguarded quadratic interpolation on (lo.f, lo.slope, hi.f).
    const double dt = hi.t - lo.t;
    const double denom = 2.0 * (hi.f - lo.f - lo.slope * dt);
    double t = lo.t + 0.5 * dt;
    if (denom > 0.0) {
      const double tq = lo.t - lo.slope * dt * dt / denom;
      const double a = std::min(lo.t, hi.t), b = std::max(lo.t, hi.t);
      if (tq > a + 0.1 * (b - a) && tq < b - 0.1 * (b - a)) t = tq;
    }
    Probe p = probe(f, x, dir, t);
    if (!std::isfinite(p.f) || p.f > start.f + c1 * t * start.slope || p.f >= lo.f) {
      hi = p;
    } else {
      if (std::abs(p.slope) <= -c2 * start.slope) return p;
      if (p.slope * (hi.t - lo.t) >= 0.0) hi = lo;
      lo = p;
    }
    if (std::abs(hi.t - lo.t) < 1e-16 * std::max(1.0, lo.t)) break;
  }
  return lo;
}

Probe line_search(const Objective& f, const Eigen::VectorXd& x, const Eigen::VectorXd& dir,
                  const Probe& start) {
  Probe prev = start;
  double t = 1.0;
  for (int k = 0; k < 50; ++k) {
    Probe p = probe(f, x, dir, t);
    if (!std::isfinite(p.f) || p.f > start.f + c1 * t * start.slope ||
        (k > 0 && p.f >= prev.f))
      return zoom(f, x, dir, start, prev, p);
    if (std::abs(p.slope) <= -c2 * start.slope) return p;
    if (p.slope >= 0.0) return zoom(f, x, dir, start, p, prev);
    prev = p;
    t *= 2.0;
  }
  return prev;
}

}  // namespace

BfgsResult bfgs_minimize(const Objective& f, Eigen::VectorXd x0, const BfgsOptions& options) {
  const Eigen::Index n = x0.size();
  BfgsResult out;
  out.x = std::move(x0);
  Eigen::VectorXd grad(n);
  out.value = f(out.x, grad);
  Eigen::MatrixXd hinv = Eigen::MatrixXd::Identity(n, n);
  bool scaled = false;

  for (int it = 0; it < options.max_iterations; ++it) {
    out.iterations = it;
    if (grad.cwiseAbs().maxCoeff() < options.gradient_tolerance) {
      out.converged = true;
      return out;
    }
    Eigen::VectorXd dir = -hinv * grad;
    double slope = grad.dot(dir);
    if (!(slope < 0.0)) {
      hinv.setIdentity();
      dir = -grad;
      slope = grad.dot(dir);
    }
    Probe start;
    start.f = out.value;
    start.slope = slope;
    start.grad = grad;
    const Probe step = line_search(f, out.x, dir, start);
    if (step.t == 0.0) {
      if (hinv.isIdentity()) return out;  // no descent possible along -grad
      hinv.setIdentity();
      continue;
    }
    const Eigen::VectorXd s = step.t * dir;
    const Eigen::VectorXd y = step.grad - grad;
    out.x += s;
    out.value = step.f;
    grad = step.grad;
    if (s.norm() <= options.step_tolerance * std::max(1.0, out.x.norm())) {
      out.converged = true;
      return out;
    }
    const double sy = s.dot(y);
    if (sy > 1e-300) {
      if (!scaled) {
        hinv *= sy / y.squaredNorm();
        scaled = true;
      }
      const double rho = 1.0 / sy;
      const Eigen::VectorXd hy = hinv * y;
      hinv += ((sy + y.dot(hy)) * rho * rho) * (s * s.transpose()) -
              rho * (hy * s.transpose() + s * hy.transpose());
    }
  }
  out.iterations = options.max_iterations;
  out.converged = grad.cwiseAbs().maxCoeff() < options.gradient_tolerance;
  return out;
}

}  // namespace xtalk
