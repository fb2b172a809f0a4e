#include "xtalk/pulses.hpp"

#include <cmath>
#include <sstream>

#include "xtalk/errors.hpp"
#include "xtalk/segment_integrals.hpp"

namespace xtalk {

namespace {

double boundary(double duration, int s, int segments) {
  return duration * static_cast<double>(s) / static_cast<double>(segments);
}

}  // namespace

double PulseLoop::segment_start(int s) const { return boundary(duration, s, segments()); }
double PulseLoop::segment_end(int s) const { return boundary(duration, s + 1, segments()); }

double PulseLoop::peak() const {
  return amplitudes.size() == 0 ? 0.0 : amplitudes.cwiseAbs().maxCoeff();
}

void PulseLoop::validate(double power_ceiling) const {
  auto fail = [](const std::string& msg) { throw ValidationError("pulse loop: " + msg); };
  if (!(duration > 0.0) || !std::isfinite(duration)) fail("duration must be positive");
  if (amplitudes.size() == 0) fail("at least one segment required");
  if (!std::isfinite(detuning)) fail("detuning must be finite");
  if (!amplitudes.allFinite()) fail("amplitudes must be finite");
  if (peak() > power_ceiling) {
    std::ostringstream msg;
    msg << "peak amplitude " << peak() << " rad/s exceeds ceiling " << power_ceiling;
    fail(msg.str());
  }
}

double PulseSchedule::total_duration() const {
  double t = 0.0;
  for (const auto& l : loops) t += l.duration;
  return t;
}

double PulseSchedule::peak() const {
  double p = 0.0;
  for (const auto& l : loops) p = std::max(p, l.peak());
  return p;
}

void PulseSchedule::validate(double power_ceiling) const {
  for (const auto& l : loops) l.validate(power_ceiling);
}

std::string_view to_string(PhaseModel model) {
  return model == PhaseModel::exact ? "exact" : "rotating_wave";
}

Eigen::VectorXcd closure_residual(const PulseLoop& loop, const ModeSet& modes) {
  const int n = modes.size();
  Eigen::VectorXcd r = Eigen::VectorXcd::Zero(n);
  for (int m = 0; m < n; ++m)
    for (int s = 0; s < loop.segments(); ++s)
      r(m) += loop.amplitudes(s) * segment::drive_integral(modes.freqs(m), loop.detuning,
                                                           loop.segment_start(s),
                                                           loop.segment_end(s));
  return r;
}

Eigen::MatrixXd closure_constraints(const ModeSet& modes, double detuning, double duration,
                                    int segments) {
  const int n = modes.size();
  Eigen::MatrixXd a(2 * n, segments);
  for (int m = 0; m < n; ++m) {
    for (int s = 0; s < segments; ++s) {
      const auto f = segment::drive_integral(modes.freqs(m), detuning,
                                             boundary(duration, s, segments),
                                             boundary(duration, s + 1, segments));
      a(2 * m, s) = f.real();
      a(2 * m + 1, s) = f.imag();
    }
  }
  return a;
}

Eigen::MatrixXd closure_basis(const ModeSet& modes, double detuning, double duration,
                              int segments) {
  const int n = modes.size();
  if (segments <= 2 * n) {
    std::ostringstream msg;
    msg << "closure_basis: " << segments << " segments cannot close " << n
        << " modes; need more than " << 2 * n;
    throw ValidationError(msg.str());
  }
  const Eigen::MatrixXd a = closure_constraints(modes, detuning, duration, segments);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  const Eigen::VectorXd& sigma = svd.singularValues();
  int rank = 0;
  for (Eigen::Index i = 0; i < sigma.size(); ++i)
    if (sigma(i) > 1e-12 * sigma(0)) ++rank;
  return svd.matrixV().rightCols(segments - rank);
}

std::vector<Eigen::MatrixXd> phase_matrix(const ModeSet& modes, double detuning, double duration,
                                          int segments, PhaseModel model) {
  const int n = modes.size();
  std::vector<Eigen::MatrixXd> out;
  out.reserve(n);
  std::vector<segment::cplx> f(segments);
  for (int m = 0; m < n; ++m) {
    const double nu = modes.freqs(m);
    const double eta2 = modes.lamb_dicke(m) * modes.lamb_dicke(m);
    Eigen::MatrixXd p(segments, segments);
    if (model == PhaseModel::exact) {
      for (int s = 0; s < segments; ++s)
        f[s] = segment::drive_integral(nu, detuning, boundary(duration, s, segments),
                                       boundary(duration, s + 1, segments));
      for (int s1 = 0; s1 < segments; ++s1) {
        p(s1, s1) = segment::exact_triangle(nu, detuning, boundary(duration, s1, segments),
                                            boundary(duration, s1 + 1, segments));
        for (int s2 = 0; s2 < s1; ++s2)
          p(s1, s2) = p(s2, s1) = 0.5 * (f[s1] * std::conj(f[s2])).imag();
      }
      p *= eta2;
    } else {
      const double delta = detuning - nu;
      for (int s = 0; s < segments; ++s)
        f[s] = segment::exp_integral(delta, boundary(duration, s, segments),
                                     boundary(duration, s + 1, segments));
      for (int s1 = 0; s1 < segments; ++s1) {
        const double h = boundary(duration, s1 + 1, segments) - boundary(duration, s1, segments);
        p(s1, s1) = segment::rwa_triangle(delta, h);
        for (int s2 = 0; s2 < s1; ++s2)
          p(s1, s2) = p(s2, s1) = 0.5 * (f[s1] * std::conj(f[s2])).imag();
      }
      p *= -0.25 * eta2;
    }
    out.push_back(std::move(p));
  }
  return out;
}

PhaseVector loop_chi(const PulseLoop& loop, const ModeSet& modes, PhaseModel model) {
  const auto ps = phase_matrix(modes, loop.detuning, loop.duration, loop.segments(), model);
  PhaseVector out;
  out.chi.resize(modes.size());
  for (int m = 0; m < modes.size(); ++m)
    out.chi(m) = loop.amplitudes.dot(ps[m] * loop.amplitudes);
  return out;
}

PhaseVector accumulate_chi(const PulseSchedule& schedule, const ModeSet& modes,
                           PhaseModel model) {
  PhaseVector total;
  total.chi = Eigen::VectorXd::Zero(modes.size());
  for (std::size_t l = 0; l < schedule.loops.size(); ++l) {
    const PulseLoop& loop = schedule.loops[l];
    loop.validate();
    const double residual = closure_residual(loop, modes).cwiseAbs().maxCoeff();
    const double scale = loop.peak() * loop.duration;
    if (residual > closure_tolerance * scale) {
      std::ostringstream msg;
      msg << "loop " << l << " does not close its modes: residual " << residual
          << " exceeds " << closure_tolerance << " * max|w| * tau_loop = "
          << closure_tolerance * scale;
      throw ClosureError(msg.str(), l, residual);
    }
    total.chi += loop_chi(loop, modes, model).chi;
  }
  return total;
}

Eigen::MatrixXcd trajectory(const PulseLoop& loop, const ModeSet& modes, int samples) {
  if (samples < 2) throw ValidationError("trajectory: need at least two samples");
  loop.validate();
  const int n = modes.size();
  const int d = loop.segments();
  Eigen::MatrixXcd path(n, samples);
  for (int m = 0; m < n; ++m) {
    const double nu = modes.freqs(m);
    segment::cplx completed{0.0, 0.0};
    int seg = 0;
    for (int k = 0; k < samples; ++k) {
      const double t = boundary(loop.duration, k, samples - 1);
      while (seg < d && loop.segment_end(seg) <= t) {
        completed += loop.amplitudes(seg) *
                     segment::drive_integral(nu, loop.detuning, loop.segment_start(seg),
                                             loop.segment_end(seg));
        ++seg;
      }
      segment::cplx partial{0.0, 0.0};
      if (seg < d && t > loop.segment_start(seg))
        partial = loop.amplitudes(seg) *
                  segment::drive_integral(nu, loop.detuning, loop.segment_start(seg), t);
      path(m, k) = modes.lamb_dicke(m) * (completed + partial);
    }
  }
  return path;
}

}  // namespace xtalk
