#pragma once

#include <Eigen/Dense>

#include <limits>
#include <string_view>
#include <vector>

#include "xtalk/modes.hpp"

namespace xtalk {

/// One amplitude-modulated bichromatic loop. The drive is
/// f(t) = w_s sin(detuning * t) on segment s, with t measured from the start
/// of the loop and D equal-length segments.
struct PulseLoop {
  double detuning = 0.0;       // omega_d, rad/s
  double duration = 0.0;       // tau_loop, s
  Eigen::VectorXd amplitudes;  // w_s, rad/s

  [[nodiscard]] int segments() const { return static_cast<int>(amplitudes.size()); }
  /// Start and end of segment s (0-based) as exact fractions of the duration.
  [[nodiscard]] double segment_start(int s) const;
  [[nodiscard]] double segment_end(int s) const;
  [[nodiscard]] double peak() const;
  /// Throws ValidationError for non-positive duration, no segments,
  /// non-finite values or a peak amplitude above power_ceiling.
  void validate(double power_ceiling = std::numeric_limits<double>::infinity()) const;
};

struct PulseSchedule {
  std::vector<PulseLoop> loops;

  [[nodiscard]] double total_duration() const;
  [[nodiscard]] double peak() const;
  void validate(double power_ceiling = std::numeric_limits<double>::infinity()) const;
};

/// Spin-dependent phase per mode. chi_m already contains eta_m^2 and the
/// shared amplitude profile, so J = g . chi.
struct PhaseVector {
  Eigen::VectorXd chi;
};

/// How the double time integral of the spin-dependent phase is evaluated.
/// `exact` keeps both sidebands of sin(omega_d t); `rotating_wave` keeps only
/// the slowly rotating term sin((omega_d - nu)(t1 - t2)) with weight -1/4.
enum class PhaseModel { exact, rotating_wave };

std::string_view to_string(PhaseModel model);

/// Per-mode integral of e^{i nu_m t} f(t) over the loop (no eta factor).
Eigen::VectorXcd closure_residual(const PulseLoop& loop, const ModeSet& modes);

/// 2N x D real constraint matrix: rows 2m and 2m+1 hold the real and
/// imaginary parts of mode m's unit-amplitude segment integrals.
Eigen::MatrixXd closure_constraints(const ModeSet& modes, double detuning, double duration,
                                    int segments);

/// Orthonormal D x (D - rank) basis of amplitude vectors that close every
/// mode. Throws ValidationError when segments <= 2N.
Eigen::MatrixXd closure_basis(const ModeSet& modes, double detuning, double duration,
                              int segments);

/// Matrices P^{(m)} with chi_m = w^T P^{(m)} w for a single loop.
std::vector<Eigen::MatrixXd> phase_matrix(const ModeSet& modes, double detuning, double duration,
                                          int segments,
                                          PhaseModel model = PhaseModel::rotating_wave);

/// chi of one loop, without a closure check.
PhaseVector loop_chi(const PulseLoop& loop, const ModeSet& modes,
                     PhaseModel model = PhaseModel::exact);

/// Largest |closure residual| a loop may leave, relative to max|w| * tau_loop.
inline constexpr double closure_tolerance = 1e-8;

/// Sum of per-loop chi. Throws ClosureError naming the first loop whose
/// residual exceeds closure_tolerance * max|w| * tau_loop.
PhaseVector accumulate_chi(const PulseSchedule& schedule, const ModeSet& modes,
                           PhaseModel model = PhaseModel::exact);

/// alpha_m(t) = eta_m * integral_0^t f(t') e^{i nu_m t'} dt' on `samples`
/// uniformly spaced times from 0 to tau_loop; N x samples.
Eigen::MatrixXcd trajectory(const PulseLoop& loop, const ModeSet& modes, int samples);

}  // namespace xtalk
