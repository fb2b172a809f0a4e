#pragma once

#include <complex>

// Closed-form integrals of complex exponentials over one constant-amplitude
// pulse segment. Every routine stays accurate when a frequency argument is
// zero or nearly cancels, which happens whenever the drive sits on a sideband.

namespace xtalk::segment {

using cplx = std::complex<double>;

/// (e^{ix} - 1) / (ix) for real x, without cancellation near x = 0.
cplx phi1_imag(double x);

/// Integral of e^{i k t} over [a, b].
cplx exp_integral(double k, double a, double b);

/// Integral of e^{i nu t} sin(w t) over [a, b]: the per-segment mode
/// displacement for unit amplitude.
cplx drive_integral(double nu, double w, double a, double b);

/// Ordered double integral over the triangle 0 <= y <= x <= h of
/// e^{i p x} e^{i q y}.
cplx triangle_integral(double p, double q, double h);

/// Triangle block of the exact spin-dependent phase for one segment [a, b]:
/// integral over a <= t2 <= t1 <= b of sin(nu (t1 - t2)) sin(w t1) sin(w t2).
double exact_triangle(double nu, double w, double a, double b);

/// Triangle block of the rotating-wave phase for a segment of length h:
/// integral over 0 <= t2 <= t1 <= h of sin(delta (t1 - t2)).
double rwa_triangle(double delta, double h);

}  // namespace xtalk::segment
