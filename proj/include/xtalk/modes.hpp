#pragma once

#include <Eigen/Dense>

#include <string_view>

namespace xtalk {

/// Physical description of a linear Paul-trap ion string. All quantities SI,
/// frequencies angular (rad/s).
struct TrapConfig {
  int ion_count = 0;
  double ion_mass = 0.0;        // kg
  double axial_freq = 0.0;      // omega_z
  double radial_freq = 0.0;     // omega_x
  double raman_delta_k = 0.0;   // 1/m

  /// Throws ValidationError unless radial > axial > 0, ion_count >= 2 and
  /// mass, delta-k are strictly positive.
  void validate() const;

  /// Coulomb length scale (e^2 / (4 pi eps0 M omega_z^2))^(1/3), metres.
  [[nodiscard]] double length_scale() const;
};

/// 171Yb+ string driven by counter-propagating 355 nm Raman beams.
/// raman_geometry_factor multiplies 2*pi/lambda (sqrt(2) for the 90-degree
/// counter-propagating geometry).
TrapConfig yb171_trap(int ion_count, double axial_freq, double radial_freq,
                      double raman_wavelength = 355e-9,
                      double raman_geometry_factor = 1.4142135623730951);

enum class ModeSource { harmonic, sinusoidal };

std::string_view to_string(ModeSource source);

/// Transverse normal modes of an N-ion string.
///
/// Row m of `participation` is mode m and column j is ion j (0-based in
/// storage, 1-based in every user-facing index). Rows are orthonormal and
/// participation(m, 0) >= 0. For harmonic strings the modes are ordered by
/// ascending frequency so the centre-of-mass mode is last; sinusoidal sets
/// keep the closed-form index order where mode 1 is uniform.
struct ModeSet {
  Eigen::VectorXd freqs;          // nu_m, rad/s
  Eigen::VectorXd lamb_dicke;     // eta_m
  Eigen::MatrixXd participation;  // b_{m,j}
  ModeSource source = ModeSource::harmonic;

  [[nodiscard]] int size() const { return static_cast<int>(participation.rows()); }
  /// b_{m,j} with 1-based mode and ion indices.
  [[nodiscard]] double b(int mode, int ion) const { return participation(mode - 1, ion - 1); }
};

/// Harmonic-plus-Coulomb equilibrium positions in metres, ascending.
/// Throws ConvergenceError if the damped Newton solve stalls.
Eigen::VectorXd equilibrium_positions(const TrapConfig& config);

/// Same solve in dimensionless units u = x / length_scale.
Eigen::VectorXd equilibrium_positions_dimensionless(int ion_count);

/// Largest |force| on any ion at dimensionless positions u.
double equilibrium_force_residual(const Eigen::VectorXd& u);

/// Transverse modes from the linearised Coulomb crystal. Throws
/// UnstableStringError when any nu_m^2 <= 0.
ModeSet harmonic_modes(const TrapConfig& config);

/// Idealised equispaced-string modes
///   b_{m,j} = sqrt((2 - delta_{m,1}) / n) cos((2j - 1)(m - 1) pi / (2n)).
/// Frequencies and Lamb-Dicke parameters are left zero.
ModeSet sinusoidal_modes(int n);

/// Sinusoidal participation plus a synthetic frequency band: mode m sits at
/// top_freq - (m - 1) * spacing, with eta computed from mass and delta-k as
/// for the harmonic case.
ModeSet sinusoidal_modes(int n, double top_freq, double spacing, double ion_mass,
                         double raman_delta_k);

/// eta = delta_k * sqrt(hbar / (2 M nu)).
double lamb_dicke_parameter(double raman_delta_k, double ion_mass, double mode_freq);

}  // namespace xtalk
