#include "xtalk/modes.hpp"

#include <cmath>
#include <sstream>

#include "xtalk/errors.hpp"
#include "xtalk/units.hpp"

namespace xtalk {

void TrapConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ValidationError("trap config: " + msg); };
  if (ion_count < 2) fail("ion_count must be >= 2");
  if (!(ion_mass > 0.0)) fail("ion_mass must be positive");
  if (!(axial_freq > 0.0)) fail("axial frequency must be positive");
  if (!(radial_freq > axial_freq))
    fail("radial frequency must exceed axial frequency for a linear string");
  if (!(raman_delta_k > 0.0)) fail("raman delta-k must be positive");
}

double TrapConfig::length_scale() const {
  const double k_e = units::elementary_charge * units::elementary_charge /
                     (4.0 * units::pi * units::vacuum_permittivity);
  return std::cbrt(k_e / (ion_mass * axial_freq * axial_freq));
}

TrapConfig yb171_trap(int ion_count, double axial_freq, double radial_freq,
                      double raman_wavelength, double raman_geometry_factor) {
  TrapConfig c;
  c.ion_count = ion_count;
  c.ion_mass = units::yb171_mass_amu * units::atomic_mass_unit;
  c.axial_freq = axial_freq;
  c.radial_freq = radial_freq;
  c.raman_delta_k = raman_geometry_factor * units::two_pi / raman_wavelength;
  return c;
}

std::string_view to_string(ModeSource source) {
  return source == ModeSource::harmonic ? "harmonic" : "sinusoidal";
}

double equilibrium_force_residual(const Eigen::VectorXd& u) {
  const Eigen::Index n = u.size();
  double worst = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    double f = u(j);
    for (Eigen::Index k = 0; k < n; ++k) {
      if (k == j) continue;
      const double d = u(j) - u(k);
      f -= std::copysign(1.0 / (d * d), d);
    }
    worst = std::max(worst, std::abs(f));
  }
  return worst;
}

namespace {

// Force F_j = u_j - sum_k sign(u_j - u_k) / (u_j - u_k)^2 and its Jacobian.
void force_and_jacobian(const Eigen::VectorXd& u, Eigen::VectorXd& force, Eigen::MatrixXd& jac) {
  const Eigen::Index n = u.size();
  force.resize(n);
  jac.setZero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    force(j) = u(j);
    jac(j, j) = 1.0;
    for (Eigen::Index k = 0; k < n; ++k) {
      if (k == j) continue;
      const double d = u(j) - u(k);
      const double ad = std::abs(d);
      force(j) -= std::copysign(1.0 / (d * d), d);
      const double c = 2.0 / (ad * ad * ad);
      jac(j, j) += c;
      jac(j, k) -= c;
    }
  }
}

}  // namespace

Eigen::VectorXd equilibrium_positions_dimensionless(int ion_count) {
  if (ion_count < 2) throw ValidationError("equilibrium: need at least two ions");
  const int n = ion_count;
  // Quasi-uniform seed with the known ~N^-0.56 scaling of the central spacing.
  const double spacing = 2.0 * std::pow(static_cast<double>(n), -0.56);
  Eigen::VectorXd u(n);
  for (int j = 0; j < n; ++j) u(j) = spacing * (j - 0.5 * (n - 1));

  Eigen::VectorXd force;
  Eigen::MatrixXd jac;
  double residual = 0.0;
  constexpr int max_iter = 200;
  for (int it = 0; it < max_iter; ++it) {
    force_and_jacobian(u, force, jac);
    residual = force.cwiseAbs().maxCoeff();
    if (residual < 1e-13) {
      // Remove rounding-level asymmetry so u is an exact mirror image.
      Eigen::VectorXd sym = 0.5 * (u - u.reverse());
      return sym;
    }
    const Eigen::VectorXd step = jac.ldlt().solve(-force);
    double t = 1.0;
    const double f0 = force.squaredNorm();
    for (int ls = 0; ls < 40; ++ls) {
      Eigen::VectorXd trial = u + t * step;
      bool ordered = true;
      for (int j = 1; j < n; ++j) ordered = ordered && trial(j) > trial(j - 1);
      if (ordered) {
        Eigen::VectorXd f_trial;
        Eigen::MatrixXd unused;
        force_and_jacobian(trial, f_trial, unused);
        if (f_trial.squaredNorm() < f0 || t < 1e-6) {
          u = trial;
          break;
        }
      }
      t *= 0.5;
    }
  }
  std::ostringstream msg;
  msg << "equilibrium solve for " << n << " ions did not converge; last force residual "
      << residual;
  throw ConvergenceError(msg.str(), residual);
}

Eigen::VectorXd equilibrium_positions(const TrapConfig& config) {
  config.validate();
  return equilibrium_positions_dimensionless(config.ion_count) * config.length_scale();
}

double lamb_dicke_parameter(double raman_delta_k, double ion_mass, double mode_freq) {
  return raman_delta_k * std::sqrt(units::hbar / (2.0 * ion_mass * mode_freq));
}

namespace {

void fix_signs(Eigen::MatrixXd& b) {
  for (Eigen::Index m = 0; m < b.rows(); ++m) {
    // First ion decides; fall back to the first clearly nonzero entry.
    Eigen::Index pivot = 0;
    while (pivot + 1 < b.cols() && std::abs(b(m, pivot)) < 1e-12) ++pivot;
    if (b(m, pivot) < 0.0) b.row(m) *= -1.0;
  }
}

}  // namespace

ModeSet harmonic_modes(const TrapConfig& config) {
  config.validate();
  const int n = config.ion_count;
  const Eigen::VectorXd u = equilibrium_positions_dimensionless(n);
  const double anisotropy = std::pow(config.radial_freq / config.axial_freq, 2);

  // Transverse Hessian in units of M omega_z^2.
  Eigen::MatrixXd hess(n, n);
  for (int j = 0; j < n; ++j) {
    double diag = anisotropy;
    for (int k = 0; k < n; ++k) {
      if (k == j) continue;
      const double c = 1.0 / std::pow(std::abs(u(j) - u(k)), 3);
      hess(j, k) = c;
      diag -= c;
    }
    hess(j, j) = diag;
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(hess);
  if (eig.info() != Eigen::Success) throw Error("transverse eigendecomposition failed");
  const Eigen::VectorXd& lambda = eig.eigenvalues();
  if (lambda(0) <= 0.0) {
    std::ostringstream msg;
    msg << "string of " << n << " ions is not transversely stable at omega_x/omega_z = "
        << std::sqrt(anisotropy) << " (lowest nu^2 = " << lambda(0) << " omega_z^2)";
    throw UnstableStringError(msg.str());
  }

  ModeSet modes;
  modes.source = ModeSource::harmonic;
  modes.participation = eig.eigenvectors().transpose();
  fix_signs(modes.participation);
  modes.freqs = config.axial_freq * lambda.array().sqrt();
  modes.lamb_dicke.resize(n);
  for (int m = 0; m < n; ++m)
    modes.lamb_dicke(m) =
        lamb_dicke_parameter(config.raman_delta_k, config.ion_mass, modes.freqs(m));
  return modes;
}

ModeSet sinusoidal_modes(int n) {
  if (n < 2) throw ValidationError("sinusoidal modes need n >= 2");
  ModeSet modes;
  modes.source = ModeSource::sinusoidal;
  modes.participation.resize(n, n);
  for (int m = 1; m <= n; ++m) {
    const double norm = std::sqrt((m == 1 ? 1.0 : 2.0) / n);
    for (int j = 1; j <= n; ++j)
      modes.participation(m - 1, j - 1) =
          norm * std::cos((2.0 * j - 1.0) * (m - 1) * units::pi / (2.0 * n));
  }
  modes.freqs = Eigen::VectorXd::Zero(n);
  modes.lamb_dicke = Eigen::VectorXd::Zero(n);
  return modes;
}

ModeSet sinusoidal_modes(int n, double top_freq, double spacing, double ion_mass,
                         double raman_delta_k) {
  ModeSet modes = sinusoidal_modes(n);
  for (int m = 0; m < n; ++m) {
    modes.freqs(m) = top_freq - m * spacing;
    if (!(modes.freqs(m) > 0.0)) throw ValidationError("synthetic mode band reaches zero frequency");
    modes.lamb_dicke(m) = lamb_dicke_parameter(raman_delta_k, ion_mass, modes.freqs(m));
  }
  return modes;
}

}  // namespace xtalk
