#include "xtalk/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <sstream>
#include <vector>

#include <Eigen/Eigenvalues>

#include "xtalk/errors.hpp"
#include "xtalk/units.hpp"

namespace xtalk {

using cplx = std::complex<double>;

namespace {

constexpr cplx I{0.0, 1.0};

// Row = joint Fock index, column = X-basis spin sector.
using Psi = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct Transition {
  Eigen::Index from;  // |.., n, ..>
  Eigen::Index to;    // |.., n+1, ..>
  double amp;         // sqrt(n + 1)
};

Eigen::MatrixXd hadamard_matrix(int qubits) {
  const Eigen::Index dim = Eigen::Index{1} << qubits;
  const double norm = 1.0 / std::sqrt(static_cast<double>(dim));
  Eigen::MatrixXd h(dim, dim);
  for (Eigen::Index a = 0; a < dim; ++a)
    for (Eigen::Index b = 0; b < dim; ++b)
      h(a, b) = (__builtin_popcountll(static_cast<unsigned long long>(a & b)) & 1) ? -norm : norm;
  return h;
}

class SectorIntegrator {
 public:
  SectorIntegrator(const ModeSet& modes, const IlluminationProfile& light, int cutoff)
      : n_(modes.size()), cutoff_(cutoff), nu_(modes.freqs) {
    dim_ = 1;
    for (int m = 0; m < n_; ++m) dim_ *= cutoff_;
    sectors_ = Eigen::Index{1} << n_;
    // F_{m,x} = eta_m sum_j b_{m,j} c_j s_j with s_j = -1 where bit (n - j) of x is set.
    force_.resize(n_, sectors_);
    for (Eigen::Index x = 0; x < sectors_; ++x)
      for (int m = 0; m < n_; ++m) {
        double f = 0.0;
        for (int j = 1; j <= n_; ++j) {
          const double s = (x >> (n_ - j)) & 1 ? -1.0 : 1.0;
          f += modes.b(m + 1, j) * light.factors(j - 1) * s;
        }
        force_(m, x) = modes.lamb_dicke(m) * f;
      }
    raise_.resize(n_);
    stride_.resize(n_);
    Eigen::Index stride = 1;
    for (int m = n_ - 1; m >= 0; --m) {
      stride_[m] = stride;
      stride *= cutoff_;
    }
    for (int m = 0; m < n_; ++m)
      for (Eigen::Index i = 0; i < dim_; ++i) {
        const int occ = occupation(i, m);
        if (occ + 1 < cutoff_)
          raise_[m].push_back({i, i + stride_[m], std::sqrt(static_cast<double>(occ + 1))});
      }
  }

  [[nodiscard]] int occupation(Eigen::Index i, int m) const {
    return static_cast<int>((i / stride_[m]) % cutoff_);
  }
  [[nodiscard]] Eigen::Index dim() const { return dim_; }
  [[nodiscard]] Eigen::Index sectors() const { return sectors_; }

  // out = -i H(t) psi, with drive value f = w_s sin(omega_d t_local).
  void derivative(double t, double f, const Psi& psi, Psi& out) const {
    out.setZero(dim_, sectors_);
    const Eigen::Index s = sectors_;
    for (int m = 0; m < n_; ++m) {
      const cplx up = -I * f * std::exp(I * (nu_(m) * t));  // multiplies a^dag
      const cplx down = -I * f * std::exp(-I * (nu_(m) * t));
      const double* fm = &force_(m, 0);
      for (const auto& tr : raise_[m]) {
        const cplx* src_lo = psi.data() + tr.from * s;
        const cplx* src_hi = psi.data() + tr.to * s;
        cplx* dst_lo = out.data() + tr.from * s;
        cplx* dst_hi = out.data() + tr.to * s;
        const cplx cu = up * tr.amp, cd = down * tr.amp;
        for (Eigen::Index x = 0; x < s; ++x) {
          dst_hi[x] += (fm[x * n_] * cu) * src_lo[x];
          dst_lo[x] += (fm[x * n_] * cd) * src_hi[x];
        }
      }
    }
  }

  [[nodiscard]] Psi vacuum() const {
    Psi p = Psi::Zero(dim_, sectors_);
    p.row(0).setOnes();
    return p;
  }

 private:
  int n_;
  int cutoff_;
  Eigen::VectorXd nu_;
  Eigen::Index dim_ = 0;
  Eigen::Index sectors_ = 0;
  Eigen::MatrixXd force_;  // column-major n x sectors, so force_(m, x) = data[m + x n]
  std::vector<std::vector<Transition>> raise_;
  std::vector<Eigen::Index> stride_;
};

struct RunOutput {
  Psi psi;
  long steps = 0;
  double max_step = 0.0;
  std::vector<std::pair<double, Psi>> snapshots;
};

double loop_max_frequency(const PulseLoop& loop, const ModeSet& modes) {
  return (modes.freqs.maxCoeff() + std::abs(loop.detuning)) / units::two_pi;
}

RunOutput integrate(const SectorIntegrator& sys, const PulseSchedule& schedule,
                    const ModeSet& modes, const OracleOptions& opt, int refinement,
                    const std::vector<double>& snapshot_times) {
  RunOutput out;
  out.psi = sys.vacuum();
  Psi k1, k2, k3, k4, tmp;
  std::size_t next_snap = 0;
  double t0 = 0.0;
  for (const auto& loop : schedule.loops) {
    const double dt_max = 1.0 / (opt.steps_per_period * loop_max_frequency(loop, modes));
    for (int seg = 0; seg < loop.segments(); ++seg) {
      const double a = loop.segment_start(seg), b = loop.segment_end(seg);
      const long base = std::max(1L, static_cast<long>(std::ceil((b - a) / (2.0 * dt_max))));
      const long count = base * refinement;
      const double h = (b - a) / static_cast<double>(count);
      out.max_step = std::max(out.max_step, h);
      const double w = loop.amplitudes(seg);
      auto drive = [&](double local) { return w * std::sin(loop.detuning * local); };
      for (long k = 0; k < count; ++k) {
        const double tl = a + h * static_cast<double>(k);
        const double t = t0 + tl;
        sys.derivative(t, drive(tl), out.psi, k1);
        tmp = out.psi + (0.5 * h) * k1;
        sys.derivative(t + 0.5 * h, drive(tl + 0.5 * h), tmp, k2);
        tmp = out.psi + (0.5 * h) * k2;
        sys.derivative(t + 0.5 * h, drive(tl + 0.5 * h), tmp, k3);
        tmp = out.psi + h * k3;
        sys.derivative(t + h, drive(tl + h), tmp, k4);
        out.psi += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        ++out.steps;
        while (next_snap < snapshot_times.size() &&
               snapshot_times[next_snap] <= t + h + 1e-15) {
          out.snapshots.emplace_back(t + h, out.psi);
          ++next_snap;
        }
      }
    }
    t0 += loop.duration;
  }
  while (next_snap < snapshot_times.size()) {
    out.snapshots.emplace_back(t0, out.psi);
    ++next_snap;
  }
  return out;
}

// Spin density matrix (Z basis) for the initial spin state |0...0>, which
// has equal weight 2^{-n/2} on every X-basis sector.
Eigen::MatrixXcd spin_density(const Psi& psi, const Eigen::MatrixXd& h) {
  const Eigen::MatrixXcd gram = psi.adjoint() * psi;  // gram(x', x) = <psi_x'|psi_x>
  const Eigen::MatrixXcd rho_x = gram.transpose() / static_cast<double>(psi.cols());
  return h * rho_x * h;
}

}  // namespace

double von_neumann_entropy(const Eigen::MatrixXcd& rho) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(0.5 * (rho + rho.adjoint()),
                                                      Eigen::EigenvaluesOnly);
  double s = 0.0;
  for (Eigen::Index i = 0; i < eig.eigenvalues().size(); ++i) {
    const double p = eig.eigenvalues()(i);
    if (p > 1e-300) s -= p * std::log(p);
  }
  return std::max(s, 0.0);  // eigenvalues a rounding error above 1
}

double single_ion_linear_entropy(const Eigen::MatrixXcd& rho, int ion) {
  int n = 0;
  while ((Eigen::Index{1} << n) < rho.rows()) ++n;
  if (ion < 1 || ion > n) throw ValidationError("ion index out of range");
  const Eigen::Index m = Eigen::Index{1} << (n - ion);
  Eigen::Matrix2cd r = Eigen::Matrix2cd::Zero();
  for (Eigen::Index i = 0; i < rho.rows(); ++i)
    for (Eigen::Index j = 0; j < rho.cols(); ++j)
      if ((i & ~m) == (j & ~m)) r((i & m) ? 1 : 0, (j & m) ? 1 : 0) += rho(i, j);
  return 1.0 - (r * r).trace().real();
}

double unitary_distance_up_to_phase(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw ValidationError("unitary sizes differ");
  const auto distance = [&](cplx phase) {
    return Eigen::JacobiSVD<Eigen::MatrixXcd>(a - phase * b).singularValues()(0);
  };
  // For unitaries the optimum puts e^{i phi} at the centre of the smallest arc
  // holding the eigenphases of b^dag a. The trace phase is the second
  // candidate for inputs that are only close to unitary.
  const Eigen::MatrixXcd w = b.adjoint() * a;
  const Eigen::VectorXcd ev = Eigen::ComplexEigenSolver<Eigen::MatrixXcd>(w, false).eigenvalues();
  std::vector<double> ang;
  for (Eigen::Index i = 0; i < ev.size(); ++i) ang.push_back(std::arg(ev(i)));
  std::sort(ang.begin(), ang.end());
  double best_gap = ang.front() + units::two_pi - ang.back();
  double centre = ang.back() + 0.5 * best_gap + units::pi;
  for (std::size_t i = 1; i < ang.size(); ++i)
    if (ang[i] - ang[i - 1] > best_gap) {
      best_gap = ang[i] - ang[i - 1];
      centre = ang[i - 1] + 0.5 * best_gap + units::pi;
    }
  double d = distance(std::exp(I * centre));
  const cplx overlap = w.trace();
  if (std::abs(overlap) > 0.0) d = std::min(d, distance(overlap / std::abs(overlap)));
  return d;
}

OracleResult full_hamiltonian_oracle(const PulseSchedule& schedule, const ModeSet& modes,
                                     const IlluminationProfile& light,
                                     const OracleOptions& options) {
  const int n = modes.size();
  if (n > 3) throw ValidationError("full Hamiltonian oracle is limited to three ions");
  if (options.fock_cutoff < 2 || options.fock_cutoff > 8)
    throw ValidationError("fock_cutoff must lie in [2, 8]");
  if (light.size() != n) throw ValidationError("illumination profile size mismatch");
  if (!(options.steps_per_period >= 40.0))
    throw ValidationError("steps_per_period below 40 violates the step-size bound");
  schedule.validate();

  std::vector<double> snaps = options.snapshot_times;
  std::sort(snaps.begin(), snaps.end());

  const SectorIntegrator sys(modes, light, options.fock_cutoff);
  const RunOutput fine = integrate(sys, schedule, modes, options, 2, snaps);

  OracleResult r;
  r.steps = fine.steps;
  r.step = fine.max_step;
  if (options.check_halving && fine.steps > 0) {
    const RunOutput coarse = integrate(sys, schedule, modes, options, 1, {});
    r.halving_error = (fine.psi - coarse.psi).cwiseAbs().maxCoeff();
    if (r.halving_error > options.halving_tolerance) {
      std::ostringstream msg;
      msg << "oracle integration not converged: step-halving difference " << r.halving_error
          << " exceeds " << options.halving_tolerance;
      throw ConvergenceError(msg.str(), r.halving_error);
    }
  }

  const Eigen::MatrixXd h = hadamard_matrix(n);
  const Eigen::VectorXcd vac = fine.psi.row(0).transpose();
  r.spin_unitary = h * vac.asDiagonal() * h;
  r.entropy = von_neumann_entropy(spin_density(fine.psi, h));

  r.mean_phonons = Eigen::VectorXd::Zero(n);
  for (int m = 0; m < n; ++m)
    for (Eigen::Index x = 0; x < sys.sectors(); ++x) {
      double occ = 0.0;
      for (Eigen::Index i = 0; i < sys.dim(); ++i)
        occ += sys.occupation(i, m) * std::norm(fine.psi(i, x));
      r.mean_phonons(m) = std::max(r.mean_phonons(m), occ);
    }

  for (const auto& [t, psi] : fine.snapshots) {
    OracleSnapshot s;
    s.time = t;
    s.spin_density = spin_density(psi, h);
    s.entropy = von_neumann_entropy(s.spin_density);
    r.snapshots.push_back(std::move(s));
  }
  return r;
}

}  // namespace xtalk
