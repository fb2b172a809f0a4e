#include "xtalk/simulate.hpp"

#include <cmath>
#include <complex>
#include <sstream>

#include "xtalk/errors.hpp"
#include "xtalk/units.hpp"

namespace xtalk {

using cplx = std::complex<double>;

namespace {

constexpr cplx I{0.0, 1.0};

std::uint64_t ion_mask(int ion_count, int ion) {
  return std::uint64_t{1} << (ion_count - ion);
}

int qubit_count(const Eigen::VectorXcd& state) {
  int n = 0;
  while ((Eigen::Index{1} << n) < state.size()) ++n;
  if ((Eigen::Index{1} << n) != state.size()) throw ValidationError("state size is not a power of two");
  return n;
}

// In-place normalized Walsh-Hadamard transform (H on every qubit).
void walsh_hadamard(Eigen::VectorXcd& v) {
  const Eigen::Index size = v.size();
  const double r = 1.0 / std::sqrt(2.0);
  for (Eigen::Index h = 1; h < size; h <<= 1)
    for (Eigen::Index i = 0; i < size; i += 2 * h)
      for (Eigen::Index j = i; j < i + h; ++j) {
        const cplx x = v(j), y = v(j + h);
        v(j) = r * (x + y);
        v(j + h) = r * (x - y);
      }
}

enum class Pauli { x, y, z };

Eigen::VectorXcd apply_pauli(const Eigen::VectorXcd& state, int ion_count, int ion, Pauli p) {
  const std::uint64_t m = ion_mask(ion_count, ion);
  Eigen::VectorXcd out(state.size());
  for (Eigen::Index i = 0; i < state.size(); ++i) {
    const auto idx = static_cast<std::uint64_t>(i);
    const bool one = idx & m;
    switch (p) {
      case Pauli::x:
        out(static_cast<Eigen::Index>(idx ^ m)) = state(i);
        break;
      case Pauli::y:  // Y|0> = i|1>, Y|1> = -i|0>
        out(static_cast<Eigen::Index>(idx ^ m)) = (one ? -I : I) * state(i);
        break;
      case Pauli::z:
        out(i) = one ? -state(i) : state(i);
        break;
    }
  }
  return out;
}

double pair_expectation(const Eigen::VectorXcd& state, int n, int a, Pauli pa, int b, Pauli pb) {
  return state.dot(apply_pauli(apply_pauli(state, n, b, pb), n, a, pa)).real();
}

// exp(-i pi/4 (cos(phi) X + sin(phi) Y)) on one ion.
void analysis_pulse(Eigen::VectorXcd& state, int n, int ion, double phi) {
  const std::uint64_t m = ion_mask(n, ion);
  const double c = 1.0 / std::sqrt(2.0);
  const cplx off01 = -I * c * std::exp(-I * phi);  // <0|R|1>
  const cplx off10 = -I * c * std::exp(I * phi);   // <1|R|0>
  for (Eigen::Index i = 0; i < state.size(); ++i) {
    const auto idx = static_cast<std::uint64_t>(i);
    if (idx & m) continue;
    const auto j = static_cast<Eigen::Index>(idx | m);
    const cplx a0 = state(i), a1 = state(j);
    state(i) = c * a0 + off01 * a1;
    state(j) = off10 * a0 + c * a1;
  }
}

void check_pair(int n, int a, int b) {
  if (a < 1 || a > n || b < 1 || b > n || a == b)
    throw ValidationError("ion pair out of range or repeated");
}

}  // namespace

void IlluminationProfile::validate(const GateSpec& spec) const {
  for (Eigen::Index j = 0; j < factors.size(); ++j)
    if (!(factors(j) >= 0.0 && factors(j) <= 1.0))
      throw ValidationError("illumination factors must lie in [0, 1]");
  if (spec.t2 > size()) throw ValidationError("illumination profile shorter than the string");
  if (factors(spec.t1 - 1) != 1.0 || factors(spec.t2 - 1) != 1.0)
    throw ValidationError("target ions must have illumination factor 1");
}

IlluminationProfile uniform_illumination(int ion_count, const GateSpec& spec, double epsilon) {
  spec.validate(ion_count);
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw ValidationError("epsilon must lie in [0, 1]");
  IlluminationProfile p;
  p.factors = Eigen::VectorXd::Zero(ion_count);
  p.factors(spec.t1 - 1) = 1.0;
  p.factors(spec.t2 - 1) = 1.0;
  for (int nb : spec.neighbors) p.factors(nb - 1) = epsilon;
  return p;
}

Eigen::MatrixXd coupling_matrix(const ModeSet& modes, const Eigen::VectorXd& chi) {
  if (chi.size() != modes.size()) throw ValidationError("chi length does not match mode count");
  // J = B^T diag(chi) B
  return modes.participation.transpose() * chi.asDiagonal() * modes.participation;
}

Eigen::MatrixXd rotation_angles(const Eigen::MatrixXd& coupling, const IlluminationProfile& light) {
  if (coupling.rows() != light.size() || coupling.cols() != light.size())
    throw ValidationError("coupling matrix and illumination sizes differ");
  Eigen::MatrixXd theta = 2.0 * light.factors.asDiagonal() * coupling * light.factors.asDiagonal();
  theta.diagonal().setZero();
  return theta;
}

XXRotationGate::XXRotationGate(Eigen::MatrixXd angles) : angles_(std::move(angles)) {
  if (angles_.rows() != angles_.cols()) throw ValidationError("angle matrix must be square");
  if (angles_.rows() > max_state_ions) throw ValidationError("too many ions for a state vector");
  angles_.diagonal().setZero();
}

double XXRotationGate::phase(std::uint64_t x) const {
  const int n = size();
  double total = 0.0;
  for (int j1 = 1; j1 <= n; ++j1) {
    const double s1 = (x & ion_mask(n, j1)) ? -1.0 : 1.0;
    for (int j2 = j1 + 1; j2 <= n; ++j2) {
      const double s2 = (x & ion_mask(n, j2)) ? -1.0 : 1.0;
      total += angles_(j1 - 1, j2 - 1) * s1 * s2;
    }
  }
  return total;
}

Eigen::VectorXcd XXRotationGate::apply(const Eigen::VectorXcd& state) const {
  if (state.size() != (Eigen::Index{1} << size())) throw ValidationError("state size mismatch");
  Eigen::VectorXcd v = state;
  walsh_hadamard(v);
  for (Eigen::Index i = 0; i < v.size(); ++i)
    v(i) *= std::exp(I * phase(static_cast<std::uint64_t>(i)));
  walsh_hadamard(v);
  return v;
}

Eigen::MatrixXcd XXRotationGate::dense() const {
  if (size() > max_dense_ions) {
    std::ostringstream msg;
    msg << "dense unitary limited to " << max_dense_ions << " ions (got " << size()
        << "); restrict to illuminated ions with XXRotationGate::reduced";
    throw ValidationError(msg.str());
  }
  const Eigen::Index dim = Eigen::Index{1} << size();
  Eigen::VectorXcd diag(dim);
  for (Eigen::Index i = 0; i < dim; ++i)
    diag(i) = std::exp(I * phase(static_cast<std::uint64_t>(i)));
  // U = H D H with H_{ab} = (-1)^{popcount(a & b)} / sqrt(2^n).
  Eigen::MatrixXcd h(dim, dim);
  const double norm = 1.0 / std::sqrt(static_cast<double>(dim));
  for (Eigen::Index a = 0; a < dim; ++a)
    for (Eigen::Index b = 0; b < dim; ++b)
      h(a, b) = (__builtin_popcountll(static_cast<unsigned long long>(a & b)) & 1) ? -norm : norm;
  return h * diag.asDiagonal() * h;
}

XXRotationGate XXRotationGate::reduced(std::vector<int>& ions) const {
  ions.clear();
  const int n = size();
  for (int j = 1; j <= n; ++j)
    if (angles_.row(j - 1).cwiseAbs().maxCoeff() > 0.0) ions.push_back(j);
  const auto k = static_cast<Eigen::Index>(ions.size());
  Eigen::MatrixXd sub(k, k);
  for (Eigen::Index p = 0; p < k; ++p)
    for (Eigen::Index q = 0; q < k; ++q) sub(p, q) = angles_(ions[p] - 1, ions[q] - 1);
  return XXRotationGate(sub);
}

XXRotationGate XXRotationGate::then(const XXRotationGate& other) const {
  if (other.size() != size()) throw ValidationError("gate sizes differ");
  return XXRotationGate(angles_ + other.angles_);
}

XXRotationGate gate_from_coupling(const Eigen::MatrixXd& coupling,
                                  const IlluminationProfile& light) {
  return XXRotationGate(rotation_angles(coupling, light));
}

Eigen::MatrixXcd qubit_unitary(const Eigen::MatrixXd& coupling, const IlluminationProfile& light) {
  return gate_from_coupling(coupling, light).dense();
}

Eigen::VectorXcd ground_state(int ion_count) {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(Eigen::Index{1} << ion_count);
  v(0) = 1.0;
  return v;
}

Eigen::VectorXcd ideal_state(int ion_count, double theta, int t1, int t2) {
  check_pair(ion_count, t1, t2);
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(Eigen::Index{1} << ion_count);
  v(0) = std::cos(theta);
  v(static_cast<Eigen::Index>(ion_mask(ion_count, t1) | ion_mask(ion_count, t2))) =
      I * std::sin(theta);
  return v;
}

double fidelity(const Eigen::MatrixXcd& unitary, double theta, int t1, int t2) {
  int n = 0;
  while ((Eigen::Index{1} << n) < unitary.rows()) ++n;
  const Eigen::VectorXcd ideal = ideal_state(n, theta, t1, t2);
  return std::norm(ideal.dot(unitary.col(0)));
}

double fidelity(const XXRotationGate& gate, double theta, int t1, int t2) {
  const int n = gate.size();
  const Eigen::VectorXcd out = gate.apply(ground_state(n));
  return std::norm(ideal_state(n, theta, t1, t2).dot(out));
}

CrosstalkFactors crosstalk_decomposition(const Eigen::MatrixXd& coupling, const GateSpec& spec,
                                         const IlluminationProfile& light) {
  const int n = light.size();
  spec.validate(n);
  light.validate(spec);
  const double jt = coupling(spec.t1 - 1, spec.t2 - 1);
  if (jt == 0.0)
    throw ValidationError("crosstalk unitary undefined: target coupling J_{t1,t2} is zero");
  const Eigen::MatrixXd full = rotation_angles(coupling, light);

  Eigen::MatrixXd xt = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd ideal = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd spectator = full;
  for (const auto& [t, nb] : spec.crosstalk_pairs()) {
    const double ang = (light.factors(nb - 1) / light.factors(t - 1)) *
                       (coupling(t - 1, nb - 1) / jt) * spec.theta;
    xt(t - 1, nb - 1) = xt(nb - 1, t - 1) = ang;
    spectator(t - 1, nb - 1) = spectator(nb - 1, t - 1) = 0.0;
  }
  ideal(spec.t1 - 1, spec.t2 - 1) = ideal(spec.t2 - 1, spec.t1 - 1) = spec.theta;
  spectator(spec.t1 - 1, spec.t2 - 1) = spectator(spec.t2 - 1, spec.t1 - 1) = 0.0;
  return {XXRotationGate(xt), XXRotationGate(ideal), XXRotationGate(spectator)};
}

Eigen::MatrixXcd crosstalk_unitary(const Eigen::MatrixXd& coupling, const GateSpec& spec,
                                   const IlluminationProfile& light) {
  return crosstalk_decomposition(coupling, spec, light).crosstalk.dense();
}

ParityCurve parity_scan(const Eigen::VectorXcd& state, int a, int b, int phi_samples) {
  const int n = qubit_count(state);
  check_pair(n, a, b);
  if (phi_samples < 1) throw ValidationError("parity scan needs at least one phase sample");
  ParityCurve c;
  c.a = a;
  c.b = b;
  const std::uint64_t ma = ion_mask(n, a), mb = ion_mask(n, b);
  for (int k = 0; k < phi_samples; ++k) {
    const double phi = units::two_pi * k / phi_samples;
    Eigen::VectorXcd v = state;
    analysis_pulse(v, n, a, phi);
    analysis_pulse(v, n, b, phi);
    double p = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      const auto idx = static_cast<std::uint64_t>(i);
      const bool odd = static_cast<bool>(idx & ma) != static_cast<bool>(idx & mb);
      p += odd ? -std::norm(v(i)) : std::norm(v(i));
    }
    c.phi.push_back(phi);
    c.parity.push_back(p);
  }
  // P(phi) = (<XX> + <YY>)/2 + cos(2phi)(<YY> - <XX>)/2 - sin(2phi)(<XY> + <YX>)/2
  const double xx = pair_expectation(state, n, a, Pauli::x, b, Pauli::x);
  const double yy = pair_expectation(state, n, a, Pauli::y, b, Pauli::y);
  const double xy = pair_expectation(state, n, a, Pauli::x, b, Pauli::y);
  const double yx = pair_expectation(state, n, a, Pauli::y, b, Pauli::x);
  c.amplitude = 0.5 * std::hypot(yy - xx, xy + yx);
  for (Eigen::Index i = 0; i < state.size(); ++i) {
    const auto idx = static_cast<std::uint64_t>(i);
    const bool ba = idx & ma, bb = idx & mb;
    if (!ba && !bb) c.p00 += std::norm(state(i));
    if (ba && bb) c.p11 += std::norm(state(i));
  }
  c.bell_fidelity = 0.5 * (c.p00 + c.p11 + c.amplitude);
  return c;
}

ParityCurve parity_scan(const XXRotationGate& gate, int a, int b, int phi_samples) {
  return parity_scan(gate.apply(ground_state(gate.size())), a, b, phi_samples);
}

Eigen::VectorXd single_mode_chi(const ModeSet& modes, int mode, int t1, int t2, double theta) {
  if (mode < 1 || mode > modes.size()) throw ValidationError("mode index out of range");
  const double g = modes.b(mode, t1) * modes.b(mode, t2);
  if (std::abs(g) < 1e-12) {
    std::ostringstream msg;
    msg << "mode " << mode << " does not couple ions " << t1 << " and " << t2;
    throw ValidationError(msg.str());
  }
  Eigen::VectorXd chi = Eigen::VectorXd::Zero(modes.size());
  chi(mode - 1) = 0.5 * theta / g;
  return chi;
}

GateReport simulate_chi(const ModeSet& modes, const Eigen::VectorXd& chi, const GateSpec& spec,
                        const IlluminationProfile& light, int phi_samples) {
  spec.validate(modes.size());
  light.validate(spec);
  GateReport r;
  r.chi = chi;
  r.coupling = coupling_matrix(modes, chi);
  r.angles = rotation_angles(r.coupling, light);
  const XXRotationGate gate(r.angles);
  const Eigen::VectorXcd out = gate.apply(ground_state(modes.size()));
  r.fidelity = std::norm(ideal_state(modes.size(), spec.theta, spec.t1, spec.t2).dot(out));
  r.parity_scans.push_back(parity_scan(out, spec.t1, spec.t2, phi_samples));
  for (const auto& [t, nb] : spec.crosstalk_pairs())
    r.parity_scans.push_back(parity_scan(out, t, nb, phi_samples));
  r.bell_fidelity = r.parity_scans.front().bell_fidelity;
  r.closure_residuals = Eigen::VectorXd::Zero(modes.size());
  return r;
}

GateReport simulate_schedule(const ModeSet& modes, const PulseSchedule& schedule,
                             const GateSpec& spec, const IlluminationProfile& light,
                             int phi_samples, PhaseModel model) {
  const PhaseVector chi = accumulate_chi(schedule, modes, model);
  GateReport r = simulate_chi(modes, chi.chi, spec, light, phi_samples);
  for (const auto& loop : schedule.loops) {
    const double scale = loop.peak() * loop.duration;
    if (scale == 0.0) continue;
    r.closure_residuals =
        r.closure_residuals.cwiseMax(closure_residual(loop, modes).cwiseAbs() / scale);
  }
  return r;
}

}  // namespace xtalk
