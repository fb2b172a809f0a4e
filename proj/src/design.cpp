#include "xtalk/design.hpp"

#include <cmath>
#include <future>
#include <random>
#include <sstream>

#include "xtalk/bfgs.hpp"
#include "xtalk/errors.hpp"
#include "xtalk/nnls.hpp"

namespace xtalk {

void DesignBudget::validate() const {
  auto fail = [](const std::string& msg) { throw ValidationError("design budget: " + msg); };
  if (!(gate_time > 0.0)) fail("gate_time must be positive");
  if (loops < 1) fail("loop count must be >= 1");
  if (segments < 1) fail("segments must be >= 1");
  if (!(max_peak_rabi > 0.0)) fail("max_peak_rabi must be positive");
  if (!(leakage_tolerance > 0.0) || !(angle_tolerance > 0.0)) fail("tolerances must be positive");
  if (shape_angles < 1) fail("shape_angles must be >= 1");
}

Eigen::VectorXd insensitive_target_chi(const CouplingAnalysis& analysis, double theta) {
  const Eigen::VectorXd proj =
      analysis.null_basis * (analysis.null_basis.transpose() * analysis.g_target);
  const double overlap = analysis.g_target.dot(proj);
  if (!(overlap > 1e-14 * analysis.g_target.squaredNorm()))
    throw InfeasibleDesign("target coupling has no component in the crosstalk-insensitive space",
                           analysis.independence);
  return proj * (0.5 * theta / overlap);
}

double crosstalk_leakage(const ModeSet& modes, const GateSpec& spec, const Eigen::VectorXd& chi) {
  const double jt = g_vector(modes, spec.t1, spec.t2).dot(chi);
  double worst = 0.0;
  for (const auto& [t, n] : spec.crosstalk_pairs())
    worst = std::max(worst, std::abs(g_vector(modes, t, n).dot(chi)));
  if (worst == 0.0) return 0.0;
  return jt == 0.0 ? std::numeric_limits<double>::infinity() : worst / std::abs(jt);
}

namespace {

std::string mhz(double w) {
  std::ostringstream s;
  s << units::angular_to_mhz(w) << " MHz";
  return s.str();
}

// Re-derives chi from the finished schedule and enforces every budget.
DesignResult finalize(const DesignProblem& problem, PulseSchedule schedule, std::string method) {
  const auto& b = problem.budget;
  DesignResult r;
  r.method = std::move(method);
  r.peak_rabi = schedule.peak();
  if (r.peak_rabi > b.max_peak_rabi)
    throw InfeasibleDesign("design needs peak Rabi frequency 2pi x " + mhz(r.peak_rabi) +
                               ", budget allows 2pi x " + mhz(b.max_peak_rabi),
                           r.peak_rabi);
  r.chi = accumulate_chi(schedule, problem.modes, b.model);
  r.schedule = std::move(schedule);
  const Eigen::VectorXd gt = g_vector(problem.modes, problem.spec.t1, problem.spec.t2);
  r.achieved_theta = 2.0 * gt.dot(r.chi.chi);
  r.crosstalk_leakage = crosstalk_leakage(problem.modes, problem.spec, r.chi.chi);
  if (b.cancel_crosstalk && r.crosstalk_leakage > b.leakage_tolerance) {
    std::ostringstream msg;
    msg << r.method << " design: crosstalk leakage " << r.crosstalk_leakage
        << " exceeds tolerance " << b.leakage_tolerance;
    throw InfeasibleDesign(msg.str(), r.crosstalk_leakage);
  }
  if (std::abs(r.achieved_theta - problem.spec.theta) > b.angle_tolerance) {
    std::ostringstream msg;
    msg << r.method << " design: achieved angle " << r.achieved_theta << " differs from target "
        << problem.spec.theta;
    throw InfeasibleDesign(msg.str(), std::abs(r.achieved_theta - problem.spec.theta));
  }
  return r;
}

struct Shape {
  int sideband;
  double offset;
  Eigen::VectorXd amplitudes;  // scaled to unit peak phase-space excursion
  Eigen::VectorXd chi;
};

// Mode-closing loop shapes for one drive frequency: eigenvectors of the
// sideband's own phase form plus rotations between every pair of them.
void append_shapes(const DesignProblem& problem, int sideband, double offset, double tau_loop,
                   std::vector<Shape>& out) {
  const ModeSet& modes = problem.modes;
  const int n = modes.size();
  const int d = problem.budget.segments;
  const double wd = modes.freqs(sideband - 1) + offset;
  const Eigen::MatrixXd k = closure_basis(modes, wd, tau_loop, d);
  const auto ps = phase_matrix(modes, wd, tau_loop, d, problem.budget.model);
  std::vector<Eigen::MatrixXd> qs;
  qs.reserve(n);
  for (const auto& p : ps) qs.push_back(k.transpose() * p * k);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(qs[sideband - 1]);
  const Eigen::MatrixXd& v = eig.eigenvectors();
  const Eigen::Index dim = v.cols();
  std::vector<Eigen::VectorXd> xs;
  for (Eigen::Index i = 0; i < dim; ++i) xs.emplace_back(v.col(i));
  const int na = problem.budget.shape_angles;
  for (Eigen::Index i = 0; i < dim; ++i)
    for (Eigen::Index j = i + 1; j < dim; ++j)
      for (int a = 1; a < na; ++a) {
        const double ang = units::pi * a / na;
        xs.emplace_back(std::cos(ang) * v.col(i) + std::sin(ang) * v.col(j));
      }

  // Shapes are measured per unit squared excursion max_{m,t} |alpha_m(t)|, so
  // the fit favours small loops (low phonon occupation) over drive power.
  const int samples = 16 * d + 1;
  for (const auto& x : xs) {
    Eigen::VectorXd chi(n);
    for (int m = 0; m < n; ++m) chi(m) = x.dot(qs[m] * x);
    if (!(chi.cwiseAbs().maxCoeff() > 0.0)) continue;
    PulseLoop loop;
    loop.detuning = wd;
    loop.duration = tau_loop;
    loop.amplitudes = k * x;
    const double reach = trajectory(loop, modes, samples).cwiseAbs().maxCoeff();
    if (!(reach > 0.0)) continue;
    out.push_back({sideband, offset, loop.amplitudes / reach, chi / (reach * reach)});
  }
}

}  // namespace

DesignResult design_linearized(const DesignProblem& problem) {
  const auto& b = problem.budget;
  const auto& modes = problem.modes;
  const auto& spec = problem.spec;
  b.validate();
  spec.validate(modes.size());
  const int n = modes.size();

  const CouplingAnalysis analysis = crosstalk_analysis(modes, spec);
  if (b.cancel_crosstalk && !(analysis.independence > 1e-12))
    throw InfeasibleDesign("targets have no crosstalk-insensitive coupling component",
                           analysis.independence);
  const Eigen::VectorXd target =
      b.cancel_crosstalk ? insensitive_target_chi(analysis, spec.theta) : Eigen::VectorXd();

  std::vector<int> sidebands = b.sidebands;
  if (sidebands.empty())
    for (int m = 1; m <= n; ++m) sidebands.push_back(m);
  const double tau_loop = b.gate_time / b.loops;

  std::vector<Shape> shapes;
  for (int l : sidebands) {
    if (l < 1 || l > n) throw ValidationError("design budget: sideband index out of range");
    for (double offset : b.detuning_offsets) append_shapes(problem, l, offset, tau_loop, shapes);
  }
  if (shapes.empty()) throw InfeasibleDesign("no loop shapes generate any phase", 0.0);

  // Rows: every crosstalk coupling (must vanish) and the target coupling.
  const auto pairs = b.cancel_crosstalk ? spec.crosstalk_pairs()
                                        : std::vector<std::pair<int, int>>{};
  const auto rows = static_cast<Eigen::Index>(pairs.size() + 1);
  const auto cols = static_cast<Eigen::Index>(shapes.size());
  Eigen::MatrixXd a(rows, cols);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(rows);
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const Eigen::VectorXd g = g_vector(modes, pairs[p].first, pairs[p].second);
    for (Eigen::Index c = 0; c < cols; ++c) a(p, c) = g.dot(shapes[c].chi);
  }
  for (Eigen::Index c = 0; c < cols; ++c) a(rows - 1, c) = analysis.g_target.dot(shapes[c].chi);
  rhs(rows - 1) = 0.5 * spec.theta;

  DesignResult result;
  PulseSchedule schedule;
  std::vector<LoopContribution> contributions;
  if (spec.theta != 0.0) {
    const double scale = a.cwiseAbs().maxCoeff();
    const Eigen::MatrixXd as = a / scale;
    const Eigen::VectorXd bs = rhs / scale;
    NnlsResult fit = nnls(as, bs);
    // Among (near) exact fits prefer the least total squared excursion: a small
    // penalty row on sum(c) picks the support, an unpenalised fit on that
    // support restores exactness.
    if (fit.x.sum() > 0.0) {
      const double lambda = 1e-3 * bs.norm() / fit.x.sum();
      Eigen::MatrixXd ap(rows + 1, cols);
      ap.topRows(rows) = as;
      ap.row(rows).setConstant(lambda);
      Eigen::VectorXd bp = Eigen::VectorXd::Zero(rows + 1);
      bp.head(rows) = bs;
      const NnlsResult pen = nnls(ap, bp);
      std::vector<Eigen::Index> support;
      for (Eigen::Index c = 0; c < cols; ++c)
        if (pen.x(c) > 1e-12 * pen.x.maxCoeff()) support.push_back(c);
      Eigen::MatrixXd sub(rows, static_cast<Eigen::Index>(support.size()));
      for (std::size_t i = 0; i < support.size(); ++i) sub.col(i) = as.col(support[i]);
      const NnlsResult polish = nnls(sub, bs);
      if (polish.residual <= fit.residual * (1.0 + 1e-9) + 1e-15 * bs.norm()) {
        fit.x.setZero();
        for (std::size_t i = 0; i < support.size(); ++i) fit.x(support[i]) = polish.x(i);
        fit.residual = polish.residual;
      }
    }
    const double rel = fit.residual * scale / std::abs(rhs(rows - 1));
    if (rel > b.leakage_tolerance) {
      std::ostringstream msg;
      msg << "linearized design infeasible: nonnegative fit leaves relative residual " << rel
          << " with " << shapes.size() << " candidate loops";
      throw InfeasibleDesign(msg.str(), rel);
    }
    const double cmax = fit.x.maxCoeff();
    for (Eigen::Index c = 0; c < cols; ++c) {
      if (!(fit.x(c) > 1e-12 * cmax)) continue;
      const Shape& s = shapes[c];
      PulseLoop loop;
      loop.detuning = modes.freqs(s.sideband - 1) + s.offset;
      loop.duration = tau_loop;
      loop.amplitudes = s.amplitudes * std::sqrt(fit.x(c));
      schedule.loops.push_back(std::move(loop));
      contributions.push_back({s.sideband, s.offset, fit.x(c), s.chi * fit.x(c)});
    }
    if (static_cast<int>(schedule.loops.size()) > b.loops) {
      std::ostringstream msg;
      msg << "linearized design needs " << schedule.loops.size() << " loops, budget allows "
          << b.loops;
      throw InfeasibleDesign(msg.str(), static_cast<double>(schedule.loops.size()));
    }
  }
  result = finalize(problem, std::move(schedule), "linearized");
  result.loops = std::move(contributions);
  result.target_chi = target;
  result.independence = analysis.independence;
  return result;
}

namespace {

struct RestartOutcome {
  Eigen::VectorXd x;
  double leakage = std::numeric_limits<double>::infinity();
  double angle_error = std::numeric_limits<double>::infinity();
  double peak = std::numeric_limits<double>::infinity();
};

struct QuadraticForms {
  Eigen::MatrixXd k;                   // closure basis
  std::vector<Eigen::MatrixXd> qr;     // one per crosstalk pair
  Eigen::MatrixXd qg;                  // target pair
  double phi = 0.0;                    // target g . chi
};

RestartOutcome run_restart(const QuadraticForms& f, std::uint64_t seed, int segments) {
  const Eigen::Index d = f.k.cols();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  Eigen::VectorXd w(segments);
  for (int s = 0; s < segments; ++s) w(s) = uni(rng);
  Eigen::VectorXd x = f.k.transpose() * w;  // closure projection

  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eg(f.qg, Eigen::EigenvaluesOnly);
  const double s0 = std::sqrt(std::abs(f.phi) / eg.eigenvalues().cwiseAbs().maxCoeff());
  x *= 2.0 * s0 / x.norm();

  const double phi = f.phi;
  const auto nk = f.qr.size();
  double mu = 1e-2 * std::abs(phi);
  double rho = 10.0 / (phi * phi);
  Eigen::VectorXd y = x / s0;
  for (int stage = 0; stage < 6; ++stage) {
    const Objective obj = [&](const Eigen::VectorXd& yy, Eigen::VectorXd& grad) {
      const Eigen::VectorXd xx = yy * s0;
      double value = 0.0;
      grad.setZero(d);
      for (std::size_t k = 0; k < nk; ++k) {
        const Eigen::VectorXd qx = f.qr[k] * xx;
        const double r = xx.dot(qx);
        const double sm = std::sqrt(r * r + mu * mu);
        value += sm;
        grad += (r / sm) * 2.0 * qx;
      }
      const Eigen::VectorXd gx = f.qg * xx;
      const double c = xx.dot(gx) - phi;
      value += rho * c * c;
      grad += 2.0 * rho * c * 2.0 * gx;
      grad *= s0;
      return value;
    };
    BfgsOptions opt;
    opt.max_iterations = 500;
    opt.gradient_tolerance = 1e-12;
    y = bfgs_minimize(obj, y, opt).x;
    mu *= 0.1;
    rho *= 10.0;
  }
  x = y * s0;

  // Gauss-Newton polish of the exact constraints with minimum-norm steps.
  Eigen::VectorXd res(nk + 1);
  Eigen::MatrixXd jac(nk + 1, d);
  for (int it = 0; it < 30; ++it) {
    for (std::size_t k = 0; k < nk; ++k) {
      const Eigen::VectorXd qx = f.qr[k] * x;
      res(k) = x.dot(qx);
      jac.row(k) = 2.0 * qx.transpose();
    }
    const Eigen::VectorXd gx = f.qg * x;
    res(nk) = x.dot(gx) - phi;
    jac.row(nk) = 2.0 * gx.transpose();
    if (res.cwiseAbs().maxCoeff() < 1e-15 * std::abs(phi)) break;
    const Eigen::VectorXd step = jac.completeOrthogonalDecomposition().solve(res);
    if (!step.allFinite()) break;
    x -= step;
  }

  RestartOutcome out;
  out.x = x;
  const double jt = x.dot(f.qg * x);
  double worst = 0.0;
  for (const auto& q : f.qr) worst = std::max(worst, std::abs(x.dot(q * x)));
  out.leakage = jt != 0.0 ? worst / std::abs(jt) : std::numeric_limits<double>::infinity();
  out.angle_error = std::abs(2.0 * jt - 2.0 * phi);
  out.peak = (f.k * x).cwiseAbs().maxCoeff();
  return out;
}

}  // namespace

DesignResult design_quadratic(const DesignProblem& problem, int restarts, std::uint64_t seed) {
  const auto& b = problem.budget;
  const auto& modes = problem.modes;
  const auto& spec = problem.spec;
  b.validate();
  spec.validate(modes.size());
  if (restarts < 1) throw ValidationError("design_quadratic: restarts must be >= 1");
  const int n = modes.size();
  const int d = b.segments;
  const double wd = b.detuning.value_or(modes.freqs.mean());
  const double tau = b.gate_time;

  const CouplingAnalysis analysis = crosstalk_analysis(modes, spec);

  PulseLoop loop;
  loop.detuning = wd;
  loop.duration = tau;
  loop.amplitudes = Eigen::VectorXd::Zero(d);

  if (spec.theta == 0.0) {
    closure_basis(modes, wd, tau, d);  // still enforce D > 2N
    DesignResult r = finalize(problem, PulseSchedule{{loop}}, "quadratic");
    r.target_chi = Eigen::VectorXd::Zero(n);
    r.independence = analysis.independence;
    return r;
  }
  const Eigen::VectorXd target =
      b.cancel_crosstalk ? insensitive_target_chi(analysis, spec.theta) : Eigen::VectorXd();

  QuadraticForms forms;
  forms.k = closure_basis(modes, wd, tau, d);
  const auto ps = phase_matrix(modes, wd, tau, d, b.model);
  std::vector<Eigen::MatrixXd> qs;
  for (const auto& p : ps) qs.push_back(forms.k.transpose() * p * forms.k);
  auto combine = [&](const Eigen::VectorXd& g) {
    Eigen::MatrixXd q = Eigen::MatrixXd::Zero(forms.k.cols(), forms.k.cols());
    for (int m = 0; m < n; ++m) q += g(m) * qs[m];
    return q;
  };
  if (b.cancel_crosstalk)
    for (const auto& [t, nb] : spec.crosstalk_pairs())
      forms.qr.push_back(combine(g_vector(modes, t, nb)));
  forms.qg = combine(analysis.g_target);
  forms.phi = 0.5 * spec.theta;

  std::mt19937_64 master(seed);
  std::vector<std::uint64_t> seeds(restarts);
  for (auto& s : seeds) s = master();
  std::vector<std::future<RestartOutcome>> jobs;
  jobs.reserve(restarts);
  for (int r = 0; r < restarts; ++r)
    jobs.push_back(std::async(std::launch::async, run_restart, std::cref(forms), seeds[r], d));

  std::optional<RestartOutcome> best;
  int feasible = 0;
  auto ok = [&](const RestartOutcome& o) {
    return o.leakage < b.leakage_tolerance && o.angle_error < b.angle_tolerance;
  };
  for (auto& job : jobs) {
    RestartOutcome o = job.get();
    if (ok(o)) ++feasible;
    if (!best) {
      best = std::move(o);
    } else if (ok(o) ? (!ok(*best) || o.peak < best->peak) : (!ok(*best) && o.leakage < best->leakage)) {
      best = std::move(o);
    }
  }
  if (!ok(*best)) {
    std::ostringstream msg;
    msg << "quadratic design: none of " << restarts << " restarts reached leakage "
        << b.leakage_tolerance << "; best leakage " << best->leakage;
    throw InfeasibleDesign(msg.str(), best->leakage);
  }
  loop.amplitudes = forms.k * best->x;
  DesignResult r = finalize(problem, PulseSchedule{{loop}}, "quadratic");
  r.target_chi = target;
  r.independence = analysis.independence;
  r.restarts_feasible = feasible;
  return r;
}

std::vector<FeasibilityRow> feasibility_report(const ModeSet& modes, double threshold,
                                               const std::optional<DesignBudget>& reference,
                                               double theta) {
  const int n = modes.size();
  const Eigen::MatrixXd map = independence_map(modes);
  const bool has_freqs = modes.freqs.size() == n && (modes.freqs.array() > 0.0).all() &&
                         (modes.lamb_dicke.array() > 0.0).all();
  std::vector<FeasibilityRow> rows;
  for (int t1 = 1; t1 <= n; ++t1) {
    for (int t2 = t1 + 1; t2 <= n; ++t2) {
      FeasibilityRow row;
      row.t1 = t1;
      row.t2 = t2;
      row.independence = map(t1 - 1, t2 - 1);
      row.feasible = row.independence > threshold;
      if (!row.feasible) {
        row.note = "below threshold";
      } else if (!reference) {
        row.note = "no reference budget";
      } else if (!has_freqs) {
        row.note = "mode set has no frequencies";
      } else {
        DesignProblem p{modes, make_gate_spec(n, t1, t2, theta, 0.0), *reference};
        try {
          row.peak_rabi = design_linearized(p).peak_rabi;
        } catch (const InfeasibleDesign& e) {
          row.note = e.what();
        }
      }
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

}  // namespace xtalk
