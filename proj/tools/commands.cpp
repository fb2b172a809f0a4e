#include "commands.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "xtalk/config.hpp"
#include "xtalk/coupling.hpp"
#include "xtalk/design.hpp"
#include "xtalk/errors.hpp"
#include "xtalk/modes.hpp"
#include "xtalk/oracle.hpp"
#include "xtalk/pulses.hpp"
#include "xtalk/schedule_io.hpp"
#include "xtalk/simulate.hpp"
#include "xtalk/units.hpp"
#include "xtalk/version.hpp"

namespace xtalk::cli {

namespace fs = std::filesystem;

namespace {

std::string num(double v, int precision = 12) {
  std::ostringstream s;
  s << std::setprecision(precision) << v;
  return s.str();
}

struct Run {
  RunConfig config;
  std::uint64_t seed;
  std::string hash;
  fs::path out;
};

Run prepare(const Options& opt) {
  Run r{load_run_config(opt.config), 0, "", opt.out};
  r.seed = opt.seed ? *opt.seed : r.config.seed;
  r.hash = fnv1a_hex(r.config.text);
  fs::create_directories(r.out);
  return r;
}

Provenance provenance(const Run& run, const std::string& method) {
  return {run.hash, run.seed, method};
}

// CSV with a commented provenance header followed by a column row.
class Csv {
 public:
  Csv(const Run& run, const std::string& name, const std::string& description,
      const std::vector<std::string>& columns)
      : path_(run.out / name), out_(path_) {
    if (!out_) throw Error("cannot write " + path_.string());
    out_ << "# xtalk " << version << "\n";
    out_ << "# config_hash=" << run.hash << " seed=" << run.seed << "\n";
    out_ << "# " << description << "\n";
    row(columns);
  }
  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
    out_ << "\n";
  }
  [[nodiscard]] const fs::path& path() const { return path_; }

 private:
  fs::path path_;
  std::ofstream out_;
};

const GateSpec& require_gate(const Run& run) {
  if (!run.config.gate) throw ValidationError(run.config.origin + ": /gate: required for this command");
  return *run.config.gate;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

PulseSchedule schedule_for(const Options& opt, const Run& run) {
  const std::string path = opt.schedule ? *opt.schedule : (run.out / "schedule.json").string();
  return load_schedule(path);
}

}  // namespace

int cmd_modes(const Options& opt) {
  const Run run = prepare(opt);
  const ModeSet modes = build_modes(run.config);
  const int n = modes.size();
  std::vector<std::string> cols{"mode", "freq_mhz", "lamb_dicke"};
  for (int j = 1; j <= n; ++j) cols.push_back("b_" + std::to_string(j));
  Csv csv(run, "modes.csv",
          std::string("transverse modes (") + std::string(to_string(modes.source)) +
              "): ordinary frequency in MHz, dimensionless eta and participation b_{m,j}",
          cols);
  for (int m = 1; m <= n; ++m) {
    std::vector<std::string> row{std::to_string(m), num(units::angular_to_mhz(modes.freqs(m - 1))),
                                 num(modes.lamb_dicke(m - 1))};
    for (int j = 1; j <= n; ++j) row.push_back(num(modes.b(m, j)));
    csv.row(row);
  }
  if (modes.source == ModeSource::harmonic) {
    const Eigen::VectorXd x = equilibrium_positions(run.config.trap);
    Csv pos(run, "positions.csv", "equilibrium positions along the trap axis, micrometres",
            {"ion", "position_um"});
    for (int j = 0; j < n; ++j) pos.row({std::to_string(j + 1), num(x(j) * 1e6)});
  }
  std::cout << "modes: " << n << " (" << to_string(modes.source) << ")\n";
  for (int m = 1; m <= n; ++m)
    std::cout << "  mode " << m << ": " << num(units::angular_to_mhz(modes.freqs(m - 1)), 7)
              << " MHz, eta " << num(modes.lamb_dicke(m - 1), 5) << "\n";
  std::cout << "wrote " << csv.path().string() << "\n";
  return 0;
}

int cmd_independence(const Options& opt) {
  const Run run = prepare(opt);
  const ModeSet modes = build_modes(run.config);
  const int n = modes.size();
  std::optional<DesignBudget> reference;
  if (run.config.has_budget) reference = run.config.budget;
  const auto rows = feasibility_report(modes, run.config.threshold, reference);

  Eigen::MatrixXd map = Eigen::MatrixXd::Zero(n, n);
  for (const auto& r : rows) map(r.t1 - 1, r.t2 - 1) = r.independence;
  std::vector<std::string> cols{"t1"};
  for (int t2 = 1; t2 <= n; ++t2) cols.push_back("t2_" + std::to_string(t2));
  Csv csv(run, "independence.csv",
          "independence of each target pair (row t1, column t2; upper triangle, dimensionless)",
          cols);
  for (int t1 = 1; t1 <= n; ++t1) {
    std::vector<std::string> row{std::to_string(t1)};
    for (int t2 = 1; t2 <= n; ++t2) row.push_back(num(map(t1 - 1, t2 - 1)));
    csv.row(row);
  }
  Csv pairs(run, "pairs.csv",
            "per-pair independence, feasibility at threshold " + num(run.config.threshold) +
                ", linearized peak Rabi frequency in MHz when a budget is configured",
            {"t1", "t2", "independence", "feasible", "peak_rabi_mhz", "note"});
  int feasible = 0;
  std::cout << "feasible pairs (independence > " << run.config.threshold << "):";
  for (const auto& r : rows) {
    pairs.row({std::to_string(r.t1), std::to_string(r.t2), num(r.independence),
               r.feasible ? "1" : "0",
               r.peak_rabi ? num(units::angular_to_mhz(*r.peak_rabi)) : "",
               r.note.empty() ? "" : "\"" + r.note + "\""});
    if (r.feasible) {
      ++feasible;
      std::cout << " (" << r.t1 << "," << r.t2 << ")";
    }
  }
  std::cout << "\n" << feasible << " of " << rows.size() << " pairs feasible\n";
  return 0;
}

int cmd_design(const Options& opt) {
  const Run run = prepare(opt);
  const GateSpec& spec = require_gate(run);
  if (!run.config.has_budget) throw ValidationError(run.config.origin + ": /budget: required for design");
  const ModeSet modes = build_modes(run.config);
  const std::string method = opt.method ? *opt.method : run.config.method;
  DesignProblem problem{modes, spec, run.config.budget};

  DesignResult result = method == "quadratic"
                            ? design_quadratic(problem, run.config.restarts, run.seed)
                            : design_linearized(problem);
  const Provenance prov = provenance(run, method);
  save_schedule((run.out / "schedule.json").string(), result.schedule, prov);
  write_text(run.out / "design_report.json", design_report_text(result, modes, spec, prov));

  Csv traj(run, "trajectory.csv",
           "phase-space path alpha_m(t) per loop and mode; t in microseconds from loop start",
           {"loop", "mode", "t_us", "re_alpha", "im_alpha"});
  for (std::size_t l = 0; l < result.schedule.loops.size(); ++l) {
    const auto& loop = result.schedule.loops[l];
    const Eigen::MatrixXcd path = trajectory(loop, modes, 201);
    for (int m = 0; m < modes.size(); ++m)
      for (Eigen::Index k = 0; k < path.cols(); ++k)
        traj.row({std::to_string(l + 1), std::to_string(m + 1),
                  num(units::s_to_us(loop.duration * static_cast<double>(k) / (path.cols() - 1))),
                  num(path(m, k).real()), num(path(m, k).imag())});
  }

  std::cout << method << " design for targets (" << spec.t1 << "," << spec.t2 << "): "
            << result.schedule.loops.size() << " loop(s), theta " << num(result.achieved_theta, 10)
            << ", leakage " << num(result.crosstalk_leakage, 3) << ", peak Rabi 2pi x "
            << num(units::angular_to_mhz(result.peak_rabi), 5) << " MHz\n";
  for (const auto& c : result.loops)
    std::cout << "  loop on sideband " << c.sideband << " offset "
              << num(units::angular_to_khz(c.offset), 6) << " kHz, coefficient "
              << num(c.coefficient, 6) << "\n";
  return 0;
}

int cmd_simulate(const Options& opt) {
  const Run run = prepare(opt);
  const GateSpec& spec = require_gate(run);
  const ModeSet modes = build_modes(run.config);
  const PulseSchedule schedule = schedule_for(opt, run);
  const auto eps = opt.eps_grid ? *opt.eps_grid : run.config.eps_grid;
  const int phi = opt.phi_samples ? *opt.phi_samples : run.config.phi_samples;
  const PhaseModel model = run.config.has_budget ? run.config.budget.model : PhaseModel::exact;

  Csv fid(run, "fidelity.csv",
          "state fidelity and parity-derived Bell fidelity of the target pair versus crosstalk "
          "fraction epsilon",
          {"epsilon", "fidelity", "bell_fidelity", "max_crosstalk_parity_amplitude"});
  Csv amp(run, "parity_amplitude.csv",
          "parity oscillation amplitude per analysed pair versus epsilon",
          {"epsilon", "a", "b", "amplitude", "p00", "p11"});
  Csv curves(run, "parity.csv", "parity <Z_a Z_b> versus analysis phase phi (radians)",
             {"epsilon", "a", "b", "phi", "parity"});
  GateReport last;
  for (double e : eps) {
    GateSpec s = spec;
    s.epsilon = e;
    const IlluminationProfile light = uniform_illumination(modes.size(), s, e);
    last = simulate_schedule(modes, schedule, s, light, phi, model);
    double worst = 0.0;
    for (std::size_t k = 1; k < last.parity_scans.size(); ++k)
      worst = std::max(worst, last.parity_scans[k].amplitude);
    fid.row({num(e), num(last.fidelity, 15), num(last.bell_fidelity, 15), num(worst, 15)});
    for (const auto& c : last.parity_scans) {
      amp.row({num(e), std::to_string(c.a), std::to_string(c.b), num(c.amplitude, 15),
               num(c.p00, 15), num(c.p11, 15)});
      for (std::size_t k = 0; k < c.phi.size(); ++k)
        curves.row({num(e), std::to_string(c.a), std::to_string(c.b), num(c.phi[k]),
                    num(c.parity[k], 15)});
    }
  }
  const int n = modes.size();
  std::vector<std::string> cols{"j1"};
  for (int j = 1; j <= n; ++j) cols.push_back("j2_" + std::to_string(j));
  Csv jcsv(run, "coupling.csv", "coupling matrix J = g . chi (radians)", cols);
  for (int i = 0; i < n; ++i) {
    std::vector<std::string> row{std::to_string(i + 1)};
    for (int j = 0; j < n; ++j) row.push_back(num(last.coupling(i, j), 17));
    jcsv.row(row);
  }
  Csv res(run, "closure.csv", "worst closure residual per mode, relative to max|w| tau_loop",
          {"mode", "residual"});
  for (int m = 0; m < n; ++m) res.row({std::to_string(m + 1), num(last.closure_residuals(m), 6)});

  std::cout << "simulated " << eps.size() << " crosstalk fraction(s); target J = "
            << num(last.coupling(spec.t1 - 1, spec.t2 - 1), 10) << "\n";
  return 0;
}

int cmd_oracle_check(const Options& opt) {
  const Run run = prepare(opt);
  const GateSpec& spec = require_gate(run);
  const ModeSet modes = build_modes(run.config);
  const PulseSchedule schedule = schedule_for(opt, run);
  const auto eps = opt.eps_grid ? *opt.eps_grid : std::vector<double>{spec.epsilon};
  const PhaseModel model = run.config.has_budget ? run.config.budget.model : PhaseModel::exact;
  const Eigen::MatrixXd j = coupling_matrix(modes, accumulate_chi(schedule, modes, model).chi);

  OracleOptions oo;
  oo.fock_cutoff = run.config.fock_cutoff;
  Csv csv(run, "oracle.csv",
          "full spin-phonon integration versus the closed-form gate: operator-norm distance, "
          "spin-motion entropy (nats), step-halving difference",
          {"epsilon", "distance", "entropy", "halving_error", "steps", "max_mean_phonons"});
  bool ok = true;
  for (double e : eps) {
    GateSpec s = spec;
    s.epsilon = e;
    const IlluminationProfile light = uniform_illumination(modes.size(), s, e);
    const OracleResult r = full_hamiltonian_oracle(schedule, modes, light, oo);
    const double d = unitary_distance_up_to_phase(r.spin_unitary, qubit_unitary(j, light));
    csv.row({num(e), num(d, 6), num(r.entropy, 6), num(r.halving_error, 6), std::to_string(r.steps),
             num(r.mean_phonons.maxCoeff(), 6)});
    const bool pass = d < 1e-3 && r.entropy < 1e-4;
    ok = ok && pass;
    std::cout << "epsilon " << e << ": distance " << num(d, 3) << ", entropy " << num(r.entropy, 3)
              << (pass ? "  ok" : "  FAIL") << "\n";
  }
  return ok ? 0 : 2;
}

}  // namespace xtalk::cli
