#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "xtalk/config.hpp"
#include "xtalk/errors.hpp"
#include "xtalk/version.hpp"

int main(int argc, char** argv) {
  namespace cli = xtalk::cli;
  CLI::App app{"Crosstalk-insensitive trapped-ion gate design"};
  app.set_version_flag("--version", std::string(xtalk::version));
  app.require_subcommand(1);

  cli::Options opt;
  std::string eps_text;
  int phi = 0;
  unsigned long long seed = 0;
  std::string method;
  std::string schedule;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config, "Run configuration (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", opt.out, "Output directory")->capture_default_str();
    sub->add_option("--seed", seed, "Seed for the stochastic optimizer");
  };

  auto* modes = app.add_subcommand("modes", "Mode frequencies, Lamb-Dicke parameters and participation");
  add_common(modes);
  auto* indep = app.add_subcommand("independence", "Independence map and feasible pairs");
  add_common(indep);
  auto* design = app.add_subcommand("design", "Design a crosstalk-insensitive pulse schedule");
  add_common(design);
  design->add_option("--method", method, "linearized or quadratic")
      ->check(CLI::IsMember({"linearized", "quadratic"}));
  auto* sim = app.add_subcommand("simulate", "Simulate a schedule under optical crosstalk");
  add_common(sim);
  auto* oracle = app.add_subcommand("oracle-check", "Check a schedule against full spin-phonon dynamics");
  add_common(oracle);
  for (auto* sub : {sim, oracle}) {
    sub->add_option("--schedule", schedule, "Schedule file (default <out>/schedule.json)");
    sub->add_option("--eps-grid", eps_text, "Comma-separated crosstalk fractions");
    sub->add_option("--phi-samples", phi, "Analysis phase samples per parity scan")
        ->check(CLI::PositiveNumber);
  }

  CLI11_PARSE(app, argc, argv);

  try {
    for (auto* sub : {modes, indep, design, sim, oracle})
      if (sub->count("--seed")) opt.seed = seed;
    if (!method.empty()) opt.method = method;
    if (!schedule.empty()) opt.schedule = schedule;
    if (!eps_text.empty()) opt.eps_grid = xtalk::parse_number_list(eps_text);
    if (phi > 0) opt.phi_samples = phi;

    if (modes->parsed()) return cli::cmd_modes(opt);
    if (indep->parsed()) return cli::cmd_independence(opt);
    if (design->parsed()) return cli::cmd_design(opt);
    if (sim->parsed()) return cli::cmd_simulate(opt);
    if (oracle->parsed()) return cli::cmd_oracle_check(opt);
  } catch (const xtalk::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const xtalk::InfeasibleDesign& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return 2;
  } catch (const xtalk::ClosureError& e) {
    std::cerr << "closure: " << e.what() << "\n";
    return 2;
  } catch (const xtalk::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
