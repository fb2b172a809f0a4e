#pragma once

#include <optional>
#include <string>
#include <vector>

namespace xtalk::cli {

struct Options {
  std::string config;
  std::string out = ".";
  std::optional<std::string> method;
  std::optional<unsigned long long> seed;
  std::optional<std::vector<double>> eps_grid;
  std::optional<int> phi_samples;
  std::optional<std::string> schedule;
};

// Exit codes: 0 success, 1 bad input, 2 infeasible design or failed check.
int cmd_modes(const Options& opt);
int cmd_independence(const Options& opt);
int cmd_design(const Options& opt);
int cmd_simulate(const Options& opt);
int cmd_oracle_check(const Options& opt);

}  // namespace xtalk::cli
