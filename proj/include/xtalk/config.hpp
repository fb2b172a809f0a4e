#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "xtalk/coupling.hpp"
#include "xtalk/design.hpp"
#include "xtalk/modes.hpp"

namespace xtalk {

/// Everything a CLI run needs, converted to SI / angular units at parse time.
///
/// File format (JSON). Frequencies are ordinary, not angular; the "units"
/// object declares them and every 2*pi is applied here exactly once:
///
///   {
///     "units": {"frequency": "MHz", "offset": "kHz", "time": "us"},
///     "trap": {"species": "Yb171", "ion_count": 3,
///              "axial_freq": 0.7, "radial_freq": 2.506},
///     "mode_source": "harmonic",
///     "gate": {"targets": [1, 3], "theta": 0.785398, "epsilon": 0.25},
///     "budget": {"gate_time": 500, "loops": 2, "segments": 10},
///     "sweep": {"epsilon": [0, 0.05, 0.1], "phi_samples": 64},
///     "seed": 7
///   }
struct RunConfig {
  std::string origin;  // file path or "<string>"
  std::string text;    // raw file contents, hashed into output headers

  std::string species = "Yb171";
  TrapConfig trap;
  ModeSource mode_source = ModeSource::harmonic;
  // Synthetic band for sinusoidal modes, rad/s.
  double sinusoidal_top = 0.0;
  double sinusoidal_spacing = 0.0;

  std::optional<GateSpec> gate;
  DesignBudget budget;
  bool has_budget = false;
  std::string method = "linearized";
  int restarts = 32;

  std::vector<double> eps_grid{0.0, 0.05, 0.1, 0.15, 0.2, 0.25};
  int phi_samples = 64;
  double threshold = 0.1;
  int fock_cutoff = 8;
  std::uint64_t seed = 1;
};

/// Parses and validates a config document. Errors are ValidationError with
/// the origin, the offending JSON path and, when found, its line number.
RunConfig parse_run_config(const std::string& text, const std::string& origin = "<string>");

RunConfig load_run_config(const std::string& path);

/// Modes described by the config (harmonic or sinusoidal with synthetic band).
ModeSet build_modes(const RunConfig& config);

/// FNV-1a 64-bit hash, as 16 lowercase hex digits.
std::string fnv1a_hex(const std::string& data);

/// Parses a comma-separated list of numbers ("0,0.05,0.1").
std::vector<double> parse_number_list(const std::string& csv);

}  // namespace xtalk
