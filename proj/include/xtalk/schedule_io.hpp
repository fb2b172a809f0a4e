#pragma once

#include <cstdint>
#include <string>

#include "xtalk/coupling.hpp"
#include "xtalk/design.hpp"
#include "xtalk/pulses.hpp"

namespace xtalk {

/// Provenance written into every schedule and report file.
struct Provenance {
  std::string config_hash;
  std::uint64_t seed = 0;
  std::string method;
};

/// Schedule document: per loop the absolute drive frequency (Hz, ordinary),
/// the loop duration (us) and the segment amplitudes (MHz, ordinary Rabi
/// frequency w / 2pi). Numbers are written with round-trip precision.
std::string schedule_to_text(const PulseSchedule& schedule, const Provenance& provenance);

/// Inverse of schedule_to_text. Throws ValidationError naming the origin and
/// the offending field.
PulseSchedule schedule_from_text(const std::string& text, const std::string& origin = "<string>");

void save_schedule(const std::string& path, const PulseSchedule& schedule,
                   const Provenance& provenance);
PulseSchedule load_schedule(const std::string& path);

/// Design report: achieved angle, leakage, peak Rabi frequency, chi, target
/// chi, J and the per-loop coefficients.
std::string design_report_text(const DesignResult& result, const ModeSet& modes,
                               const GateSpec& spec, const Provenance& provenance);

}  // namespace xtalk
