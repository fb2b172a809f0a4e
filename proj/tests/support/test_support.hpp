#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "xtalk/config.hpp"
#include "xtalk/coupling.hpp"
#include "xtalk/design.hpp"
#include "xtalk/pulses.hpp"
#include "xtalk/simulate.hpp"
#include "xtalk/modes.hpp"
#include "xtalk/units.hpp"

namespace xtalk::test {

inline std::string source_path(const std::string& rel) {
  return std::string(XTALK_SOURCE_DIR) + "/" + rel;
}

inline RunConfig config(const std::string& name) {
  return load_run_config(source_path("configs/" + name + ".json"));
}

// Three-ion QSCOUT string used in the crosstalk experiment.
inline ModeSet qscout3() {
  return harmonic_modes(yb171_trap(3, units::mhz_to_angular(0.7), units::mhz_to_angular(2.506)));
}

// Yb171 string in the 0.5 MHz axial / 3 MHz radial trap.
inline ModeSet chain_string(int n) {
  return harmonic_modes(yb171_trap(n, units::mhz_to_angular(0.5), units::mhz_to_angular(3.0)));
}

// Stiff trap (radial / axial = 15) that keeps strings of up to 20 ions linear.
inline ModeSet long_string(int n) {
  return harmonic_modes(yb171_trap(n, units::mhz_to_angular(0.2), units::mhz_to_angular(3.0)));
}


inline DesignProblem problem(const std::string& name) {
  const RunConfig cfg = config(name);
  return DesignProblem{build_modes(cfg), *cfg.gate, cfg.budget};
}

// Largest |J_{t,n} / J_{t1,t2}| over crosstalk pairs and the achieved angle,
// both from g vectors and a chi recomputed by accumulate_chi.
struct Verified {
  double leakage = 0.0;
  double theta = 0.0;
};

inline Verified verify(const DesignProblem& p, const PulseSchedule& s) {
  const Eigen::VectorXd chi = accumulate_chi(s, p.modes).chi;
  const double jt = g_vector(p.modes, p.spec.t1, p.spec.t2).dot(chi);
  Verified v;
  v.theta = 2.0 * jt;
  for (const auto& [t, n] : p.spec.crosstalk_pairs())
    v.leakage = std::max(v.leakage, std::abs(g_vector(p.modes, t, n).dot(chi) / jt));
  return v;
}

}  // namespace xtalk::test
