#include "xtalk/schedule_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "xtalk/errors.hpp"
#include "xtalk/simulate.hpp"
#include "xtalk/units.hpp"
#include "xtalk/version.hpp"

namespace xtalk {

using nlohmann::ordered_json;

namespace {

constexpr const char* schedule_format = "xtalk-schedule/1";

ordered_json provenance_json(const Provenance& p) {
  ordered_json j;
  j["config_hash"] = p.config_hash;
  j["seed"] = p.seed;
  j["method"] = p.method;
  j["version"] = std::string(version);
  return j;
}

ordered_json vector_json(const Eigen::VectorXd& v) {
  ordered_json a = ordered_json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

ordered_json matrix_json(const Eigen::MatrixXd& m) {
  ordered_json a = ordered_json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) a.push_back(vector_json(m.row(i).transpose()));
  return a;
}

}  // namespace

std::string schedule_to_text(const PulseSchedule& schedule, const Provenance& provenance) {
  ordered_json j;
  j["format"] = schedule_format;
  j["conventions"] = {
      {"detuning_hz", "absolute drive frequency omega_d / 2pi, Hz"},
      {"duration_us", "loop duration, microseconds"},
      {"amplitudes_mhz", "segment Rabi amplitudes w / 2pi, MHz, equal-length segments"},
      {"drive", "f(t) = w_s sin(omega_d t), t measured from the start of each loop"}};
  j["provenance"] = provenance_json(provenance);
  ordered_json loops = ordered_json::array();
  for (const auto& l : schedule.loops) {
    ordered_json lj;
    lj["detuning_hz"] = units::angular_to_hz(l.detuning);
    lj["duration_us"] = units::s_to_us(l.duration);
    ordered_json amps = ordered_json::array();
    for (Eigen::Index s = 0; s < l.amplitudes.size(); ++s)
      amps.push_back(units::angular_to_mhz(l.amplitudes(s)));
    lj["amplitudes_mhz"] = amps;
    loops.push_back(lj);
  }
  j["loops"] = loops;
  j["total_duration_us"] = units::s_to_us(schedule.total_duration());
  return j.dump(2) + "\n";
}

PulseSchedule schedule_from_text(const std::string& text, const std::string& origin) {
  auto fail = [&](const std::string& msg) -> void {
    throw ValidationError(origin + ": " + msg);
  };
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const ordered_json::parse_error& e) {
    fail(std::string("JSON syntax error: ") + e.what());
  }
  if (!j.is_object() || !j.contains("format") || j["format"] != schedule_format)
    fail(std::string("not a schedule document (expected format '") + schedule_format + "')");
  if (!j.contains("loops") || !j["loops"].is_array()) fail("/loops: expected an array");
  PulseSchedule s;
  std::size_t idx = 0;
  for (const auto& lj : j["loops"]) {
    const std::string where = "/loops/" + std::to_string(idx++);
    for (const char* key : {"detuning_hz", "duration_us"})
      if (!lj.contains(key) || !lj[key].is_number()) fail(where + "/" + key + ": expected a number");
    if (!lj.contains("amplitudes_mhz") || !lj["amplitudes_mhz"].is_array())
      fail(where + "/amplitudes_mhz: expected an array");
    PulseLoop l;
    l.detuning = units::hz_to_angular(lj["detuning_hz"].get<double>());
    l.duration = units::us_to_s(lj["duration_us"].get<double>());
    l.amplitudes.resize(static_cast<Eigen::Index>(lj["amplitudes_mhz"].size()));
    Eigen::Index k = 0;
    for (const auto& a : lj["amplitudes_mhz"]) {
      if (!a.is_number()) fail(where + "/amplitudes_mhz: expected numbers");
      l.amplitudes(k++) = units::mhz_to_angular(a.get<double>());
    }
    try {
      l.validate();
    } catch (const ValidationError& e) {
      fail(where + ": " + e.what());
    }
    s.loops.push_back(std::move(l));
  }
  return s;
}

void save_schedule(const std::string& path, const PulseSchedule& schedule,
                   const Provenance& provenance) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write schedule file '" + path + "'");
  out << schedule_to_text(schedule, provenance);
}

PulseSchedule load_schedule(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open schedule file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return schedule_from_text(buf.str(), path);
}

std::string design_report_text(const DesignResult& result, const ModeSet& modes,
                               const GateSpec& spec, const Provenance& provenance) {
  ordered_json j;
  j["provenance"] = provenance_json(provenance);
  j["method"] = result.method;
  j["targets"] = {spec.t1, spec.t2};
  j["neighbors"] = spec.neighbors;
  j["theta_target"] = spec.theta;
  j["theta_achieved"] = result.achieved_theta;
  j["crosstalk_leakage"] = result.crosstalk_leakage;
  j["peak_rabi_mhz"] = units::angular_to_mhz(result.peak_rabi);
  j["independence"] = result.independence;
  j["loop_count"] = result.schedule.loops.size();
  j["total_duration_us"] = units::s_to_us(result.schedule.total_duration());
  j["chi"] = vector_json(result.chi.chi);
  j["target_chi"] = vector_json(result.target_chi);
  j["coupling_matrix"] = matrix_json(coupling_matrix(modes, result.chi.chi));
  if (result.method == "linearized") {
    ordered_json loops = ordered_json::array();
    for (const auto& c : result.loops) {
      ordered_json lj;
      lj["sideband"] = c.sideband;
      lj["offset_khz"] = units::angular_to_khz(c.offset);
      lj["circulation"] = c.offset < 0.0 ? "below sideband" : "above sideband (mirror loop)";
      lj["coefficient"] = c.coefficient;
      lj["chi"] = vector_json(c.chi);
      loops.push_back(lj);
    }
    j["loops"] = loops;
    j["note"] =
        "negative phase contributions are realised by loops mirrored above a sideband, which "
        "reverse the phase-space circulation";
  } else {
    j["restarts_feasible"] = result.restarts_feasible;
  }
  return j.dump(2) + "\n";
}

}  // namespace xtalk
