#include "xtalk/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "xtalk/errors.hpp"
#include "xtalk/units.hpp"

namespace xtalk {

using nlohmann::json;

namespace {

// Line of the last key in `path`, found by scanning for each key in turn.
int locate_line(const std::string& text, const std::vector<std::string>& path) {
  std::size_t pos = 0;
  for (const auto& key : path) {
    if (!key.empty() && key.front() == '[') continue;
    const std::size_t hit = text.find('"' + key + '"', pos);
    if (hit == std::string::npos) return 0;
    pos = hit;
  }
  if (path.empty()) return 0;
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<long>(pos), '\n'));
}

double frequency_scale(const std::string& unit) {
  if (unit == "Hz") return 1.0;
  if (unit == "kHz") return 1e3;
  if (unit == "MHz") return 1e6;
  throw std::invalid_argument(unit);
}

double time_scale(const std::string& unit) {
  if (unit == "s") return 1.0;
  if (unit == "ms") return 1e-3;
  if (unit == "us") return 1e-6;
  throw std::invalid_argument(unit);
}

class Reader {
 public:
  Reader(const std::string& text, const std::string& origin) : text_(text), origin_(origin) {}

  [[noreturn]] void fail(const std::vector<std::string>& path, const std::string& msg) const {
    std::ostringstream out;
    out << origin_;
    const int line = locate_line(text_, path);
    if (line > 0) out << ":" << line;
    out << ": ";
    if (!path.empty()) {
      std::string joined;
      for (const auto& p : path) joined += (p.front() == '[' ? "" : "/") + p;
      out << joined << ": ";
    }
    out << msg;
    throw ValidationError(out.str());
  }

  void only_keys(const json& obj, const std::vector<std::string>& path,
                 const std::set<std::string>& allowed) const {
    if (!obj.is_object()) fail(path, "expected an object");
    for (const auto& [k, v] : obj.items()) {
      if (!allowed.count(k)) {
        auto p = path;
        p.push_back(k);
        fail(p, "unknown key");
      }
    }
  }

  double number(const json& obj, const std::vector<std::string>& path, const std::string& key) const {
    auto p = path;
    p.push_back(key);
    if (!obj.contains(key)) fail(p, "required key missing");
    const json& v = obj.at(key);
    if (!v.is_number()) fail(p, "expected a number");
    return v.get<double>();
  }

  std::optional<double> optional_number(const json& obj, const std::vector<std::string>& path,
                                        const std::string& key) const {
    if (!obj.contains(key)) return std::nullopt;
    return number(obj, path, key);
  }

  int integer(const json& obj, const std::vector<std::string>& path, const std::string& key) const {
    auto p = path;
    p.push_back(key);
    if (!obj.contains(key)) fail(p, "required key missing");
    const json& v = obj.at(key);
    if (!v.is_number_integer()) fail(p, "expected an integer");
    return v.get<int>();
  }

  std::string string(const json& obj, const std::vector<std::string>& path,
                     const std::string& key, const std::string& fallback) const {
    if (!obj.contains(key)) return fallback;
    auto p = path;
    p.push_back(key);
    if (!obj.at(key).is_string()) fail(p, "expected a string");
    return obj.at(key).get<std::string>();
  }

  std::vector<double> numbers(const json& obj, const std::vector<std::string>& path,
                              const std::string& key) const {
    auto p = path;
    p.push_back(key);
    const json& v = obj.at(key);
    if (!v.is_array()) fail(p, "expected an array of numbers");
    std::vector<double> out;
    for (const auto& e : v) {
      if (!e.is_number()) fail(p, "expected an array of numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }

  std::vector<int> integers(const json& obj, const std::vector<std::string>& path,
                            const std::string& key) const {
    auto p = path;
    p.push_back(key);
    const json& v = obj.at(key);
    if (!v.is_array()) fail(p, "expected an array of integers");
    std::vector<int> out;
    for (const auto& e : v) {
      if (!e.is_number_integer()) fail(p, "expected an array of integers");
      out.push_back(e.get<int>());
    }
    return out;
  }

 private:
  const std::string& text_;
  const std::string& origin_;
};

}  // namespace

RunConfig parse_run_config(const std::string& text, const std::string& origin) {
  RunConfig cfg;
  cfg.origin = origin;
  cfg.text = text;
  const Reader rd(cfg.text, cfg.origin);

  json root;
  try {
    root = json::parse(text);
  } catch (const json::parse_error& e) {
    const auto byte = std::min<std::size_t>(e.byte, text.size());
    const int line = 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<long>(byte), '\n'));
    std::ostringstream msg;
    msg << origin << ":" << line << ": JSON syntax error: " << e.what();
    throw ValidationError(msg.str());
  }
  rd.only_keys(root, {}, {"units", "trap", "mode_source", "sinusoidal", "gate", "budget", "sweep",
                          "independence", "oracle", "seed"});

  // Units are declared, never assumed.
  if (!root.contains("units")) rd.fail({"units"}, "required key missing (declare frequency/time units)");
  const json& u = root.at("units");
  rd.only_keys(u, {"units"}, {"frequency", "offset", "time"});
  double fscale = 0.0, oscale = 0.0, tscale = 0.0;
  const std::string funit = rd.string(u, {"units"}, "frequency", "MHz");
  const std::string ounit = rd.string(u, {"units"}, "offset", "kHz");
  const std::string tunit = rd.string(u, {"units"}, "time", "us");
  try {
    fscale = frequency_scale(funit);
  } catch (const std::invalid_argument&) {
    rd.fail({"units", "frequency"}, "unsupported unit '" + funit + "' (Hz, kHz, MHz)");
  }
  try {
    oscale = frequency_scale(ounit);
  } catch (const std::invalid_argument&) {
    rd.fail({"units", "offset"}, "unsupported unit '" + ounit + "' (Hz, kHz, MHz)");
  }
  try {
    tscale = time_scale(tunit);
  } catch (const std::invalid_argument&) {
    rd.fail({"units", "time"}, "unsupported unit '" + tunit + "' (s, ms, us)");
  }
  auto freq = [&](double v) { return units::hz_to_angular(v * fscale); };
  auto offset = [&](double v) { return units::hz_to_angular(v * oscale); };
  auto time = [&](double v) { return v * tscale; };

  // Trap.
  if (!root.contains("trap")) rd.fail({"trap"}, "required key missing");
  const json& t = root.at("trap");
  const std::vector<std::string> tp{"trap"};
  rd.only_keys(t, tp, {"species", "ion_count", "axial_freq", "radial_freq", "ion_mass_amu",
                       "raman_wavelength_nm", "raman_geometry_factor"});
  cfg.species = rd.string(t, tp, "species", "Yb171");
  const int n = rd.integer(t, tp, "ion_count");
  const double wl = rd.optional_number(t, tp, "raman_wavelength_nm").value_or(355.0) * 1e-9;
  const double geom = rd.optional_number(t, tp, "raman_geometry_factor").value_or(std::sqrt(2.0));
  const double axial = freq(rd.number(t, tp, "axial_freq"));
  const double radial = freq(rd.number(t, tp, "radial_freq"));
  if (cfg.species == "Yb171") {
    if (t.contains("ion_mass_amu")) rd.fail({"trap", "ion_mass_amu"}, "species Yb171 fixes the mass");
    cfg.trap = yb171_trap(n, axial, radial, wl, geom);
  } else if (cfg.species == "custom") {
    cfg.trap.ion_count = n;
    cfg.trap.ion_mass = rd.number(t, tp, "ion_mass_amu") * units::atomic_mass_unit;
    cfg.trap.axial_freq = axial;
    cfg.trap.radial_freq = radial;
    cfg.trap.raman_delta_k = geom * units::two_pi / wl;
  } else {
    rd.fail({"trap", "species"}, "unknown species '" + cfg.species + "' (Yb171 or custom)");
  }
  try {
    cfg.trap.validate();
  } catch (const ValidationError& e) {
    rd.fail({"trap"}, e.what());
  }

  // Mode source.
  const std::string src = rd.string(root, {}, "mode_source", "harmonic");
  if (src == "harmonic") {
    cfg.mode_source = ModeSource::harmonic;
  } else if (src == "sinusoidal") {
    cfg.mode_source = ModeSource::sinusoidal;
  } else {
    rd.fail({"mode_source"}, "expected 'harmonic' or 'sinusoidal'");
  }
  if (root.contains("sinusoidal")) {
    const json& s = root.at("sinusoidal");
    rd.only_keys(s, {"sinusoidal"}, {"top_freq", "spacing"});
    cfg.sinusoidal_top = freq(rd.number(s, {"sinusoidal"}, "top_freq"));
    cfg.sinusoidal_spacing = freq(rd.number(s, {"sinusoidal"}, "spacing"));
    if (!(cfg.sinusoidal_top > 0.0) || !(cfg.sinusoidal_spacing > 0.0))
      rd.fail({"sinusoidal"}, "top_freq and spacing must be positive");
  }

  // Gate.
  if (root.contains("gate")) {
    const json& g = root.at("gate");
    const std::vector<std::string> gp{"gate"};
    rd.only_keys(g, gp, {"targets", "neighbors", "theta", "theta_over_pi", "epsilon"});
    if (!g.contains("targets")) rd.fail({"gate", "targets"}, "required key missing");
    const auto tg = rd.integers(g, gp, "targets");
    if (tg.size() != 2) rd.fail({"gate", "targets"}, "expected exactly two target ions");
    double theta = units::pi / 4;
    if (g.contains("theta") && g.contains("theta_over_pi"))
      rd.fail({"gate", "theta_over_pi"}, "give theta or theta_over_pi, not both");
    if (g.contains("theta")) theta = rd.number(g, gp, "theta");
    if (g.contains("theta_over_pi")) theta = units::pi * rd.number(g, gp, "theta_over_pi");
    const double eps = rd.optional_number(g, gp, "epsilon").value_or(0.0);
    std::optional<std::vector<int>> nb;
    if (g.contains("neighbors")) nb = rd.integers(g, gp, "neighbors");
    try {
      cfg.gate = make_gate_spec(n, std::min(tg[0], tg[1]), std::max(tg[0], tg[1]), theta, eps, nb);
    } catch (const ValidationError& e) {
      rd.fail({"gate"}, e.what());
    }
  }

  // Design budget.
  if (root.contains("budget")) {
    const json& b = root.at("budget");
    const std::vector<std::string> bp{"budget"};
    rd.only_keys(b, bp, {"gate_time", "loops", "segments", "max_peak_rabi", "detuning_offsets",
                         "sidebands", "detuning", "shape_angles", "leakage_tolerance", "model",
                         "cancel_crosstalk",
                         "method", "restarts"});
    cfg.has_budget = true;
    auto& bd = cfg.budget;
    bd.gate_time = time(rd.number(b, bp, "gate_time"));
    bd.loops = b.contains("loops") ? rd.integer(b, bp, "loops") : 1;
    bd.segments = rd.integer(b, bp, "segments");
    if (b.contains("max_peak_rabi")) bd.max_peak_rabi = freq(rd.number(b, bp, "max_peak_rabi"));
    if (b.contains("detuning_offsets")) {
      bd.detuning_offsets.clear();
      for (double v : rd.numbers(b, bp, "detuning_offsets")) bd.detuning_offsets.push_back(offset(v));
      if (bd.detuning_offsets.empty()) rd.fail({"budget", "detuning_offsets"}, "must not be empty");
    }
    if (b.contains("sidebands")) {
      bd.sidebands = rd.integers(b, bp, "sidebands");
      for (int l : bd.sidebands)
        if (l < 1 || l > n) rd.fail({"budget", "sidebands"}, "sideband index out of range");
    }
    if (b.contains("detuning")) bd.detuning = freq(rd.number(b, bp, "detuning"));
    if (b.contains("shape_angles")) bd.shape_angles = rd.integer(b, bp, "shape_angles");
    if (b.contains("cancel_crosstalk")) {
      if (!b.at("cancel_crosstalk").is_boolean())
        rd.fail({"budget", "cancel_crosstalk"}, "expected true or false");
      bd.cancel_crosstalk = b.at("cancel_crosstalk").get<bool>();
    }
    if (b.contains("leakage_tolerance")) bd.leakage_tolerance = rd.number(b, bp, "leakage_tolerance");
    const std::string model = rd.string(b, bp, "model", "exact");
    if (model == "exact") {
      bd.model = PhaseModel::exact;
    } else if (model == "rotating_wave") {
      bd.model = PhaseModel::rotating_wave;
    } else {
      rd.fail({"budget", "model"}, "expected 'exact' or 'rotating_wave'");
    }
    cfg.method = rd.string(b, bp, "method", "linearized");
    if (cfg.method != "linearized" && cfg.method != "quadratic")
      rd.fail({"budget", "method"}, "expected 'linearized' or 'quadratic'");
    if (b.contains("restarts")) cfg.restarts = rd.integer(b, bp, "restarts");
    if (cfg.restarts < 1) rd.fail({"budget", "restarts"}, "must be >= 1");
    try {
      bd.validate();
    } catch (const ValidationError& e) {
      rd.fail({"budget"}, e.what());
    }
  }

  if (root.contains("sweep")) {
    const json& s = root.at("sweep");
    rd.only_keys(s, {"sweep"}, {"epsilon", "phi_samples"});
    if (s.contains("epsilon")) {
      cfg.eps_grid = rd.numbers(s, {"sweep"}, "epsilon");
      for (double e : cfg.eps_grid)
        if (!(e >= 0.0 && e < 1.0)) rd.fail({"sweep", "epsilon"}, "values must lie in [0, 1)");
    }
    if (s.contains("phi_samples")) cfg.phi_samples = rd.integer(s, {"sweep"}, "phi_samples");
    if (cfg.phi_samples < 1) rd.fail({"sweep", "phi_samples"}, "must be >= 1");
  }
  if (root.contains("independence")) {
    const json& s = root.at("independence");
    rd.only_keys(s, {"independence"}, {"threshold"});
    cfg.threshold = rd.optional_number(s, {"independence"}, "threshold").value_or(0.1);
    if (!(cfg.threshold >= 0.0 && cfg.threshold <= 1.0))
      rd.fail({"independence", "threshold"}, "must lie in [0, 1]");
  }
  if (root.contains("oracle")) {
    const json& s = root.at("oracle");
    rd.only_keys(s, {"oracle"}, {"fock_cutoff"});
    cfg.fock_cutoff = rd.integer(s, {"oracle"}, "fock_cutoff");
  }
  if (root.contains("seed")) {
    if (!root.at("seed").is_number_unsigned()) rd.fail({"seed"}, "expected a non-negative integer");
    cfg.seed = root.at("seed").get<std::uint64_t>();
  }
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_run_config(buf.str(), path);
}

ModeSet build_modes(const RunConfig& config) {
  if (config.mode_source == ModeSource::harmonic) return harmonic_modes(config.trap);
  if (config.sinusoidal_top > 0.0)
    return sinusoidal_modes(config.trap.ion_count, config.sinusoidal_top, config.sinusoidal_spacing,
                            config.trap.ion_mass, config.trap.raman_delta_k);
  return sinusoidal_modes(config.trap.ion_count);
}

std::string fnv1a_hex(const std::string& data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  std::ostringstream out;
  out << std::hex;
  out.width(16);
  out.fill('0');
  out << h;
  return out.str();
}

std::vector<double> parse_number_list(const std::string& csv) {
  std::vector<double> out;
  std::stringstream ss(csv);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw ValidationError("not a number: '" + item + "'");
    }
    if (item.find_first_not_of(" \t", used) != std::string::npos)
      throw ValidationError("not a number: '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw ValidationError("empty number list");
  return out;
}

}  // namespace xtalk
