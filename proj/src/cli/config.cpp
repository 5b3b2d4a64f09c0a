#include "cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>

namespace bmcli {

namespace {

constexpr double k_two_pi = 6.28318530717958647692;

struct RawValue {
  std::string text;
  int line = 0;
  bool is_string = false;
};

struct RawConfig {
  std::map<std::string, RawValue> entries;  // "section.key" -> value
};

[[noreturn]] void fail(int line, const std::string& msg) {
  std::ostringstream os;
  os << "config line " << line << ": " << msg;
  throw ConfigError(os.str());
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

RawConfig tokenize(const std::string& text) {
  RawConfig raw;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    // strip comments outside quoted strings
    bool quoted = false;
    for (size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"') quoted = !quoted;
      if (line[i] == '#' && !quoted) { line.resize(i); break; }
    }
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (t.front() == '[') {
      if (t.back() != ']') fail(lineno, "unterminated table header");
      section = trim(t.substr(1, t.size() - 2));
      if (section.empty()) fail(lineno, "empty table name");
      if (section.find('.') != std::string::npos)
        fail(lineno, "nested tables are not supported");
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) fail(lineno, "expected key = value");
    const std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    if (key.empty()) fail(lineno, "empty key");
    if (value.empty()) fail(lineno, "missing value for key '" + key + "'");
    RawValue rv;
    rv.line = lineno;
    if (value.front() == '"') {
      if (value.size() < 2 || value.back() != '"')
        fail(lineno, "unterminated string for key '" + key + "'");
      rv.text = value.substr(1, value.size() - 2);
      rv.is_string = true;
    } else {
      rv.text = value;
    }
    const std::string full = section.empty() ? key : section + "." + key;
    const auto [it, inserted] = raw.entries.emplace(full, rv);
    if (!inserted) {
      std::ostringstream os;
      os << "duplicated key '" << full << "' (lines " << it->second.line
         << " and " << lineno << ")";
      throw ConfigError(os.str());
    }
  }
  return raw;
}

class Reader {
 public:
  explicit Reader(RawConfig raw) : raw_(std::move(raw)) {}

  std::optional<double> number(const std::string& key) {
    const RawValue* rv = take(key);
    if (!rv) return std::nullopt;
    if (rv->is_string)
      fail(rv->line, "key '" + key + "' expects a number, got a string");
    char* end = nullptr;
    const double v = std::strtod(rv->text.c_str(), &end);
    if (end != rv->text.c_str() + rv->text.size())
      fail(rv->line, "non-numeric value '" + rv->text + "' for key '" + key + "'");
    return v;
  }

  std::optional<bool> boolean(const std::string& key) {
    const RawValue* rv = take(key);
    if (!rv) return std::nullopt;
    if (rv->text == "true") return true;
    if (rv->text == "false") return false;
    fail(rv->line, "key '" + key + "' expects true or false");
  }

  std::optional<std::string> string(const std::string& key) {
    const RawValue* rv = take(key);
    if (!rv) return std::nullopt;
    if (!rv->is_string)
      fail(rv->line, "key '" + key + "' expects a quoted string");
    return rv->text;
  }

  int line_of(const std::string& key) const {
    const auto it = raw_.entries.find(key);
    return it == raw_.entries.end() ? 0 : it->second.line;
  }

  bool has(const std::string& key) const {
    return raw_.entries.count(key) != 0;
  }

  bool section_present(const std::string& section) const {
    const std::string prefix = section + ".";
    for (const auto& [k, v] : raw_.entries)
      if (k.rfind(prefix, 0) == 0) return true;
    return false;
  }

  void finish() const {
    for (const auto& [k, v] : raw_.entries)
      if (!consumed_.count(k)) fail(v.line, "unknown key '" + k + "'");
  }

 private:
  const RawValue* take(const std::string& key) {
    const auto it = raw_.entries.find(key);
    if (it == raw_.entries.end()) return nullptr;
    consumed_.insert(key);
    return &it->second;
  }

  RawConfig raw_;
  std::set<std::string> consumed_;
};

// One physical rate, expressible in exactly one unit form.
double rate_value(Reader& r, const std::string& base, double kappa,
                  bool kappa_known, bool* found, int* line_used) {
  const std::string k_rad = base + "_rad_s";
  const std::string k_hz = base + "_times_2pi_hz";
  const std::string k_kap = base + "_in_units_of_kappa";
  int n_forms = 0;
  std::vector<std::string> present;
  for (const auto& k : {k_rad, k_hz, k_kap})
    if (r.has(k)) { ++n_forms; present.push_back(k); }
  if (n_forms > 1) {
    std::ostringstream os;
    os << "unit-suffix misuse: keys";
    for (const auto& k : present) os << " '" << k << "' (line " << r.line_of(k) << ")";
    os << " specify the same quantity; use exactly one form";
    throw ConfigError(os.str());
  }
  *found = n_forms == 1;
  if (!*found) return 0.0;
  *line_used = r.line_of(present.front());
  if (auto v = r.number(k_rad)) return *v;
  if (auto v = r.number(k_hz)) return *v * k_two_pi;
  const double v = *r.number(k_kap);
  if (!kappa_known)
    fail(*line_used, "'" + k_kap + "' requires kappa to be given first");
  return v * kappa;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  Reader r(tokenize(text));
  RunConfig cfg;

  // kappa first: other rates may be expressed relative to it
  bool have_kappa = false;
  int line = 0;
  {
    const std::string base = "physical.kappa";
    if (r.has(base + "_in_units_of_kappa"))
      fail(r.line_of(base + "_in_units_of_kappa"),
           "kappa cannot be given in units of itself");
    cfg.physical.kappa_rad_s = rate_value(r, base, 0.0, false, &have_kappa, &line);
  }
  const double kappa = cfg.physical.kappa_rad_s;

  bool found = false;
  cfg.physical.mirror_omega_rad_s =
      rate_value(r, "physical.mirror_freq", kappa, have_kappa, &found, &line);
  const bool have_mirror_freq = found;
  cfg.physical.detuning_c_rad_s =
      rate_value(r, "physical.detuning_c", kappa, have_kappa, &found, &line);
  const bool have_detuning_c = found;
  cfg.physical.pump_rate_rad_s =
      rate_value(r, "physical.pump_rate", kappa, have_kappa, &found, &line);
  const bool have_pump = found;
  cfg.physical.detuning_a_rad_s =
      rate_value(r, "physical.detuning_a", kappa, have_kappa, &found, &line);
  const bool have_detuning_a = found;
  cfg.physical.coupling_g_rad_s =
      rate_value(r, "physical.coupling_g", kappa, have_kappa, &found, &line);

  if (auto v = r.number("physical.mirror_mass_kg")) cfg.physical.mirror_mass_kg = *v;
  if (auto v = r.number("physical.cavity_length_m")) cfg.physical.cavity_length_m = *v;
  if (auto v = r.number("physical.laser_wavelength_m")) cfg.physical.wavelength_m = *v;
  if (auto v = r.number("physical.atom_mass_kg")) cfg.physical.atom_mass_kg = *v;
  if (auto v = r.number("physical.atom_number")) cfg.physical.atom_number = *v;
  cfg.physical.detuning_is_effective = 1;
  if (auto v = r.boolean("physical.detuning_is_effective"))
    cfg.physical.detuning_is_effective = *v ? 1 : 0;

  // remember which required keys were present (checked per subcommand later)
  auto need = [&](bool present, const char* name) {
    if (!present) cfg.missing_required.push_back(name);
  };
  need(cfg.physical.mirror_mass_kg != 0.0 || r.has("physical.mirror_mass_kg"),
       "physical.mirror_mass_kg");
  need(have_mirror_freq, "physical.mirror_freq_rad_s");
  need(cfg.physical.cavity_length_m != 0.0, "physical.cavity_length_m");
  need(have_kappa, "physical.kappa_rad_s");
  need(have_detuning_c, "physical.detuning_c_rad_s");
  need(have_pump, "physical.pump_rate_rad_s");
  need(cfg.physical.wavelength_m != 0.0, "physical.laser_wavelength_m");
  need(cfg.physical.atom_mass_kg != 0.0, "physical.atom_mass_kg");
  need(cfg.physical.atom_number != 0.0, "physical.atom_number");
  need(have_detuning_a, "physical.detuning_a_rad_s");

  if (auto v = r.string("experiment.initial_state")) {
    if (*v != "vacuum" && *v != "coherent" && *v != "thermal" && *v != "cat")
      throw ConfigError("experiment.initial_state must be one of vacuum, "
                        "coherent, thermal, cat");
    cfg.experiment.initial_state = *v;
  }
  if (auto v = r.number("experiment.alpha")) cfg.experiment.alpha = *v;
  if (auto v = r.number("experiment.nbar")) cfg.experiment.nbar = *v;
  if (auto v = r.number("experiment.grid_points"))
    cfg.experiment.grid_points = (int)*v;
  if (auto v = r.number("experiment.grid_span")) cfg.experiment.grid_span = *v;
  if (auto v = r.boolean("experiment.noise_enabled"))
    cfg.experiment.noise_enabled = *v;
  if (auto v = r.boolean("experiment.noise_symmetrized"))
    cfg.experiment.noise_symmetrized = *v;
  if (auto v = r.string("experiment.match_free_parameter")) {
    if (*v != "none" && *v != "g" && *v != "delta_a" && *v != "omega_m")
      throw ConfigError(
          "experiment.match_free_parameter must be none, g, delta_a or omega_m");
    cfg.experiment.match_free_parameter = *v;
  }
  if (auto v = r.number("experiment.match_bracket_lo"))
    cfg.experiment.match_bracket_lo = *v;
  if (auto v = r.number("experiment.match_bracket_hi"))
    cfg.experiment.match_bracket_hi = *v;
  if (auto v = r.number("experiment.seed")) cfg.experiment.seed = (uint64_t)*v;

  cfg.sweep.present = r.section_present("sweep");
  if (auto v = r.string("sweep.parameter")) cfg.sweep.parameter = *v;
  if (auto v = r.string("sweep.values")) {
    std::istringstream vs(*v);
    std::string item;
    while (std::getline(vs, item, ',')) {
      const std::string t = trim(item);
      if (t.empty()) continue;
      char* end = nullptr;
      const double x = std::strtod(t.c_str(), &end);
      if (end != t.c_str() + t.size())
        throw ConfigError("sweep.values: non-numeric entry '" + t + "'");
      cfg.sweep.values.push_back(x);
    }
  }
  {
    const auto from = r.number("sweep.from");
    const auto to = r.number("sweep.to");
    const auto steps = r.number("sweep.steps");
    if (from || to || steps) {
      if (!cfg.sweep.values.empty())
        throw ConfigError("sweep: give either values or from/to/steps, not both");
      if (!(from && to && steps))
        throw ConfigError("sweep: from, to and steps must be given together");
      const int n = (int)*steps;
      if (n < 1) throw ConfigError("sweep.steps must be >= 1");
      for (int i = 0; i < n; ++i)
        cfg.sweep.values.push_back(
            n == 1 ? *from : *from + (*to - *from) * i / (n - 1));
    }
  }
  if (auto v = r.boolean("sweep.optimize")) cfg.sweep.optimize = *v;

  if (auto v = r.number("full_model.t_end_s")) cfg.full_model.t_end_s = *v;
  if (auto v = r.number("full_model.tol")) cfg.full_model.tol = *v;
  if (auto v = r.number("full_model.samples"))
    cfg.full_model.samples = (long long)*v;
  if (auto v = r.number("full_model.damping")) cfg.full_model.damping = *v;

  if (auto v = r.number("oracle.dim")) cfg.oracle.dim = (int)*v;
  if (auto v = r.number("oracle.grid_points")) cfg.oracle.grid_points = (int)*v;
  if (auto v = r.number("oracle.span")) cfg.oracle.span = *v;
  if (auto v = r.number("oracle.alpha")) cfg.oracle.alpha = *v;
  if (auto v = r.number("oracle.paths")) cfg.oracle.paths = (long long)*v;
  if (auto v = r.number("oracle.seed")) cfg.oracle.seed = (uint64_t)*v;
  if (auto v = r.number("oracle.tolerance_scale"))
    cfg.oracle.tolerance_scale = *v;

  if (auto v = r.string("output.directory")) cfg.output_dir = *v;

  r.finish();
  return cfg;
}

void require_for_command(const RunConfig& cfg, const std::string& command) {
  const bool needs_physical = command != "oracle-check" && command != "render";
  if (needs_physical && !cfg.missing_required.empty())
    throw ConfigError("missing required key '" + cfg.missing_required.front() +
                      "'");
  if (command == "match" || (command == "transfer" &&
                             cfg.experiment.match_free_parameter != "none") ||
      (command == "sweep" && cfg.experiment.match_free_parameter != "none")) {
    if (cfg.experiment.match_bracket_hi <= cfg.experiment.match_bracket_lo)
      throw ConfigError(
          "missing required key 'experiment.match_bracket_lo/_hi' (a valid "
          "bracket is needed for frequency matching)");
  }
  if (command == "match" && cfg.experiment.match_free_parameter == "none")
    throw ConfigError("missing required key 'experiment.match_free_parameter'");
  if (command == "sweep") {
    if (!cfg.sweep.present)
      throw ConfigError("missing required key 'sweep.parameter'");
    if (cfg.sweep.parameter.empty())
      throw ConfigError("missing required key 'sweep.parameter'");
    if (!sweep_parameter_known(cfg.sweep.parameter))
      throw ConfigError("sweep.parameter '" + cfg.sweep.parameter +
                        "' is not a sweepable parameter");
    if (cfg.sweep.values.empty())
      throw ConfigError("missing required key 'sweep.values' (or from/to/steps)");
  }
}

bool sweep_parameter_known(const std::string& name) {
  static const char* known[] = {
      "detuning_c_rad_s", "detuning_c_in_units_of_kappa",
      "detuning_c_times_2pi_hz", "pump_rate_rad_s",
      "pump_rate_in_units_of_kappa", "pump_rate_times_2pi_hz",
      "coupling_g_rad_s", "coupling_g_in_units_of_kappa",
      "coupling_g_times_2pi_hz", "detuning_a_rad_s", "detuning_a_times_2pi_hz",
      "mirror_freq_rad_s", "mirror_freq_times_2pi_hz", "mirror_mass_kg",
      "atom_number", "alpha"};
  return std::find_if(std::begin(known), std::end(known), [&](const char* k) {
           return name == k;
         }) != std::end(known);
}

void apply_sweep_value(RunConfig& cfg, const std::string& name, double value) {
  const double kappa = cfg.physical.kappa_rad_s;
  if (name == "detuning_c_rad_s") cfg.physical.detuning_c_rad_s = value;
  else if (name == "detuning_c_in_units_of_kappa")
    cfg.physical.detuning_c_rad_s = value * kappa;
  else if (name == "detuning_c_times_2pi_hz")
    cfg.physical.detuning_c_rad_s = value * k_two_pi;
  else if (name == "pump_rate_rad_s") cfg.physical.pump_rate_rad_s = value;
  else if (name == "pump_rate_in_units_of_kappa")
    cfg.physical.pump_rate_rad_s = value * kappa;
  else if (name == "pump_rate_times_2pi_hz")
    cfg.physical.pump_rate_rad_s = value * k_two_pi;
  else if (name == "coupling_g_rad_s") cfg.physical.coupling_g_rad_s = value;
  else if (name == "coupling_g_in_units_of_kappa")
    cfg.physical.coupling_g_rad_s = value * kappa;
  else if (name == "coupling_g_times_2pi_hz")
    cfg.physical.coupling_g_rad_s = value * k_two_pi;
  else if (name == "detuning_a_rad_s") cfg.physical.detuning_a_rad_s = value;
  else if (name == "detuning_a_times_2pi_hz")
    cfg.physical.detuning_a_rad_s = value * k_two_pi;
  else if (name == "mirror_freq_rad_s") cfg.physical.mirror_omega_rad_s = value;
  else if (name == "mirror_freq_times_2pi_hz")
    cfg.physical.mirror_omega_rad_s = value * k_two_pi;
  else if (name == "mirror_mass_kg") cfg.physical.mirror_mass_kg = value;
  else if (name == "atom_number") cfg.physical.atom_number = value;
  else if (name == "alpha") cfg.experiment.alpha = value;
  else
    throw ConfigError("sweep.parameter '" + name + "' is not sweepable");
}

std::string read_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace bmcli
