#include "config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <sstream>

#include "lsep/errors.hpp"
#include "lsep/units.hpp"

namespace lsep::cli {

namespace {

struct KeySpec {
  const char* key;
  const char* value;
  const char* help;
};

// The single source of defaults; --dump-defaults prints it verbatim.
constexpr KeySpec kSchema[] = {
    {"material.number_density_m3", "3.29e25", "molecular sites per m^3"},
    {"material.background_permittivity", "2.3104", "host permittivity (1.52^2)"},
    {"material.transition_energy_ev", "2.11", "exciton transition energy"},
    {"material.decay_rate_s", "1.15e12", "population decay rate, s^-1"},
    {"material.pure_dephasing_ev", "0.017", "pure dephasing, as an energy"},
    {"material.dipole_debye", "32", "orientation-averaged transition dipole"},

    {"lorentz.eps_background", "2.3104", "Lorentz background permittivity"},
    {"lorentz.oscillator_strength", "0.3", "dimensionless f0"},
    {"lorentz.resonance_ev", "2.11", "resonance energy"},
    {"lorentz.damping_ev", "0.0461", "damping energy"},

    {"spectrum.energy_min_ev", "1.9", "first photon energy"},
    {"spectrum.energy_max_ev", "2.4", "last photon energy"},
    {"spectrum.points", "501", "number of energies, inclusive"},

    {"sphere.radius_nm", "50", "sphere radius (100 nm diameter)"},
    {"sphere.host_epsilon", "1.0", "real host permittivity"},

    {"qabs.model", "quantum", "permittivity source: quantum, lorentz or data"},
    {"qabs.data", "", "energy_eV,eps_re,eps_im CSV for model = data"},

    {"laser.power_mw", "1.0", "laser power"},
    {"laser.spot_diameter_mm", "1.5", "spot diameter"},
    {"laser.field_v_per_m", "0", "explicit field amplitude; 0 derives it from power and spot"},

    {"transient.detunings_ev", "-0.09, -0.045, 0, 0.045, 0.09", "transition minus photon energy"},
    {"transient.time_min_fs", "0", "first sample"},
    {"transient.time_max_fs", "400", "last sample"},
    {"transient.time_step_fs", "1", "sample spacing"},

    {"nearfield.energy_ev", "2.16", "photon energy"},
    {"nearfield.epsilon_override", "", "\"re, im\" to replace the model permittivity"},
    {"nearfield.map_min_nm", "-250", "lower edge of the y and z map axes (x = 0 plane)"},
    {"nearfield.map_max_nm", "250", "upper edge of the map axes"},
    {"nearfield.map_points", "101", "samples per map axis"},
    {"nearfield.seed_z_nm", "-200", "z of the streamline seed line"},
    {"nearfield.seed_y_min_nm", "-200", "first seed y"},
    {"nearfield.seed_y_max_nm", "200", "last seed y"},
    {"nearfield.seed_count", "41", "seeds along y at x = 0"},
    {"nearfield.step_nm", "10", "streamline step"},
    {"nearfield.max_steps", "200", "streamline step limit"},

    {"fit.target", "", "energy_eV,eps_re,eps_im CSV to fit"},

    {"extract.measurements", "", "wavelength_nm,R,T CSV"},
    {"extract.thickness_min_nm", "63", "thickness sweep start"},
    {"extract.thickness_max_nm", "77", "thickness sweep end"},
    {"extract.thickness_samples", "15", "thicknesses in the sweep"},
    {"extract.reference_thickness_nm", "70", "thickness kappa is rescaled to"},
    {"extract.n_min", "1.0", "grid"},
    {"extract.n_max", "3.5", "grid"},
    {"extract.n_step", "0.005", "grid"},
    {"extract.kappa_min", "0.0", "grid"},
    {"extract.kappa_max", "2.0", "grid"},
    {"extract.kappa_step", "0.005", "grid"},
    {"extract.ambient_index", "1.0", "incidence medium"},
    {"extract.substrate_index", "1.52", "semi-infinite substrate"},
    {"extract.minima_kept", "2", "local minima kept per wavelength and thickness"},
    {"extract.max_residual", "0.02", "candidates above this residual count as failures"},
    {"extract.cluster_tolerance", "0.02", "|dn| + |dkappa| joining candidates of one branch"},
    {"extract.ambiguity_threshold", "0.05", "required relative total-variation margin"},
    {"extract.n_asymptote", "1.52", "high-energy index for the Kramers-Kronig closure"},
};

std::string strip(std::string s) {
  // Inline comments, then surrounding whitespace and quotes.
  for (const char* mark : {" #", " ;", "\t#", "\t;"}) {
    const auto p = s.find(mark);
    if (p != std::string::npos) s.erase(p);
  }
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  s = s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return s;
}

double parse_number(const std::string& key, const std::string& s) {
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE || !std::isfinite(v))
    throw ConfigError(key + ": expected a finite number, got '" + s + "'");
  return v;
}

}  // namespace

Config Config::defaults() {
  Config c;
  for (const auto& k : kSchema) c.values_[k.key] = k.value;
  c.base_ = std::filesystem::current_path();
  return c;
}

Config Config::load(const std::filesystem::path& path) {
  Config c = defaults();
  if (!std::filesystem::exists(path)) throw ConfigError("config file not found: " + path.string());
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::read_ini(path.string(), tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw ConfigError("config: key '" + section + "' must sit inside a [section]");
    for (const auto& [name, value] : body) c.set(section + "." + name, value.data());
  }
  c.base_ = std::filesystem::absolute(path).parent_path();
  return c;
}

std::string Config::dump_defaults() {
  std::ostringstream out;
  std::string section;
  for (const auto& k : kSchema) {
    const std::string key = k.key;
    const auto dot = key.find('.');
    const std::string s = key.substr(0, dot);
    if (s != section) {
      out << (section.empty() ? "" : "\n") << "[" << s << "]\n";
      section = s;
    }
    out << "# " << k.help << "\n" << key.substr(dot + 1) << " = " << k.value << "\n";
  }
  return out.str();
}

void Config::set(const std::string& key, const std::string& value) {
  if (!values_.count(key)) throw ConfigError("unknown config key '" + key + "'");
  values_[key] = strip(value);
}

std::string Config::text(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("unknown config key '" + key + "'");
  return it->second;
}

double Config::number(const std::string& key) const { return parse_number(key, text(key)); }

double Config::positive(const std::string& key) const {
  const double v = number(key);
  if (!(v > 0.0)) throw ConfigError(key + " must be > 0");
  return v;
}

double Config::non_negative(const std::string& key) const {
  const double v = number(key);
  if (!(v >= 0.0)) throw ConfigError(key + " must be >= 0");
  return v;
}

std::size_t Config::count(const std::string& key, std::size_t min) const {
  const double v = number(key);
  if (v != std::floor(v) || v < static_cast<double>(min) || v > 1e9)
    throw ConfigError(key + " must be an integer >= " + std::to_string(min));
  return static_cast<std::size_t>(v);
}

std::vector<double> Config::list(const std::string& key) const {
  std::vector<double> out;
  std::stringstream ss(text(key));
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number(key, strip(item)));
  if (out.empty()) throw ConfigError(key + " must list at least one value");
  return out;
}

std::filesystem::path Config::path(const std::string& key) const {
  const std::string s = text(key);
  if (s.empty()) throw ConfigError(key + " is required");
  std::filesystem::path p(s);
  if (p.is_relative()) p = base_ / p;
  if (!std::filesystem::exists(p)) throw ConfigError(key + ": file not found: " + p.string());
  return p;
}

medium::MaterialParams material(const Config& c) {
  medium::MaterialParams m;
  m.number_density = c.positive("material.number_density_m3");
  m.background_permittivity = c.positive("material.background_permittivity");
  m.two_level.transition_energy = c.positive("material.transition_energy_ev");
  m.two_level.decay_rate = c.non_negative("material.decay_rate_s");
  m.two_level.pure_dephasing = c.non_negative("material.pure_dephasing_ev");
  m.two_level.dipole = c.non_negative("material.dipole_debye");
  m.validate();
  return m;
}

medium::LorentzParams lorentz(const Config& c) {
  medium::LorentzParams p;
  p.eps_background = c.positive("lorentz.eps_background");
  p.oscillator_strength = c.non_negative("lorentz.oscillator_strength");
  p.resonance = c.positive("lorentz.resonance_ev");
  p.damping = c.positive("lorentz.damping_ev");
  return p;
}

std::vector<double> energy_grid(const Config& c) {
  const double lo = c.positive("spectrum.energy_min_ev");
  const double hi = c.positive("spectrum.energy_max_ev");
  const std::size_t n = c.count("spectrum.points", 2);
  if (!(hi > lo)) throw ConfigError("spectrum.energy_max_ev must exceed spectrum.energy_min_ev");
  std::vector<double> e(n);
  for (std::size_t i = 0; i < n; ++i) e[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return e;
}

double drive_amplitude(const Config& c) {
  const double explicit_field = c.non_negative("laser.field_v_per_m");
  if (explicit_field > 0.0) return explicit_field;
  const double power = c.non_negative("laser.power_mw") * 1e-3;
  const double spot = c.positive("laser.spot_diameter_mm") * 1e-3;
  return units::field_from_power(power, spot);
}

film::ExtractOptions extract_options(const Config& c) {
  film::ExtractOptions o;
  o.thickness.min = c.positive("extract.thickness_min_nm") * 1e-9;
  o.thickness.max = c.positive("extract.thickness_max_nm") * 1e-9;
  o.thickness.samples = c.count("extract.thickness_samples");
  if (o.thickness.max < o.thickness.min)
    throw ConfigError("extract.thickness_max_nm must be >= extract.thickness_min_nm");
  if (o.thickness.max >= 1e-6) throw ConfigError("extract.thickness_max_nm must be below 1000 nm");
  if (o.thickness.samples == 1 && o.thickness.max != o.thickness.min)
    throw ConfigError("extract.thickness_samples = 1 requires extract.thickness_min_nm = extract.thickness_max_nm");
  o.grid.n_min = c.positive("extract.n_min");
  o.grid.n_max = c.positive("extract.n_max");
  o.grid.n_step = c.positive("extract.n_step");
  o.grid.kappa_min = c.non_negative("extract.kappa_min");
  o.grid.kappa_max = c.positive("extract.kappa_max");
  o.grid.kappa_step = c.positive("extract.kappa_step");
  if (!(o.grid.n_max > o.grid.n_min)) throw ConfigError("extract.n_max must exceed extract.n_min");
  if (!(o.grid.kappa_max > o.grid.kappa_min)) throw ConfigError("extract.kappa_max must exceed extract.kappa_min");
  o.ambient_index = c.positive("extract.ambient_index");
  o.substrate_index = c.positive("extract.substrate_index");
  o.minima_kept = c.count("extract.minima_kept");
  o.grid.validate();
  o.thickness.validate();
  return o;
}

film::BranchOptions branch_options(const Config& c) {
  film::BranchOptions b;
  b.max_residual = c.positive("extract.max_residual");
  b.cluster_tolerance = c.non_negative("extract.cluster_tolerance");
  b.ambiguity_threshold = c.non_negative("extract.ambiguity_threshold");
  return b;
}

}  // namespace lsep::cli
