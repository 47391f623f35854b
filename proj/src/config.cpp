#include "dce/config.hpp"

#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "dce/errors.hpp"
#include "dce/format.hpp"

namespace dce {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return {};
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  errno = 0;
  char* end = nullptr;
  const double v = std::strtod(value.c_str(), &end);
  if (end == value.c_str() || *end != '\0' || errno == ERANGE)
    throw ConfigError("config key '" + key + "': '" + value + "' is not a number");
  return v;
}

int parse_int(const std::string& key, const std::string& value) {
  errno = 0;
  char* end = nullptr;
  const long v = std::strtol(value.c_str(), &end, 10);
  if (end == value.c_str() || *end != '\0' || errno == ERANGE || v < INT_MIN || v > INT_MAX)
    throw ConfigError("config key '" + key + "': '" + value + "' is not an integer");
  return static_cast<int>(v);
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  errno = 0;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(value.c_str(), &end, 10);
  if (end == value.c_str() || *end != '\0' || errno == ERANGE || value.find('-') != std::string::npos)
    throw ConfigError("config key '" + key + "': '" + value + "' is not an unsigned integer");
  return static_cast<std::uint64_t>(v);
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true") return true;
  if (value == "false") return false;
  throw ConfigError("config key '" + key + "': expected true or false, got '" + value + "'");
}

Integrator parse_integrator(const std::string& key, const std::string& value) {
  if (value == "midpoint-exponential") return Integrator::MidpointExponential;
  if (value == "cf4") return Integrator::CommutatorFree4;
  throw ConfigError("config key '" + key + "': unknown integrator '" + value + "'");
}

ResetMode parse_reset_mode(const std::string& key, const std::string& value) {
  if (value == "exact-vacuum") return ResetMode::ExactVacuum;
  if (value == "atom-extraction") return ResetMode::AtomExtraction;
  throw ConfigError("config key '" + key + "': unknown reset mode '" + value + "'");
}

OutputFormat parse_format(const std::string& key, const std::string& value) {
  if (value == "csv") return OutputFormat::Csv;
  if (value == "json") return OutputFormat::Json;
  throw ConfigError("config key '" + key + "': unknown format '" + value + "'");
}

void apply_key(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
  if (key == "omega0") cfg.omega0 = parse_double(key, value);
  else if (key == "epsilon") cfg.epsilon = parse_double(key, value);
  else if (key == "eta") cfg.eta = parse_double(key, value);
  else if (key == "omega0_per_mcs") cfg.omega0_per_mcs = parse_double(key, value);
  else if (key == "g") cfg.g = parse_double(key, value);
  else if (key == "delta") cfg.delta = parse_double(key, value);
  else if (key == "generation_duration_mcs") cfg.generation_duration_mcs = parse_double(key, value);
  else if (key == "fock_dim") cfg.fock_dim = parse_int(key, value);
  else if (key == "steps_per_drive_period") cfg.steps_per_drive_period = parse_int(key, value);
  else if (key == "integrator") cfg.integrator = parse_integrator(key, value);
  else if (key == "unitarity_tol") cfg.unitarity_tol = parse_double(key, value);
  else if (key == "tail_threshold") cfg.tail_threshold = parse_double(key, value);
  else if (key == "tau_max") cfg.tau_max = parse_double(key, value);
  else if (key == "tau_points") cfg.tau_points = parse_int(key, value);
  else if (key == "theta") cfg.theta = parse_double(key, value);
  else if (key == "theta_points") cfg.theta_points = parse_int(key, value);
  else if (key == "theta_from_covariance") cfg.theta_from_covariance = parse_bool(key, value);
  else if (key == "squeeze_margin") cfg.squeeze_margin = parse_double(key, value);
  else if (key == "atoms_per_point") cfg.atoms_per_point = parse_int(key, value);
  else if (key == "reset_mode") cfg.reset_mode = parse_reset_mode(key, value);
  else if (key == "reset_tau") cfg.reset_tau = parse_double(key, value);
  else if (key == "reset_cycle_cap") cfg.reset_cycle_cap = parse_int(key, value);
  else if (key == "reset_vacuum_threshold") cfg.reset_vacuum_threshold = parse_double(key, value);
  else if (key == "seed") cfg.seed = parse_u64(key, value);
  else if (key == "fig1_samples_per_interval") cfg.fig1_samples_per_interval = parse_int(key, value);
  else if (key == "fig1_fock_dim") cfg.fig1_fock_dim = parse_int(key, value);
  else if (key == "fig2_tau_max") cfg.fig2_tau_max = parse_double(key, value);
  else if (key == "fig2_tau_points") cfg.fig2_tau_points = parse_int(key, value);
  else if (key == "format") cfg.format = parse_format(key, value);
  else if (key == "out_dir") cfg.out_dir = value;
  else throw ConfigError("unknown config key '" + key + "'");
}

}  // namespace

const char* output_format_name(OutputFormat format) {
  return format == OutputFormat::Json ? "json" : "csv";
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig cfg;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ConfigError("config line " + std::to_string(line_no) + ": empty key or value");
    if (!seen.insert(key).second) throw ConfigError("duplicate config key '" + key + "'");
    apply_key(cfg, key, value);
  }
  validate_config(cfg);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

void validate_config(const ExperimentConfig& cfg) {
  if (!(cfg.omega0 > 0.0)) throw ConfigError("omega0 must be > 0");
  if (!(cfg.epsilon >= 0.0 && cfg.epsilon < 1.0)) throw ConfigError("epsilon must lie in [0, 1)");
  if (!(cfg.eta > 0.0)) throw ConfigError("eta must be > 0");
  if (!(cfg.omega0_per_mcs > 0.0)) throw ConfigError("omega0_per_mcs must be > 0");
  if (!(cfg.g >= 0.0)) throw ConfigError("g must be >= 0");
  if (!(cfg.generation_duration_mcs >= 0.0))
    throw ConfigError("generation_duration_mcs must be >= 0");
  if (cfg.fock_dim < 2) throw ConfigError("fock_dim must be at least 2");
  if (cfg.steps_per_drive_period < 50) throw ConfigError("steps_per_drive_period must be >= 50");
  if (!(cfg.unitarity_tol > 0.0)) throw ConfigError("unitarity_tol must be > 0");
  if (!(cfg.tail_threshold > 0.0)) throw ConfigError("tail_threshold must be > 0");
  if (!(cfg.tau_max > 0.0)) throw ConfigError("tau_max must be > 0");
  if (cfg.tau_points < 5) throw ConfigError("tau_points must be at least 5");
  if (cfg.theta_points < 16) throw ConfigError("theta_points must be at least 16");
  if (!(cfg.squeeze_margin >= 0.0)) throw ConfigError("squeeze_margin must be >= 0");
  if (cfg.atoms_per_point < 1) throw ConfigError("atoms_per_point must be >= 1");
  if (!(cfg.reset_tau >= 0.0)) throw ConfigError("reset_tau must be >= 0");
  if (cfg.reset_mode == ResetMode::AtomExtraction && !(cfg.reset_tau > 0.0))
    throw ConfigError("atom extraction needs reset_tau > 0");
  if (cfg.reset_cycle_cap < 1) throw ConfigError("reset_cycle_cap must be >= 1");
  if (!(cfg.reset_vacuum_threshold > 0.0 && cfg.reset_vacuum_threshold <= 1.0))
    throw ConfigError("reset_vacuum_threshold must lie in (0, 1]");
  if (cfg.fig1_samples_per_interval < 2)
    throw ConfigError("fig1_samples_per_interval must be at least 2");
  if (cfg.fig1_fock_dim != 0 && cfg.fig1_fock_dim < 2)
    throw ConfigError("fig1_fock_dim must be 0 (automatic) or at least 2");
  if (!(cfg.fig2_tau_max > 0.0)) throw ConfigError("fig2_tau_max must be > 0");
  if (cfg.fig2_tau_points < 5) throw ConfigError("fig2_tau_points must be at least 5");
  if (cfg.out_dir.empty()) throw ConfigError("out_dir must not be empty");
}

std::string resolved_config_text(const ExperimentConfig& cfg) {
  std::ostringstream out;
  out << "# resolved experiment configuration, artifact version " << kArtifactVersion << '\n';
  out << "omega0 = " << format_double(cfg.omega0) << '\n';
  out << "epsilon = " << format_double(cfg.epsilon) << '\n';
  out << "eta = " << format_double(cfg.eta) << '\n';
  out << "omega0_per_mcs = " << format_double(cfg.omega0_per_mcs) << '\n';
  out << "g = " << format_double(cfg.g) << '\n';
  out << "delta = " << format_double(cfg.delta) << '\n';
  out << "generation_duration_mcs = " << format_double(cfg.generation_duration_mcs) << '\n';
  out << "fock_dim = " << cfg.fock_dim << '\n';
  out << "steps_per_drive_period = " << cfg.steps_per_drive_period << '\n';
  out << "integrator = " << integrator_name(cfg.integrator) << '\n';
  out << "unitarity_tol = " << format_double(cfg.unitarity_tol) << '\n';
  out << "tail_threshold = " << format_double(cfg.tail_threshold) << '\n';
  out << "tau_max = " << format_double(cfg.tau_max) << '\n';
  out << "tau_points = " << cfg.tau_points << '\n';
  out << "theta = " << format_double(cfg.theta) << '\n';
  out << "theta_points = " << cfg.theta_points << '\n';
  out << "theta_from_covariance = " << (cfg.theta_from_covariance ? "true" : "false") << '\n';
  out << "squeeze_margin = " << format_double(cfg.squeeze_margin) << '\n';
  out << "atoms_per_point = " << cfg.atoms_per_point << '\n';
  out << "reset_mode = " << reset_mode_name(cfg.reset_mode) << '\n';
  out << "reset_tau = " << format_double(cfg.reset_tau) << '\n';
  out << "reset_cycle_cap = " << cfg.reset_cycle_cap << '\n';
  out << "reset_vacuum_threshold = " << format_double(cfg.reset_vacuum_threshold) << '\n';
  out << "seed = " << cfg.seed << '\n';
  out << "fig1_samples_per_interval = " << cfg.fig1_samples_per_interval << '\n';
  out << "fig1_fock_dim = " << cfg.fig1_fock_dim << '\n';
  out << "fig2_tau_max = " << format_double(cfg.fig2_tau_max) << '\n';
  out << "fig2_tau_points = " << cfg.fig2_tau_points << '\n';
  out << "format = " << output_format_name(cfg.format) << '\n';
  out << "out_dir = " << cfg.out_dir << '\n';
  return out.str();
}

DriveProfile drive_of(const ExperimentConfig& cfg) {
  DriveProfile drive;
  drive.omega0 = cfg.omega0;
  drive.epsilon = cfg.epsilon;
  drive.eta = cfg.eta;
  return drive;
}

AtomParams atom_of(const ExperimentConfig& cfg) { return make_atom(cfg.g, cfg.delta, drive_of(cfg)); }

PropagatorConfig propagator_of(const ExperimentConfig& cfg) {
  PropagatorConfig prop;
  prop.steps_per_drive_period = cfg.steps_per_drive_period;
  prop.method = cfg.integrator;
  prop.unitarity_tol = cfg.unitarity_tol;
  return for_drive(prop, drive_of(cfg));
}

StateTolerances tolerances_of(const ExperimentConfig& cfg) {
  StateTolerances tol;
  tol.tail = cfg.tail_threshold;
  return tol;
}

double internal_duration(const ExperimentConfig& cfg) {
  return cfg.generation_duration_mcs * cfg.omega0_per_mcs / cfg.omega0;
}

RunConfig run_config_of(const ExperimentConfig& cfg) {
  RunConfig run;
  run.drive = drive_of(cfg);
  run.atom = atom_of(cfg);
  run.prop = propagator_of(cfg);
  run.dim = cfg.fock_dim;
  run.generation_duration = internal_duration(cfg);
  run.tau = cfg.tau_max;
  run.atoms_per_point = cfg.atoms_per_point;
  run.reset_mode = cfg.reset_mode;
  run.seed = cfg.seed;
  run.reset_tau = cfg.reset_tau;
  run.reset_cycle_cap = cfg.reset_cycle_cap;
  run.reset_vacuum_threshold = cfg.reset_vacuum_threshold;
  return run;
}

}  // namespace dce
