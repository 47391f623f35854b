#include "dce/click_sim.hpp"

#include <cmath>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "dce/errors.hpp"
#include "dce/format.hpp"

namespace dce {

namespace {

// Unitary generation from a fixed start is deterministic, so the exact-vacuum
// path computes the prepared state once and clones it per repetition. The
// extraction path cannot: its start state is whatever the reset left behind.
FieldState generate_from(const FieldState& start, const RunConfig& cfg) {
  if (cfg.generation_duration <= 0.0) return start;
  const ModeOperatorSet ops = make_mode_operators(start.dim());
  const PropagatorConfig prop = for_drive(cfg.prop, cfg.drive);
  const FieldState lab = propagate(start, 0.0, cfg.generation_duration,
                                   field_hamiltonian_fn(cfg.drive, ops), prop);
  const StateCheck chk = lab.check({});
  if (chk.truncation_unsafe)
    throw TruncationError("generation pushed tail population to " +
                          format_short(chk.tail_population));
  return to_rotating_frame(lab, cfg.drive.omega0, cfg.generation_duration);
}

void header_line(std::ostream& out, const char* key, const std::string& value) {
  out << "# " << key << " = " << value << '\n';
}

}  // namespace

const char* reset_mode_name(ResetMode mode) {
  return mode == ResetMode::AtomExtraction ? "atom-extraction" : "exact-vacuum";
}

void validate_run_config(const RunConfig& cfg) {
  try {
    validate_drive(cfg.drive);
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
  if (cfg.dim < 2) throw ConfigError("run config: dim must be at least 2");
  if (!(cfg.generation_duration >= 0.0))
    throw ConfigError("run config: generation_duration must be >= 0");
  if (!(cfg.tau >= 0.0)) throw ConfigError("run config: tau must be >= 0");
  if (cfg.atoms_per_point < 1) throw ConfigError("run config: atoms_per_point must be >= 1");
  if (!(cfg.atom.g >= 0.0)) throw ConfigError("run config: coupling g must be >= 0");
  if (!(cfg.reset_tau >= 0.0)) throw ConfigError("run config: reset_tau must be >= 0");
  if (cfg.reset_mode == ResetMode::AtomExtraction && !(cfg.reset_tau > 0.0))
    throw ConfigError("run config: atom extraction needs reset_tau > 0");
  if (cfg.reset_cycle_cap < 1) throw ConfigError("run config: reset_cycle_cap must be >= 1");
  if (!(cfg.reset_vacuum_threshold > 0.0 && cfg.reset_vacuum_threshold <= 1.0))
    throw ConfigError("run config: reset_vacuum_threshold must lie in (0, 1]");
  if (cfg.prop.steps_per_drive_period < 50)
    throw ConfigError("run config: steps_per_drive_period must be >= 50");
  if (!(cfg.prop.unitarity_tol > 0.0)) throw ConfigError("run config: unitarity_tol must be > 0");
}

std::pair<AtomicOutcome, FieldState> sample_outcome(const FieldState& state, const KrausPair& pair,
                                                    PhiloxRng& rng) {
  const double p_ground = outcome_probability(state, pair, AtomicOutcome::Ground);
  const AtomicOutcome outcome =
      rng.bernoulli(p_ground) ? AtomicOutcome::Ground : AtomicOutcome::Excited;
  // the drawn branch has nonzero probability by construction; only exact zeros reject
  return {outcome, conditional_update(state, pair, outcome, 1e-300)};
}

ResetResult reset_cavity(const FieldState& state, const RunConfig& cfg, PhiloxRng& rng) {
  if (cfg.reset_mode == ResetMode::ExactVacuum) return {vacuum_state(state.dim()), 0};

  const KrausPair pair = jc_kraus(cfg.reset_tau, state.dim());
  FieldState current = state;
  for (int cycles = 0; cycles <= cfg.reset_cycle_cap; ++cycles) {
    if (current.level_population(0) > cfg.reset_vacuum_threshold) return {current, cycles};
    if (cycles == cfg.reset_cycle_cap) break;
    current = sample_outcome(current, pair, rng).second;
  }
  throw ResetError("cavity reset exhausted " + std::to_string(cfg.reset_cycle_cap) +
                   " extraction cycles, residual photon number " +
                   format_short(current.mean_n()));
}

ClickRecord run_protocol(const RunConfig& cfg, const std::vector<double>& tau_grid, double theta,
                         ScanVariant variant) {
  validate_run_config(cfg);
  if (tau_grid.empty()) throw std::invalid_argument("run_protocol: empty tau grid");
  for (double tau : tau_grid)
    if (!(tau >= 0.0)) throw std::invalid_argument("run_protocol: tau must be >= 0");

  const double theta_eff = (variant == ScanVariant::Plain1Atom) ? 0.0 : theta;
  const int atoms_per_rep = (variant == ScanVariant::Rotated2Atom) ? 2 : 1;

  ClickRecord record;
  record.config = cfg;
  record.variant = variant;
  record.theta = theta_eff;
  record.tau_grid = tau_grid;
  record.entries.reserve(tau_grid.size() * static_cast<std::size_t>(cfg.atoms_per_point) *
                         static_cast<std::size_t>(atoms_per_rep));
  record.summary.reserve(tau_grid.size());

  std::optional<FieldState> cloned_preparation;
  if (cfg.reset_mode == ResetMode::ExactVacuum)
    cloned_preparation =
        cfg.generation_duration > 0.0
            ? generate_dce_field(cfg.generation_duration, cfg.drive, cfg.prop, cfg.dim).rotating
            : vacuum_state(cfg.dim);

  FieldState chain = vacuum_state(cfg.dim);  // carries between repetitions when extracting
  for (std::size_t point = 0; point < tau_grid.size(); ++point) {
    const double tau = tau_grid[point];
    KrausPair pair = jc_kraus(tau, cfg.dim);
    if (variant != ScanVariant::Plain1Atom) pair = rotated_kraus(pair, theta_eff);

    PointSummary sum;
    sum.tau = tau;
    sum.theta = theta_eff;
    sum.repetitions = cfg.atoms_per_point;
    for (int rep = 0; rep < cfg.atoms_per_point; ++rep) {
      const std::uint64_t stream = (static_cast<std::uint64_t>(point) << 32) |
                                   static_cast<std::uint32_t>(rep);
      PhiloxRng rng(cfg.seed, stream);
      FieldState prepared = [&]() -> FieldState {
        if (cloned_preparation) return *cloned_preparation;
        return generate_from(reset_cavity(chain, cfg, rng).state, cfg);
      }();

      bool all_ground = true;
      for (int atom_index = 0; atom_index < atoms_per_rep; ++atom_index) {
        auto [outcome, post] = sample_outcome(prepared, pair, rng);
        record.entries.push_back({rep, tau, theta_eff, outcome, rng.digest()});
        all_ground = all_ground && outcome == AtomicOutcome::Ground;
        prepared = std::move(post);
      }
      if (all_ground) ++sum.successes;
      if (!cloned_preparation) chain = std::move(prepared);
    }
    record.summary.push_back(sum);
  }
  return record;
}

TauScan estimate_probabilities(const ClickRecord& record) {
  if (record.summary.empty()) throw std::invalid_argument("estimate_probabilities: empty record");

  TauScan scan;
  scan.variant = record.variant;
  scan.theta = record.theta;
  std::vector<double> err;
  for (const PointSummary& s : record.summary) {
    if (s.repetitions <= 0)
      throw std::invalid_argument("estimate_probabilities: point without repetitions");
    const double n = static_cast<double>(s.repetitions);
    const double p = static_cast<double>(s.successes) / n;
    double sigma = std::sqrt(p * (1.0 - p) / n);
    if (s.successes == 0 || s.successes == s.repetitions) {
      const double adjusted = (static_cast<double>(s.successes) + 1.0) / (n + 2.0);
      sigma = std::sqrt(adjusted * (1.0 - adjusted) / (n + 2.0));
    }
    scan.tau.push_back(s.tau);
    scan.prob.push_back(p);
    err.push_back(sigma);
  }
  scan.std_err = std::move(err);
  return scan;
}

void write_click_record(const ClickRecord& record, std::ostream& out) {
  const RunConfig& cfg = record.config;
  header_line(out, "click_record_version", kArtifactVersion);
  header_line(out, "variant", scan_variant_name(record.variant));
  header_line(out, "theta", format_double(record.theta));
  std::string grid;
  for (std::size_t i = 0; i < record.tau_grid.size(); ++i) {
    if (i) grid += ',';
    grid += format_double(record.tau_grid[i]);
  }
  header_line(out, "tau_grid", grid);
  header_line(out, "seed", std::to_string(cfg.seed));
  header_line(out, "atoms_per_point", std::to_string(cfg.atoms_per_point));
  header_line(out, "reset_mode", reset_mode_name(cfg.reset_mode));
  header_line(out, "dim", std::to_string(cfg.dim));
  header_line(out, "generation_duration", format_double(cfg.generation_duration));
  header_line(out, "tau", format_double(cfg.tau));
  header_line(out, "reset_tau", format_double(cfg.reset_tau));
  header_line(out, "reset_cycle_cap", std::to_string(cfg.reset_cycle_cap));
  header_line(out, "reset_vacuum_threshold", format_double(cfg.reset_vacuum_threshold));
  header_line(out, "drive.omega0", format_double(cfg.drive.omega0));
  header_line(out, "drive.epsilon", format_double(cfg.drive.epsilon));
  header_line(out, "drive.eta", format_double(cfg.drive.eta));
  header_line(out, "atom.omega_a", format_double(cfg.atom.omega_a));
  header_line(out, "atom.g", format_double(cfg.atom.g));
  header_line(out, "atom.delta", format_double(cfg.atom.delta));
  header_line(out, "prop.steps_per_drive_period", std::to_string(cfg.prop.steps_per_drive_period));
  header_line(out, "prop.integrator", integrator_name(cfg.prop.method));
  header_line(out, "prop.unitarity_tol", format_double(cfg.prop.unitarity_tol));
  if (cfg.pulse) {
    header_line(out, "pulse.rabi", format_double(cfg.pulse->rabi));
    header_line(out, "pulse.duration", format_double(cfg.pulse->duration));
    header_line(out, "pulse.omega_e", format_double(cfg.pulse->omega_e));
  }
  out << "cycle,tau,theta,outcome\n";
  for (const ClickEntry& entry : record.entries) {
    out << entry.cycle << ',' << format_double(entry.tau) << ',' << format_double(entry.theta)
        << ',' << (entry.outcome == AtomicOutcome::Ground ? 'g' : 'e') << '\n';
  }
}

std::string click_record_text(const ClickRecord& record) {
  std::ostringstream out;
  write_click_record(record, out);
  return out.str();
}

}  // namespace dce
