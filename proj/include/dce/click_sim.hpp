#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <utility>

#include "dce/estimators.hpp"
#include "dce/rng.hpp"

namespace dce {

// exact-vacuum is the simulation privilege; atom-extraction cleans the cavity
// with sampled strong-coupling passages
enum class ResetMode { ExactVacuum, AtomExtraction };

const char* reset_mode_name(ResetMode mode);  // "exact-vacuum" / "atom-extraction"

struct RunConfig {
  DriveProfile drive;
  AtomParams atom;
  PropagatorConfig prop;
  std::optional<ExternalPulse> pulse;  // recorded for provenance; angle set per run
  Index dim = 40;
  double generation_duration = 1000.0;  // internal time units
  double tau = 0.05;                    // reference measurement strength
  int atoms_per_point = 20000;
  ResetMode reset_mode = ResetMode::ExactVacuum;
  std::uint64_t seed = 0;
  // extraction passage strength; levels with reset_tau sqrt(n) = k pi are dark
  // (never excite the atom), so the default keeps (pi/reset_tau)^2 off the integers
  double reset_tau = 1.0;
  int reset_cycle_cap = 200;
  double reset_vacuum_threshold = 0.999;
};

void validate_run_config(const RunConfig& cfg);

struct ClickEntry {
  std::int64_t cycle = 0;  // repetition index within the grid point
  double tau = 0.0;
  double theta = 0.0;
  AtomicOutcome outcome = AtomicOutcome::Ground;
  std::uint64_t rng_digest = 0;  // stream position fingerprint after the draw
};

struct PointSummary {
  double tau = 0.0;
  double theta = 0.0;
  std::int64_t repetitions = 0;
  std::int64_t successes = 0;  // all-ground repetitions
};

struct ClickRecord {
  RunConfig config;
  ScanVariant variant = ScanVariant::Plain1Atom;
  double theta = 0.0;
  std::vector<double> tau_grid;
  std::vector<ClickEntry> entries;    // grid-point major, cycle minor, atom order inside
  std::vector<PointSummary> summary;  // one per grid point
};

// draws the outcome with its exact probability and collapses the state to match;
// deterministic given the rng position
std::pair<AtomicOutcome, FieldState> sample_outcome(const FieldState& state, const KrausPair& pair,
                                                    PhiloxRng& rng);

struct ResetResult {
  FieldState state;
  int cycles = 0;  // extraction passages spent
};

// exact-vacuum swaps in the vacuum; atom-extraction repeats sampled passages at
// cfg.reset_tau until the vacuum population exceeds cfg.reset_vacuum_threshold,
// throwing ResetError with the residual photon number once the cycle cap is hit
ResetResult reset_cavity(const FieldState& state, const RunConfig& cfg, PhiloxRng& rng);

// For each tau point, atoms_per_point repetitions of {reset, generate, measure}.
// One Bernoulli trial per repetition: success = every atom of the variant lands in
// the ground state. RNG stream ids are (point << 32) | repetition, so the record
// is bit-reproducible regardless of execution order.
ClickRecord run_protocol(const RunConfig& cfg, const std::vector<double>& tau_grid, double theta,
                         ScanVariant variant);

// frequency estimates with binomial standard errors sqrt(p(1-p)/n); degenerate
// all-or-nothing points take the add-one (Laplace) error so fit weights stay finite
TauScan estimate_probabilities(const ClickRecord& record);

// `# key = value` header with the full config, then one `cycle,tau,theta,outcome`
// line per atom in record order (outcome letters g/e)
void write_click_record(const ClickRecord& record, std::ostream& out);
std::string click_record_text(const ClickRecord& record);

}  // namespace dce
