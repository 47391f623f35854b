#pragma once

#include <optional>

#include "dce/dynamics.hpp"

namespace dce {

enum class AtomicOutcome { Ground, Excited };

inline constexpr double kProbabilityFloor = 1e-12;

// Measurement back-action pair for one ground-state atom crossing the cavity,
// tau = g * t_int:
//   K_g = cos(tau sqrt(n_hat)),  K_e = -i a sin(tau sqrt(n_hat))/sqrt(n_hat)
// K_e lowers the Fock index by one; K_g^dag K_g + K_e^dag K_e = 1 per level.
struct KrausPair {
  Index dim = 0;
  double tau = 0.0;
  std::optional<double> theta;  // set once the pi/2 pulse has been mixed in
  Matrix K_g;
  Matrix K_e;
  bool rotated() const { return theta.has_value(); }
};

KrausPair jc_kraus(double tau, Index dim);

// Mixes the outcomes with the pi/2 pulse:
//   K~_g = (K_g + e^{-i theta} K_e)/sqrt(2),  K~_e = (K_e - e^{i theta} K_g)/sqrt(2)
// The mixing matrix is unitary, so completeness survives exactly; the pair equals
// conjugation by external_rotation_unitary at pulse phase pi/2 - theta.
KrausPair rotated_kraus(const KrausPair& plain, double theta);

// U = exp[-i (pi/4) (sigma_- e^{i theta_pulse} + sigma_+ e^{-i theta_pulse})],
// closed form (pi/2 pulse area): (1 - i A)/sqrt(2) with A^2 = 1
Eigen::Matrix2cd external_rotation_unitary(double theta_pulse);

Matrix povm_element(const KrausPair& pair, AtomicOutcome outcome);

// clamped to [0, 1]; deviations beyond 1e-12 indicate an invalid state
double outcome_probability(const FieldState& state, const KrausPair& pair, AtomicOutcome outcome);

FieldState conditional_update(const FieldState& state, const KrausPair& pair,
                              AtomicOutcome outcome, double probability_floor = kProbabilityFloor);

// P(r, r) for two identical atoms back to back: <(K_r^2)^dag K_r^2>
double two_atom_probability(const FieldState& state, const KrausPair& pair, AtomicOutcome outcome);

struct WeaknessRecord {
  double product = 0.0;  // tau * <n>
  double threshold = 0.1;
  bool flagged = false;
};

WeaknessRecord weakness_check(double tau, const FieldState& state);

struct PassageResult {
  double probability = 0.0;
  FieldState state;  // conditional field state, interaction picture
};

// Joint-evolution reference for one atom passage, in the interaction picture with
// respect to omega0 (n_hat + sigma_z/2), where the Kraus pair is exact for
// delta = 0 and dce_on = false. t_start fixes the drive phase when dce_on is true;
// the optional pulse rotates the atom after the transit, before projection.
PassageResult exact_atom_passage(const FieldState& field, const AtomParams& atom,
                                 const DriveProfile& drive, double t_int,
                                 const std::optional<ExternalPulse>& pulse, AtomicOutcome outcome,
                                 const PropagatorConfig& cfg, bool dce_on, double t_start = 0.0);

}  // namespace dce
