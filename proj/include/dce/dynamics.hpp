#pragma once

#include <functional>

#include "dce/fock.hpp"

namespace dce {

inline constexpr double kPi = 3.141592653589793;

// ---- drive and atom parameters ----

// omega_F(t) = omega0 (1 + epsilon sin(eta t)); parametric resonance sits at eta = 2 omega0.
// Internal units fix omega0 = 1; one millisecond-scale unit ("mcs") is omega0_per_mcs/omega0.
struct DriveProfile {
  double omega0 = 1.0;
  double epsilon = 1e-3;  // 0 <= epsilon < 1
  double eta = 2.0;
  double period() const { return 2.0 * kPi / eta; }
};

void validate_drive(const DriveProfile& drive);

struct AtomParams {
  double omega_a = 1.0;  // transition frequency
  double g = 5e-4;       // JC coupling
  double delta = 0.0;    // omega_a - omega0
};

// keeps delta = omega_a - omega0 consistent by construction
AtomParams make_atom(double g, double delta, const DriveProfile& drive);

// Classical pulse driving the atom after the cavity transit. The pulse phase
// theta_pulse = (omega_e - omega_a) * duration; measurement angle theta maps to
// theta_pulse = pi/2 - theta (see rotated_kraus).
struct ExternalPulse {
  double rabi = kPi / 2.0;  // Omega
  double duration = 1.0;    // T
  double omega_e = 1.0;
  double area() const { return rabi * duration; }
  double pulse_phase(const AtomParams& atom) const { return (omega_e - atom.omega_a) * duration; }
  static ExternalPulse for_pulse_phase(double theta_pulse, const AtomParams& atom,
                                       double duration = 1.0);
  static ExternalPulse for_measurement_angle(double theta, const AtomParams& atom,
                                             double duration = 1.0);
};

// ---- propagation ----

enum class Integrator { MidpointExponential, CommutatorFree4 };

const char* integrator_name(Integrator method);  // "midpoint-exponential" / "cf4"

struct PropagatorConfig {
  int steps_per_drive_period = 200;  // >= 50
  Integrator method = Integrator::MidpointExponential;
  double unitarity_tol = 1e-8;
  bool convergence_check = false;  // rerun at half step, compare within 10x tol
  double drive_period = kPi;       // sets the step size together with steps_per_drive_period
};

PropagatorConfig for_drive(PropagatorConfig cfg, const DriveProfile& drive);

// fills H(t) in place; the matrix arrives sized and may hold the previous step
using HamiltonianFn = std::function<void(double, Matrix&)>;

double omega_F(double t, const DriveProfile& drive);

// xi(t) = epsilon eta cos(eta t) / (4 (1 + epsilon sin(eta t)))
double xi_of_t(double t, const DriveProfile& drive);

// H_C(t) = omega_F(t) n_hat + i xi(t) (a^dag^2 - a^2)
Matrix field_hamiltonian(double t, const DriveProfile& drive, const ModeOperatorSet& ops);
HamiltonianFn field_hamiltonian_fn(const DriveProfile& drive, const ModeOperatorSet& ops);

// ---- joint atom (x) field space ----
// basis index s*dim + n with s = 0 ground, s = 1 excited

Eigen::Matrix2cd sigma_z();
Eigen::Matrix2cd sigma_minus();
Eigen::Matrix2cd sigma_plus();

// H = H_C(t) + (omega_a/2) sigma_z + g (a^dag sigma_- + a sigma_+);
// dce_on = false freezes H_C to omega0 n_hat
Matrix joint_hamiltonian(double t, const DriveProfile& drive, const AtomParams& atom,
                         const ModeOperatorSet& ops, bool dce_on);

// same physics in the frame rotating at omega0 (n_hat + sigma_z/2): the JC coupling
// is static there and the squeeze terms carry explicit e^{+-2i omega0 t} phases
Matrix joint_hamiltonian_interaction(double t, const DriveProfile& drive, const AtomParams& atom,
                                     const ModeOperatorSet& ops, bool dce_on);
HamiltonianFn joint_interaction_fn(const DriveProfile& drive, const AtomParams& atom,
                                   const ModeOperatorSet& ops, bool dce_on);

// exact exponential of the midpoint (or CF4 two-node) Hamiltonian per step;
// norm/trace drift beyond cfg.unitarity_tol raises PropagationError
FieldState propagate(const FieldState& state, double t0, double t1, const HamiltonianFn& fn,
                     const PropagatorConfig& cfg);

// ---- field generation and frames ----

struct GeneratedField {
  FieldState lab;       // Schroedinger-picture state at t = duration
  FieldState rotating;  // same state in the frame rotating at omega0
  SqueezeParams fitted;  // effective squeezing read off the rotating-frame covariance
  double duration = 0.0;
};

GeneratedField generate_dce_field(double duration, const DriveProfile& drive,
                                  const PropagatorConfig& cfg, Index dim,
                                  const StateTolerances& tol = {});

// RWA benchmark r(t) = epsilon eta t / 4 with drive phase phi = pi;
// valid only on resonance (eta = 2 omega0), for validation rather than production
SqueezeParams rwa_squeeze_oracle(double t, const DriveProfile& drive);

// U0 = exp(-i omega_ref n_hat t); returns U0^dag M U0
Matrix rotating_frame_observable(const ModeOperatorSet& ops, double omega_ref, double t,
                                 const Matrix& base);

// psi -> exp(+i omega_ref n_hat t) psi (inverse free evolution)
FieldState to_rotating_frame(const FieldState& state, double omega_ref, double t);

struct CovarianceFit {
  double theta_min = 0.0;  // argmin over theta of Var Q(theta), in [0, pi)
  double var_min = 0.0;
  double var_max = 0.0;
  double mean_Q_at_min = 0.0;
  SqueezeParams params;  // r from var_min, phi = 2 theta_min + pi
};

CovarianceFit fit_squeeze_from_covariance(const FieldState& state, const ModeOperatorSet& ops);

enum class QuadratureAxis { X, P };

// average of Var of the freely rotating quadrature over one period, >= 64 samples
double mean_time_dispersion(const FieldState& state, const ModeOperatorSet& ops,
                            double omega_ref, QuadratureAxis axis, int samples = 64);

}  // namespace dce
