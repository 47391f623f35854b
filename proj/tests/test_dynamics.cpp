// Drive profile, propagators and frame changes. Oracles:
//   - xi(t) = eps*eta*cos(eta t)/(4(1 + eps*sin(eta t))) evaluated by hand at t = 0
//   - static Hamiltonians evolve as exact phase factors, for either integrator
//   - resonant parametric drive (eta = 2 omega0) builds squeezing r = eps*eta*t/4
//     along phi = pi, so after 1000/omega0 units at eps = 1e-3: r = 0.5
//   - a freely rotating squeezed state time-averages its dispersion to
//     cosh(2r)/2 = sinh^2 r + 1/2 over one period
//   - resonant Jaynes-Cummings transfer: P(g,1 -> g,1) = cos^2(g t)
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>

#include "dce/dynamics.hpp"

using namespace dce;

namespace {

constexpr double kSinh2Half = 0.2715403174076219;  // sinh^2(0.5)

double state_distance(const FieldState& a, const FieldState& b) {
  return (a.vector() - b.vector()).norm();
}

}  // namespace

TEST_CASE("drive profile and modulation coefficient") {
  DriveProfile drive;  // omega0 = 1, eps = 1e-3, eta = 2
  CHECK(drive.period() == doctest::Approx(kPi).epsilon(1e-15));
  CHECK(omega_F(0.0, drive) == doctest::Approx(1.0).epsilon(1e-15));
  // peak of the frequency modulation sits a quarter period in
  CHECK(omega_F(kPi / 4.0, drive) == doctest::Approx(1.0 + 1e-3).epsilon(1e-12));
  CHECK(xi_of_t(0.0, drive) == doctest::Approx(1e-3 * 2.0 / 4.0).epsilon(1e-15));
  // cos(eta t) = 0 kills the squeeze term
  CHECK(std::abs(xi_of_t(kPi / 4.0, drive)) < 1e-15);

  DriveProfile bad = drive;
  bad.epsilon = 1.0;
  CHECK_THROWS_AS(validate_drive(bad), std::invalid_argument);
  bad = drive;
  bad.eta = 0.0;
  CHECK_THROWS_AS(validate_drive(bad), std::invalid_argument);
  bad = drive;
  bad.omega0 = -1.0;
  CHECK_THROWS_AS(validate_drive(bad), std::invalid_argument);
}

TEST_CASE("field Hamiltonian is Hermitian with the expected blocks") {
  DriveProfile drive;
  drive.epsilon = 0.2;
  const ModeOperatorSet ops = make_mode_operators(10);
  for (double t : {0.0, 0.3, 1.7}) {
    const Matrix h = field_hamiltonian(t, drive, ops);
    CHECK((h - h.adjoint()).cwiseAbs().maxCoeff() < 1e-13);
    // diagonal carries omega_F(t) n
    CHECK(h(3, 3).real() == doctest::Approx(3.0 * omega_F(t, drive)).epsilon(1e-13));
    // squeeze term only connects n to n +- 2
    CHECK(std::abs(h(0, 1)) < 1e-15);
    CHECK(std::abs(h(0, 2) - Complex(0.0, -xi_of_t(t, drive) * kSqrt2)) < 1e-13);
  }
  // the closure fills the same matrix
  const HamiltonianFn fn = field_hamiltonian_fn(drive, ops);
  Matrix h(10, 10);
  fn(0.3, h);
  CHECK((h - field_hamiltonian(0.3, drive, ops)).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("static Hamiltonian propagates as exact phases for both integrators") {
  const Index dim = 8;
  const ModeOperatorSet ops = make_mode_operators(dim);
  Vector psi = Vector::Zero(dim);
  psi[0] = std::sqrt(0.5);
  psi[1] = 0.5;
  psi[3] = 0.5;
  const HamiltonianFn fn = [&](double, Matrix& h) { h = ops.n_hat; };

  for (Integrator method : {Integrator::MidpointExponential, Integrator::CommutatorFree4}) {
    PropagatorConfig cfg;
    cfg.method = method;
    cfg.drive_period = kPi;
    const double t = 2.0;
    const FieldState out = propagate(FieldState::pure(psi), 0.0, t, fn, cfg);
    Vector expect = psi;
    for (Index n = 0; n < dim; ++n) expect[n] *= std::polar(1.0, -double(n) * t);
    CHECK((out.vector() - expect).norm() < 1e-12);
  }
  CHECK(std::string(integrator_name(Integrator::MidpointExponential)) == "midpoint-exponential");
  CHECK(std::string(integrator_name(Integrator::CommutatorFree4)) == "cf4");
}

TEST_CASE("propagate rejects bad arguments and non-unitary generators") {
  const FieldState vac = vacuum_state(6);
  const HamiltonianFn ok = [](double, Matrix& h) { h = Matrix::Identity(6, 6); };
  PropagatorConfig cfg;
  cfg.drive_period = kPi;

  PropagatorConfig bad = cfg;
  bad.steps_per_drive_period = 10;
  CHECK_THROWS_AS(propagate(vac, 0.0, 1.0, ok, bad), std::invalid_argument);
  bad = cfg;
  bad.drive_period = 0.0;
  CHECK_THROWS_AS(propagate(vac, 0.0, 1.0, ok, bad), std::invalid_argument);
  CHECK_THROWS_AS(propagate(vac, 1.0, 0.0, ok, cfg), std::invalid_argument);

  // anti-Hermitian generator blows the norm up and must be caught
  const HamiltonianFn grow = [](double, Matrix& h) {
    h = Complex(0.0, 1.0) * Matrix::Identity(6, 6);
  };
  CHECK_THROWS_AS(propagate(vac, 0.0, 1.0, grow, cfg), PropagationError);
}

TEST_CASE("convergence orders: midpoint is second order, cf4 fourth") {
  // strong modulation so the time dependence, not the static part, sets the error
  DriveProfile drive;
  drive.epsilon = 0.3;
  const Index dim = 16;
  const ModeOperatorSet ops = make_mode_operators(dim);
  const HamiltonianFn fn = field_hamiltonian_fn(drive, ops);
  const FieldState start = vacuum_state(dim);
  const double t1 = 3.0 * kPi;

  PropagatorConfig ref_cfg;
  ref_cfg.method = Integrator::CommutatorFree4;
  ref_cfg.steps_per_drive_period = 3200;
  ref_cfg.drive_period = kPi;
  const FieldState ref = propagate(start, 0.0, t1, fn, ref_cfg);

  const auto error_at = [&](Integrator method, int steps) {
    PropagatorConfig cfg;
    cfg.method = method;
    cfg.steps_per_drive_period = steps;
    cfg.drive_period = kPi;
    return state_distance(propagate(start, 0.0, t1, fn, cfg), ref);
  };

  const double mid_coarse = error_at(Integrator::MidpointExponential, 50);
  const double mid_fine = error_at(Integrator::MidpointExponential, 100);
  CAPTURE(mid_coarse);
  CAPTURE(mid_fine);
  CHECK(mid_coarse / mid_fine > 3.0);   // h^2 scaling: ratio ~ 4
  CHECK(mid_coarse / mid_fine < 5.5);

  const double cf4_coarse = error_at(Integrator::CommutatorFree4, 50);
  const double cf4_fine = error_at(Integrator::CommutatorFree4, 100);
  CAPTURE(cf4_coarse);
  CAPTURE(cf4_fine);
  CHECK(cf4_coarse / cf4_fine > 10.0);  // h^4 scaling: ratio ~ 16
  CHECK(cf4_coarse / cf4_fine < 40.0);
  // fourth order also wins outright at matched step count
  CHECK(cf4_coarse < mid_coarse / 10.0);
}

TEST_CASE("convergence check accepts a well-resolved evolution") {
  DriveProfile drive;
  const ModeOperatorSet ops = make_mode_operators(10);
  const HamiltonianFn fn = field_hamiltonian_fn(drive, ops);
  PropagatorConfig cfg = for_drive({}, drive);
  cfg.convergence_check = true;
  CHECK_NOTHROW(propagate(vacuum_state(10), 0.0, 5.0, fn, cfg));
  CHECK(for_drive({}, drive).drive_period == doctest::Approx(kPi).epsilon(1e-15));
}

TEST_CASE("rotating frame maps undo free evolution") {
  const Index dim = 8;
  const ModeOperatorSet ops = make_mode_operators(dim);
  Vector psi = Vector::Zero(dim);
  psi[0] = psi[2] = std::sqrt(0.5);
  const FieldState start = FieldState::pure(psi);

  const HamiltonianFn free_fn = [&](double, Matrix& h) { h = ops.n_hat; };
  PropagatorConfig cfg;
  cfg.drive_period = kPi;
  const double t = 1.7;
  const FieldState lab = propagate(start, 0.0, t, free_fn, cfg);
  CHECK(state_distance(to_rotating_frame(lab, 1.0, t), start) < 1e-12);

  // conjugated observable: x rotates into x cos(wt) + p sin(wt)
  const double wt = 0.9;
  const Matrix got = rotating_frame_observable(ops, 1.0, wt, ops.x);
  const Matrix expect = std::cos(wt) * ops.x + std::sin(wt) * ops.p;
  CHECK((got - expect).cwiseAbs().maxCoeff() < 1e-13);
}

TEST_CASE("resonant drive builds the analytic squeezing after one unit span") {
  DriveProfile drive;  // eps = 1e-3, eta = 2: r(t) = eps*eta*t/4 = 0.5 at t = 1000
  const SqueezeParams oracle = rwa_squeeze_oracle(1000.0, drive);
  CHECK(oracle.r == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(oracle.phi == doctest::Approx(kPi).epsilon(1e-15));
  DriveProfile off = drive;
  off.eta = 1.9;
  CHECK_THROWS_AS(rwa_squeeze_oracle(1000.0, off), std::invalid_argument);

  const GeneratedField gen = generate_dce_field(1000.0, drive, for_drive({}, drive), 40);
  CHECK(gen.duration == 1000.0);
  CHECK(std::abs(gen.fitted.r - 0.5) < 0.005);
  // squeezed axis sits at theta = 0 modulo the [0, pi) wrap
  const double theta = std::fmod(gen.fitted.phi - kPi, 2.0 * kPi) / 2.0;
  const double axis_dist = std::min(std::abs(theta), std::abs(kPi - std::abs(theta)));
  CHECK(axis_dist < 0.01);
  CHECK(gen.rotating.mean_n() == doctest::Approx(kSinh2Half).epsilon(0.01));
  // lab and rotating frames agree on populations
  CHECK(gen.lab.mean_n() == doctest::Approx(gen.rotating.mean_n()).epsilon(1e-12));

  CHECK_THROWS_AS(generate_dce_field(-1.0, drive, for_drive({}, drive), 40),
                  std::invalid_argument);
}

TEST_CASE("covariance fit recovers the parameters of a known squeezed state") {
  const Index dim = 40;
  const ModeOperatorSet ops = make_mode_operators(dim);
  const FieldState sq = squeezed_vacuum({0.5, kPi}, dim);  // phi = pi squeezes p
  const CovarianceFit fit = fit_squeeze_from_covariance(sq, ops);
  CHECK(fit.params.r == doctest::Approx(0.5).epsilon(1e-8));
  CHECK(fit.var_min == doctest::Approx(0.18393972058572117).epsilon(1e-9));  // e^{-1}/2
  CHECK(fit.var_max == doctest::Approx(1.3591409142295225).epsilon(1e-9));   // e^{+1}/2
  const double axis_dist = std::min(fit.theta_min, kPi - fit.theta_min);
  CHECK(axis_dist < 1e-6);  // p-axis is theta = 0
  CHECK(std::abs(fit.mean_Q_at_min) < 1e-10);
}

TEST_CASE("time-averaged dispersion of a rotating squeezed state") {
  const Index dim = 40;
  const ModeOperatorSet ops = make_mode_operators(dim);
  // uniform sampling over one period cancels the cos(2wt) beat exactly, leaving
  // cosh(2r)/2 = sinh^2 r + 1/2
  const FieldState sq = squeezed_vacuum({0.5, kPi}, dim);
  CHECK(mean_time_dispersion(sq, ops, 1.0, QuadratureAxis::X) ==
        doctest::Approx(0.7715403174076219).epsilon(1e-9));
  CHECK(mean_time_dispersion(sq, ops, 1.0, QuadratureAxis::P) ==
        doctest::Approx(0.7715403174076219).epsilon(1e-9));
  // a thermal state is rotation invariant: the average equals nbar + 1/2 ... here 0.8
  const FieldState th = thermal_state(0.3, dim);
  CHECK(mean_time_dispersion(th, ops, 1.0, QuadratureAxis::X) ==
        doctest::Approx(0.8).epsilon(1e-9));
  CHECK_THROWS_AS(mean_time_dispersion(sq, ops, 0.0, QuadratureAxis::X), std::invalid_argument);
  CHECK_THROWS_AS(mean_time_dispersion(sq, ops, 1.0, QuadratureAxis::X, 10),
                  std::invalid_argument);
}

TEST_CASE("resonant Jaynes-Cummings transfer follows cos^2(g t)") {
  const Index dim = 6;
  const ModeOperatorSet ops = make_mode_operators(dim);
  DriveProfile drive;
  const AtomParams atom = make_atom(5e-4, 0.0, drive);
  CHECK(atom.omega_a == doctest::Approx(1.0).epsilon(1e-15));

  // interaction picture, drive off: H = g (a^dag sigma_- + a sigma_+), static
  const HamiltonianFn fn = joint_interaction_fn(drive, atom, ops, false);
  Vector joint = Vector::Zero(2 * dim);
  joint[1] = 1.0;  // |g, 1>
  const double gt = 0.3;
  PropagatorConfig cfg = for_drive({}, drive);
  const Vector out =
      propagate(FieldState::pure(joint), 0.0, gt / atom.g, fn, cfg).vector();
  CHECK(std::norm(out[1]) == doctest::Approx(std::cos(gt) * std::cos(gt)).epsilon(1e-8));
  CHECK(std::norm(out[dim + 0]) ==
        doctest::Approx(std::sin(gt) * std::sin(gt)).epsilon(1e-8));

  // lab-frame generator is Hermitian and block-structured the same way
  const Matrix h = joint_hamiltonian(0.2, drive, atom, ops, true);
  CHECK((h - h.adjoint()).cwiseAbs().maxCoeff() < 1e-13);
  CHECK(std::abs(h(0, dim + 0)) < 1e-15);  // |g,0> couples only to |e,...> via a sigma_+
}

TEST_CASE("external pulse phase bookkeeping") {
  DriveProfile drive;
  const AtomParams atom = make_atom(5e-4, 0.0, drive);
  const ExternalPulse p = ExternalPulse::for_measurement_angle(0.3, atom);
  CHECK(p.pulse_phase(atom) == doctest::Approx(kPi / 2.0 - 0.3).epsilon(1e-12));
  CHECK(p.area() == doctest::Approx(kPi / 2.0).epsilon(1e-15));
  const ExternalPulse q = ExternalPulse::for_pulse_phase(1.1, atom);
  CHECK(q.pulse_phase(atom) == doctest::Approx(1.1).epsilon(1e-12));
}
