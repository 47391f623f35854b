#include "dce/dynamics.hpp"

#include <cmath>

#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

namespace dce {

namespace {

constexpr Complex kImag{0.0, 1.0};

// psi <- exp(c H) psi by Taylor summation; the step is split until |c| ||H|| is small
void exp_action(Vector& psi, const Matrix& H, Complex c) {
  const double hnorm = H.cwiseAbs().rowwise().sum().maxCoeff();
  const int pieces = std::max(1, int(std::ceil(std::abs(c) * hnorm / 0.5)));
  const Complex cs = c / double(pieces);
  Vector term(psi.size());
  for (int piece = 0; piece < pieces; ++piece) {
    term = psi;
    for (int k = 1; k <= 80; ++k) {
      term = (cs / double(k)) * (H * term).eval();
      psi += term;
      if (term.norm() <= 1e-16 * psi.norm()) break;
      if (k == 80) throw PropagationError("exp_action: Taylor series failed to converge");
    }
  }
}

Matrix step_unitary(const Matrix& H, Complex c) { return Matrix(c * H).exp(); }

struct StepPlan {
  int n_steps;
  double dt;
};

StepPlan plan_steps(double t0, double t1, const PropagatorConfig& cfg) {
  const double target = cfg.drive_period / double(cfg.steps_per_drive_period);
  const int n = std::max(1, int(std::ceil((t1 - t0) / target - 1e-12)));
  return {n, (t1 - t0) / double(n)};
}

// CF4 nodes and weights (two exponentials per step, fourth order)
constexpr double kCf4Node1 = 0.5 - 0.28867513459481287;  // 1/2 - sqrt(3)/6
constexpr double kCf4Node2 = 0.5 + 0.28867513459481287;
constexpr double kCf4W1 = 0.25 + 0.28867513459481287;  // 1/4 + sqrt(3)/6
constexpr double kCf4W2 = 0.25 - 0.28867513459481287;  // negative; the pair sums to 1/2

FieldState propagate_once(const FieldState& state, double t0, double t1, const HamiltonianFn& fn,
                          const PropagatorConfig& cfg) {
  const auto [n_steps, dt] = plan_steps(t0, t1, cfg);
  const Index dim = state.dim();
  Matrix H1(dim, dim), H2(dim, dim);

  const double initial = state.norm_or_trace();
  double worst_drift = 0.0;
  int worst_step = -1;
  auto track = [&](double value, int step) {
    const double drift = std::abs(value - initial);
    if (drift > worst_drift) {
      worst_drift = drift;
      worst_step = step;
    }
  };

  FieldState out = state;
  if (state.is_pure()) {
    Vector psi = state.vector();
    for (int k = 0; k < n_steps; ++k) {
      const double ta = t0 + k * dt;
      if (cfg.method == Integrator::MidpointExponential) {
        fn(ta + 0.5 * dt, H1);
        exp_action(psi, H1, -kImag * dt);
      } else {
        fn(ta + kCf4Node1 * dt, H1);
        fn(ta + kCf4Node2 * dt, H2);
        exp_action(psi, Matrix(kCf4W1 * H1 + kCf4W2 * H2), -kImag * dt);
        exp_action(psi, Matrix(kCf4W2 * H1 + kCf4W1 * H2), -kImag * dt);
      }
      track(psi.squaredNorm(), k);
    }
    out = FieldState::pure(std::move(psi));
  } else {
    Matrix rho = state.density_matrix();
    for (int k = 0; k < n_steps; ++k) {
      const double ta = t0 + k * dt;
      if (cfg.method == Integrator::MidpointExponential) {
        fn(ta + 0.5 * dt, H1);
        const Matrix U = step_unitary(H1, -kImag * dt);
        rho = U * rho * U.adjoint();
      } else {
        fn(ta + kCf4Node1 * dt, H1);
        fn(ta + kCf4Node2 * dt, H2);
        const Matrix Ua = step_unitary(Matrix(kCf4W1 * H1 + kCf4W2 * H2), -kImag * dt);
        const Matrix Ub = step_unitary(Matrix(kCf4W2 * H1 + kCf4W1 * H2), -kImag * dt);
        const Matrix U = Ub * Ua;
        rho = U * rho * U.adjoint();
      }
      track(rho.trace().real(), k);
    }
    out = FieldState::density(std::move(rho));
  }

  if (worst_drift > cfg.unitarity_tol)
    throw PropagationError("propagate: norm/trace drift " + std::to_string(worst_drift) +
                           " beyond tolerance at step " + std::to_string(worst_step) + " of " +
                           std::to_string(n_steps));
  return out;
}

}  // namespace

void validate_drive(const DriveProfile& drive) {
  if (!(drive.omega0 > 0.0)) throw std::invalid_argument("drive: omega0 must be > 0");
  if (!(drive.epsilon >= 0.0 && drive.epsilon < 1.0))
    throw std::invalid_argument("drive: epsilon must lie in [0, 1)");
  if (!(drive.eta > 0.0)) throw std::invalid_argument("drive: eta must be > 0");
}

AtomParams make_atom(double g, double delta, const DriveProfile& drive) {
  AtomParams atom;
  atom.g = g;
  atom.delta = delta;
  atom.omega_a = drive.omega0 + delta;
  return atom;
}

ExternalPulse ExternalPulse::for_pulse_phase(double theta_pulse, const AtomParams& atom,
                                             double duration) {
  ExternalPulse pulse;
  pulse.duration = duration;
  pulse.rabi = (kPi / 2.0) / duration;  // fixed pi/2 area
  pulse.omega_e = atom.omega_a + theta_pulse / duration;
  return pulse;
}

ExternalPulse ExternalPulse::for_measurement_angle(double theta, const AtomParams& atom,
                                                   double duration) {
  return for_pulse_phase(kPi / 2.0 - theta, atom, duration);
}

const char* integrator_name(Integrator method) {
  return method == Integrator::CommutatorFree4 ? "cf4" : "midpoint-exponential";
}

PropagatorConfig for_drive(PropagatorConfig cfg, const DriveProfile& drive) {
  cfg.drive_period = drive.period();
  return cfg;
}

double omega_F(double t, const DriveProfile& drive) {
  return drive.omega0 * (1.0 + drive.epsilon * std::sin(drive.eta * t));
}

double xi_of_t(double t, const DriveProfile& drive) {
  return drive.epsilon * drive.eta * std::cos(drive.eta * t) /
         (4.0 * (1.0 + drive.epsilon * std::sin(drive.eta * t)));
}

Matrix field_hamiltonian(double t, const DriveProfile& drive, const ModeOperatorSet& ops) {
  const Matrix sq = ops.a_dag * ops.a_dag - ops.a * ops.a;
  return omega_F(t, drive) * ops.n_hat + kImag * xi_of_t(t, drive) * sq;
}

HamiltonianFn field_hamiltonian_fn(const DriveProfile& drive, const ModeOperatorSet& ops) {
  const Matrix n_hat = ops.n_hat;
  const Matrix sq = ops.a_dag * ops.a_dag - ops.a * ops.a;
  return [drive, n_hat, sq](double t, Matrix& H) {
    H = kImag * xi_of_t(t, drive) * sq;
    H += omega_F(t, drive) * n_hat;
  };
}

Eigen::Matrix2cd sigma_z() {
  Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
  m(0, 0) = -1.0;
  m(1, 1) = 1.0;
  return m;
}

Eigen::Matrix2cd sigma_minus() {
  Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
  m(0, 1) = 1.0;  // |g><e|
  return m;
}

Eigen::Matrix2cd sigma_plus() {
  Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
  m(1, 0) = 1.0;
  return m;
}

Matrix joint_hamiltonian(double t, const DriveProfile& drive, const AtomParams& atom,
                         const ModeOperatorSet& ops, bool dce_on) {
  const Matrix id2 = Eigen::Matrix2cd::Identity();
  const Matrix idf = Matrix::Identity(ops.dim, ops.dim);
  Matrix hc = dce_on ? field_hamiltonian(t, drive, ops) : Matrix(drive.omega0 * ops.n_hat);
  Matrix H = Eigen::kroneckerProduct(id2, hc).eval();
  H += (atom.omega_a / 2.0) * Eigen::kroneckerProduct(Matrix(sigma_z()), idf).eval();
  H += atom.g * (Eigen::kroneckerProduct(Matrix(sigma_minus()), ops.a_dag).eval() +
                 Eigen::kroneckerProduct(Matrix(sigma_plus()), ops.a).eval());
  return H;
}

Matrix joint_hamiltonian_interaction(double t, const DriveProfile& drive, const AtomParams& atom,
                                     const ModeOperatorSet& ops, bool dce_on) {
  Matrix H(2 * ops.dim, 2 * ops.dim);
  joint_interaction_fn(drive, atom, ops, dce_on)(t, H);
  return H;
}

HamiltonianFn joint_interaction_fn(const DriveProfile& drive, const AtomParams& atom,
                                   const ModeOperatorSet& ops, bool dce_on) {
  const Matrix id2 = Eigen::Matrix2cd::Identity();
  const Matrix idf = Matrix::Identity(ops.dim, ops.dim);
  // static part: detuning plus the resonant JC coupling
  Matrix fixed = (atom.delta / 2.0) * Eigen::kroneckerProduct(Matrix(sigma_z()), idf).eval();
  fixed += atom.g * (Eigen::kroneckerProduct(Matrix(sigma_minus()), ops.a_dag).eval() +
                     Eigen::kroneckerProduct(Matrix(sigma_plus()), ops.a).eval());
  if (!dce_on) {
    return [fixed](double, Matrix& H) { H = fixed; };
  }
  const Matrix n_joint = Eigen::kroneckerProduct(id2, ops.n_hat).eval();
  const Matrix adag2 = Eigen::kroneckerProduct(id2, Matrix(ops.a_dag * ops.a_dag)).eval();
  const Matrix a2 = Eigen::kroneckerProduct(id2, Matrix(ops.a * ops.a)).eval();
  return [drive, fixed, n_joint, adag2, a2](double t, Matrix& H) {
    const Complex c = kImag * xi_of_t(t, drive) * std::polar(1.0, 2.0 * drive.omega0 * t);
    H = fixed;
    H += (omega_F(t, drive) - drive.omega0) * n_joint;
    H += c * adag2;
    H += std::conj(c) * a2;
  };
}

FieldState propagate(const FieldState& state, double t0, double t1, const HamiltonianFn& fn,
                     const PropagatorConfig& cfg) {
  if (cfg.steps_per_drive_period < 50)
    throw std::invalid_argument("propagate: steps_per_drive_period must be >= 50");
  if (!(cfg.drive_period > 0.0)) throw std::invalid_argument("propagate: drive_period must be > 0");
  if (!(t1 >= t0)) throw std::invalid_argument("propagate: t1 must be >= t0");
  if (t1 == t0) return state;

  FieldState out = propagate_once(state, t0, t1, fn, cfg);
  if (cfg.convergence_check) {
    PropagatorConfig fine = cfg;
    fine.convergence_check = false;
    fine.steps_per_drive_period *= 2;
    const FieldState ref = propagate_once(state, t0, t1, fn, fine);
    double gap = 0.0;
    if (out.is_pure() && ref.is_pure())
      gap = 1.0 - std::abs(ref.vector().dot(out.vector()));
    else
      gap = (out.to_density() - ref.to_density()).cwiseAbs().maxCoeff();
    if (gap > 10.0 * cfg.unitarity_tol)
      throw PropagationError("propagate: step-halving changes the result by " +
                             std::to_string(gap) + ", refine steps_per_drive_period");
  }
  return out;
}

GeneratedField generate_dce_field(double duration, const DriveProfile& drive,
                                  const PropagatorConfig& cfg, Index dim,
                                  const StateTolerances& tol) {
  validate_drive(drive);
  if (!(duration >= 0.0)) throw std::invalid_argument("generate_dce_field: duration must be >= 0");
  const ModeOperatorSet ops = make_mode_operators(dim);
  const PropagatorConfig run_cfg = for_drive(cfg, drive);
  const FieldState lab = propagate(vacuum_state(dim), 0.0, duration,
                                   field_hamiltonian_fn(drive, ops), run_cfg);
  const StateCheck chk = lab.check(tol);
  if (chk.truncation_unsafe)
    throw TruncationError("generate_dce_field: tail population " +
                          std::to_string(chk.tail_population) + " above threshold, raise dim");
  GeneratedField out{lab, to_rotating_frame(lab, drive.omega0, duration), {}, duration};
  out.fitted = fit_squeeze_from_covariance(out.rotating, ops).params;
  return out;
}

SqueezeParams rwa_squeeze_oracle(double t, const DriveProfile& drive) {
  validate_drive(drive);
  if (std::abs(drive.eta - 2.0 * drive.omega0) > 1e-12 * drive.omega0)
    throw std::invalid_argument("rwa_squeeze_oracle: requires eta = 2 omega0");
  return {drive.epsilon * drive.eta * t / 4.0, kPi};
}

Matrix rotating_frame_observable(const ModeOperatorSet& ops, double omega_ref, double t,
                                 const Matrix& base) {
  if (base.rows() != ops.dim || base.cols() != ops.dim)
    throw std::invalid_argument("rotating_frame_observable: dimension mismatch");
  Matrix out(ops.dim, ops.dim);
  for (Index m = 0; m < ops.dim; ++m)
    for (Index n = 0; n < ops.dim; ++n)
      out(m, n) = std::polar(1.0, omega_ref * t * double(m - n)) * base(m, n);
  return out;
}

FieldState to_rotating_frame(const FieldState& state, double omega_ref, double t) {
  const Index dim = state.dim();
  Vector phases(dim);
  for (Index n = 0; n < dim; ++n) phases(n) = std::polar(1.0, omega_ref * t * double(n));
  if (state.is_pure()) return FieldState::pure(phases.asDiagonal() * state.vector());
  return FieldState::density(phases.asDiagonal() * state.density_matrix() *
                             phases.conjugate().asDiagonal());
}

CovarianceFit fit_squeeze_from_covariance(const FieldState& state, const ModeOperatorSet& ops) {
  const Complex m1 = expectation(state, ops.a);
  const Complex m2 = expectation(state, Matrix(ops.a * ops.a));
  const double nbar = expectation(state, ops.n_hat).real();
  const Complex c = m2 - m1 * m1;
  const double base = nbar + 0.5 - std::norm(m1);

  CovarianceFit fit;
  double theta = 0.5 * std::arg(c);
  if (theta < 0.0) theta += kPi;  // Var Q has period pi in theta
  fit.theta_min = theta;
  fit.var_min = base - std::abs(c);
  fit.var_max = base + std::abs(c);
  fit.mean_Q_at_min = kSqrt2 * (m1 / std::polar(1.0, fit.theta_min)).imag();
  fit.params.r = fit.var_min > 0.0 ? -0.5 * std::log(2.0 * fit.var_min) : 0.0;
  double phi = 2.0 * fit.theta_min + kPi;
  while (phi >= 2.0 * kPi) phi -= 2.0 * kPi;
  while (phi < 0.0) phi += 2.0 * kPi;
  fit.params.phi = phi;
  return fit;
}

double mean_time_dispersion(const FieldState& state, const ModeOperatorSet& ops, double omega_ref,
                            QuadratureAxis axis, int samples) {
  if (!(omega_ref > 0.0))
    throw std::invalid_argument("mean_time_dispersion: omega_ref must be > 0");
  if (samples < 64) throw std::invalid_argument("mean_time_dispersion: need >= 64 samples");
  const Matrix& base = axis == QuadratureAxis::X ? ops.x : ops.p;
  const double period = 2.0 * kPi / omega_ref;
  double acc = 0.0;
  for (int k = 0; k < samples; ++k) {
    const double t = period * double(k) / double(samples);
    acc += variance(state, rotating_frame_observable(ops, omega_ref, t, base));
  }
  return acc / double(samples);
}

}  // namespace dce
