#include "dce/kraus.hpp"

#include <cmath>

namespace dce {

namespace {

constexpr Complex kImag{0.0, 1.0};

const Matrix& pick(const KrausPair& pair, AtomicOutcome outcome) {
  return outcome == AtomicOutcome::Ground ? pair.K_g : pair.K_e;
}

double clamp01(double p) { return p < 0.0 ? 0.0 : (p > 1.0 ? 1.0 : p); }

}  // namespace

KrausPair jc_kraus(double tau, Index dim) {
  if (dim < 2) throw std::invalid_argument("jc_kraus: dim must be >= 2");
  if (!(tau >= 0.0)) throw std::invalid_argument("jc_kraus: tau must be >= 0");
  KrausPair pair;
  pair.dim = dim;
  pair.tau = tau;
  pair.K_g = Matrix::Zero(dim, dim);
  pair.K_e = Matrix::Zero(dim, dim);
  for (Index n = 0; n < dim; ++n) {
    const double root = std::sqrt(double(n));
    pair.K_g(n, n) = std::cos(tau * root);
    if (n > 0) pair.K_e(n - 1, n) = -kImag * std::sin(tau * root);
  }
  return pair;
}

KrausPair rotated_kraus(const KrausPair& plain, double theta) {
  if (plain.rotated()) throw std::invalid_argument("rotated_kraus: pair is already rotated");
  const Complex ph = std::polar(1.0, theta);
  KrausPair out;
  out.dim = plain.dim;
  out.tau = plain.tau;
  out.theta = theta;
  out.K_g = (plain.K_g + plain.K_e / ph) / kSqrt2;
  out.K_e = (plain.K_e - plain.K_g * ph) / kSqrt2;
  return out;
}

Eigen::Matrix2cd external_rotation_unitary(double theta_pulse) {
  const Complex ph = std::polar(1.0, theta_pulse);
  Eigen::Matrix2cd A = Eigen::Matrix2cd::Zero();
  A(0, 1) = ph;         // sigma_- e^{+i theta}
  A(1, 0) = 1.0 / ph;   // sigma_+ e^{-i theta}
  return (Eigen::Matrix2cd::Identity() - kImag * A) / kSqrt2;
}

Matrix povm_element(const KrausPair& pair, AtomicOutcome outcome) {
  const Matrix& K = pick(pair, outcome);
  return K.adjoint() * K;
}

double outcome_probability(const FieldState& state, const KrausPair& pair,
                           AtomicOutcome outcome) {
  if (state.dim() != pair.dim)
    throw std::invalid_argument("outcome_probability: dimension mismatch");
  const Matrix& K = pick(pair, outcome);
  double p;
  if (state.is_pure())
    p = (K * state.vector()).squaredNorm();
  else
    p = (K * state.density_matrix() * K.adjoint()).trace().real();
  return clamp01(p);
}

FieldState conditional_update(const FieldState& state, const KrausPair& pair,
                              AtomicOutcome outcome, double probability_floor) {
  const double p = outcome_probability(state, pair, outcome);
  if (p < probability_floor)
    throw ImpossibleOutcomeError("conditional_update: outcome probability " + std::to_string(p) +
                                 " below floor");
  const Matrix& K = pick(pair, outcome);
  if (state.is_pure()) return FieldState::pure((K * state.vector()) / std::sqrt(p));
  return FieldState::density((K * state.density_matrix() * K.adjoint()) / p);
}

double two_atom_probability(const FieldState& state, const KrausPair& pair,
                            AtomicOutcome outcome) {
  if (state.dim() != pair.dim)
    throw std::invalid_argument("two_atom_probability: dimension mismatch");
  const Matrix& K = pick(pair, outcome);
  double p;
  if (state.is_pure())
    p = (K * (K * state.vector()).eval()).squaredNorm();
  else {
    const Matrix KK = K * K;
    p = (KK * state.density_matrix() * KK.adjoint()).trace().real();
  }
  return clamp01(p);
}

WeaknessRecord weakness_check(double tau, const FieldState& state) {
  WeaknessRecord rec;
  rec.product = tau * state.mean_n();
  rec.flagged = rec.product > rec.threshold;
  return rec;
}

PassageResult exact_atom_passage(const FieldState& field, const AtomParams& atom,
                                 const DriveProfile& drive, double t_int,
                                 const std::optional<ExternalPulse>& pulse,
                                 AtomicOutcome outcome, const PropagatorConfig& cfg, bool dce_on,
                                 double t_start) {
  if (!(t_int >= 0.0)) throw std::invalid_argument("exact_atom_passage: t_int must be >= 0");
  const Index dim = field.dim();
  const ModeOperatorSet ops = make_mode_operators(dim);
  const HamiltonianFn fn = joint_interaction_fn(drive, atom, ops, dce_on);
  const PropagatorConfig run_cfg = for_drive(cfg, drive);
  const Index block = outcome == AtomicOutcome::Ground ? 0 : 1;

  if (field.is_pure()) {
    Vector joint = Vector::Zero(2 * dim);
    joint.head(dim) = field.vector();  // atom enters in |g>
    const FieldState evolved =
        propagate(FieldState::pure(std::move(joint)), t_start, t_start + t_int, fn, run_cfg);
    Vector psi = evolved.vector();
    if (pulse) {
      const Eigen::Matrix2cd U = external_rotation_unitary(pulse->pulse_phase(atom));
      const Vector g = psi.head(dim), e = psi.tail(dim);
      psi.head(dim) = U(0, 0) * g + U(0, 1) * e;
      psi.tail(dim) = U(1, 0) * g + U(1, 1) * e;
    }
    const Vector part = psi.segment(block * dim, dim);
    const double p = part.squaredNorm();
    if (p < kProbabilityFloor)
      throw ImpossibleOutcomeError("exact_atom_passage: outcome probability below floor");
    return {clamp01(p), FieldState::pure(part / std::sqrt(p))};
  }

  Matrix joint = Matrix::Zero(2 * dim, 2 * dim);
  joint.topLeftCorner(dim, dim) = field.density_matrix();
  const FieldState evolved =
      propagate(FieldState::density(std::move(joint)), t_start, t_start + t_int, fn, run_cfg);
  Matrix rho = evolved.density_matrix();
  if (pulse) {
    const Eigen::Matrix2cd U2 = external_rotation_unitary(pulse->pulse_phase(atom));
    Matrix U = Matrix::Zero(2 * dim, 2 * dim);
    for (Index s = 0; s < 2; ++s)
      for (Index r = 0; r < 2; ++r)
        U.block(s * dim, r * dim, dim, dim) = U2(s, r) * Matrix::Identity(dim, dim);
    rho = U * rho * U.adjoint();
  }
  const Matrix part = rho.block(block * dim, block * dim, dim, dim);
  const double p = part.trace().real();
  if (p < kProbabilityFloor)
    throw ImpossibleOutcomeError("exact_atom_passage: outcome probability below floor");
  return {clamp01(p), FieldState::density(part / p)};
}

}  // namespace dce
