#include "dce/fock.hpp"

#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

namespace dce {

namespace {

constexpr Complex kI{0.0, 1.0};

Index tail_start(Index dim, double top_fraction) {
  Index count = static_cast<Index>(std::ceil(double(dim) * top_fraction));
  if (count < 1) count = 1;
  if (count > dim) count = dim;
  return dim - count;
}

}  // namespace

// ---- FieldState ----

FieldState FieldState::pure(Vector psi) {
  if (psi.size() < 2) throw std::invalid_argument("FieldState::pure: dim must be >= 2");
  FieldState s;
  s.dim_ = psi.size();
  s.psi_ = std::move(psi);
  return s;
}

FieldState FieldState::density(Matrix rho) {
  if (rho.rows() < 2 || rho.rows() != rho.cols())
    throw std::invalid_argument("FieldState::density: need a square matrix with dim >= 2");
  FieldState s;
  s.dim_ = rho.rows();
  s.rho_ = std::move(rho);
  return s;
}

const Vector& FieldState::vector() const {
  if (!psi_) throw std::logic_error("FieldState::vector: state is mixed");
  return *psi_;
}

const Matrix& FieldState::density_matrix() const {
  if (!rho_) throw std::logic_error("FieldState::density_matrix: state is pure");
  return *rho_;
}

Matrix FieldState::to_density() const {
  if (psi_) return (*psi_) * psi_->adjoint();
  return *rho_;
}

double FieldState::norm_or_trace() const {
  if (psi_) return psi_->squaredNorm();
  return rho_->trace().real();
}

double FieldState::purity() const {
  if (psi_) return 1.0;
  const double tr = rho_->trace().real();
  return (*rho_ * *rho_).trace().real() / (tr * tr);
}

double FieldState::mean_n() const {
  double total = 0.0;
  for (Index n = 0; n < dim_; ++n) total += double(n) * level_population(n);
  return total;
}

double FieldState::level_population(Index n) const {
  if (n < 0 || n >= dim_) throw std::out_of_range("FieldState::level_population");
  if (psi_) return std::norm((*psi_)(n));
  return (*rho_)(n, n).real();
}

double FieldState::tail_population(double top_fraction) const {
  double total = 0.0;
  for (Index n = tail_start(dim_, top_fraction); n < dim_; ++n) total += level_population(n);
  return total;
}

StateCheck FieldState::check(const StateTolerances& tol) const {
  StateCheck out;
  out.norm_error = std::abs(norm_or_trace() - 1.0);
  out.tail_population = tail_population(tol.tail_fraction);
  out.truncation_unsafe = out.tail_population > tol.tail;
  if (psi_) {
    out.min_eigenvalue = 0.0;
  } else {
    out.hermiticity_error = (*rho_ - rho_->adjoint()).cwiseAbs().maxCoeff();
    Eigen::SelfAdjointEigenSolver<Matrix> es((*rho_ + rho_->adjoint()) / 2.0);
    out.min_eigenvalue = es.eigenvalues().minCoeff();
  }
  out.valid = out.norm_error <= tol.unit_norm && out.hermiticity_error <= tol.hermiticity &&
              out.min_eigenvalue >= tol.eigen_floor;
  if (!out.valid) out.detail = "state fails norm/hermiticity/positivity tolerances";
  else if (out.truncation_unsafe) out.detail = "tail population above threshold";
  return out;
}

// ---- operators ----

ModeOperatorSet make_mode_operators(Index dim) {
  if (dim < 2) throw std::invalid_argument("make_mode_operators: dim must be >= 2");
  ModeOperatorSet ops;
  ops.dim = dim;
  ops.a = Matrix::Zero(dim, dim);
  for (Index n = 1; n < dim; ++n) ops.a(n - 1, n) = std::sqrt(double(n));
  ops.a_dag = ops.a.adjoint();
  ops.n_hat = Matrix::Zero(dim, dim);
  for (Index n = 0; n < dim; ++n) ops.n_hat(n, n) = double(n);
  ops.x = (ops.a + ops.a_dag) / kSqrt2;
  ops.p = (ops.a - ops.a_dag) / (kSqrt2 * kI);
  return ops;
}

Matrix quadrature_Q(const ModeOperatorSet& ops, double theta) {
  const Complex ph = std::polar(1.0, theta);
  return (ops.a / ph - ops.a_dag * ph) / (kSqrt2 * kI);
}

FieldState vacuum_state(Index dim) { return fock_state(dim, 0); }

FieldState fock_state(Index dim, Index n) {
  if (dim < 2) throw std::invalid_argument("fock_state: dim must be >= 2");
  if (n < 0 || n >= dim) throw std::out_of_range("fock_state: level outside basis");
  Vector psi = Vector::Zero(dim);
  psi(n) = 1.0;
  return FieldState::pure(std::move(psi));
}

Matrix squeeze_operator(const SqueezeParams& s, Index dim) {
  if (dim < 2) throw std::invalid_argument("squeeze_operator: dim must be >= 2");
  const double nbar = std::sinh(s.r) * std::sinh(s.r);
  if (!(nbar < double(dim) / 10.0))
    throw std::invalid_argument("squeeze_operator: sinh^2(r) must stay below dim/10");
  const ModeOperatorSet ops = make_mode_operators(dim);
  const Complex xi = s.xi();
  const Matrix gen =
      (std::conj(xi) * (ops.a * ops.a) - xi * (ops.a_dag * ops.a_dag)) / 2.0;
  return gen.exp();
}

FieldState squeezed_vacuum(const SqueezeParams& s, Index dim) {
  const Matrix S = squeeze_operator(s, dim);
  return FieldState::pure(S.col(0));
}

FieldState thermal_state(double nbar, Index dim) {
  if (dim < 2) throw std::invalid_argument("thermal_state: dim must be >= 2");
  if (!(nbar >= 0.0)) throw std::invalid_argument("thermal_state: nbar must be >= 0");
  if (!(nbar < double(dim) / 10.0))
    throw std::invalid_argument("thermal_state: nbar must stay below dim/10");
  Eigen::VectorXd w(dim);
  const double q = nbar / (1.0 + nbar);
  double acc = 1.0;
  for (Index n = 0; n < dim; ++n) {
    w(n) = acc;
    acc *= q;
  }
  w /= w.sum();
  Matrix rho = Matrix::Zero(dim, dim);
  for (Index n = 0; n < dim; ++n) rho(n, n) = w(n);
  return FieldState::density(std::move(rho));
}

Complex expectation(const FieldState& state, const Matrix& M) {
  if (M.rows() != state.dim() || M.cols() != state.dim())
    throw std::invalid_argument("expectation: operator dimension mismatch");
  if (state.is_pure()) return state.vector().dot(M * state.vector());
  return (M * state.density_matrix()).trace();
}

double variance(const FieldState& state, const Matrix& M) {
  if ((M - M.adjoint()).cwiseAbs().maxCoeff() > 1e-10)
    throw std::invalid_argument("variance: operator must be Hermitian");
  const double mean = expectation(state, M).real();
  const double second = expectation(state, Matrix(M * M)).real();
  const double var = second - mean * mean;
  if (var < -1e-10)
    throw std::runtime_error("variance: negative beyond tolerance, state is invalid");
  return var < 0.0 ? 0.0 : var;
}

}  // namespace dce
