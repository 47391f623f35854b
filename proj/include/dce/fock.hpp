#pragma once

#include <complex>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "dce/errors.hpp"

namespace dce {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using Index = Eigen::Index;

inline constexpr double kSqrt2 = 1.4142135623730951;

// ---- state diagnostics ----

struct StateTolerances {
  double unit_norm = 1e-10;     // |norm - 1| (pure) or |tr - 1| (mixed)
  double hermiticity = 1e-10;   // max |rho - rho^dag| entry
  double eigen_floor = -1e-9;   // smallest admissible density eigenvalue
  double tail = 1e-6;           // population allowed in the top levels
  double tail_fraction = 0.10;  // fraction of levels counted as the tail
};

struct StateCheck {
  bool valid = true;               // norm, hermiticity and positivity all hold
  bool truncation_unsafe = false;  // tail population above threshold
  double norm_error = 0.0;
  double hermiticity_error = 0.0;
  double min_eigenvalue = 0.0;
  double tail_population = 0.0;
  std::string detail;
};

// ---- field state ----

// Single-mode field state in a truncated Fock basis {|0>, ..., |dim-1>}.
// Pure states stay vectors; mixed states are dense density matrices.
// Contents are fixed at construction; all accessors are const.
class FieldState {
 public:
  FieldState() = default;  // empty until assigned from a factory
  static FieldState pure(Vector psi);
  static FieldState density(Matrix rho);

  Index dim() const { return dim_; }
  bool is_pure() const { return psi_.has_value(); }

  const Vector& vector() const;          // throws std::logic_error for mixed states
  const Matrix& density_matrix() const;  // throws std::logic_error for pure states
  Matrix to_density() const;             // |psi><psi| when pure

  double norm_or_trace() const;  // <psi|psi> or tr(rho)
  double purity() const;         // tr(rho^2) after trace normalisation; 1 for vectors
  double mean_n() const;         // <a^dag a> from level populations
  double level_population(Index n) const;
  double tail_population(double top_fraction = 0.10) const;

  StateCheck check(const StateTolerances& tol = {}) const;

 private:
  Index dim_ = 0;
  std::optional<Vector> psi_;
  std::optional<Matrix> rho_;
};

// ---- operators ----

struct ModeOperatorSet {
  Index dim = 0;
  Matrix a;      // a|n> = sqrt(n)|n-1>
  Matrix a_dag;
  Matrix n_hat;  // diag(0 .. dim-1), built exactly
  Matrix x;      // (a + a^dag)/sqrt(2)
  Matrix p;      // (a - a^dag)/(sqrt(2) i)
};

// xi = r e^{i phi}; phi = 0 squeezes x, phi = pi squeezes p
struct SqueezeParams {
  double r = 0.0;
  double phi = 0.0;
  Complex xi() const { return std::polar(r, phi); }
};

ModeOperatorSet make_mode_operators(Index dim);

// Q(theta) = (e^{-i theta} a - e^{i theta} a^dag)/(sqrt(2) i); Q(0) = p, Q(pi/2) = -x
Matrix quadrature_Q(const ModeOperatorSet& ops, double theta);

FieldState vacuum_state(Index dim);
FieldState fock_state(Index dim, Index n);

// S(xi) = exp[(conj(xi) a^2 - xi a^dag^2)/2]; requires sinh^2(r) < dim/10
Matrix squeeze_operator(const SqueezeParams& s, Index dim);
FieldState squeezed_vacuum(const SqueezeParams& s, Index dim);

// populations p_n proportional to (nbar/(1+nbar))^n, renormalised after truncation;
// requires nbar < dim/10
FieldState thermal_state(double nbar, Index dim);

Complex expectation(const FieldState& state, const Matrix& M);

// requires Hermitian M; result is >= -1e-10 and clamped to 0 from above
double variance(const FieldState& state, const Matrix& M);

}  // namespace dce
