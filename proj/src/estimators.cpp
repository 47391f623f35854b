#include "dce/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/SVD>

#include "dce/errors.hpp"

namespace dce {

namespace {

constexpr double kConditionLimit = 1e8;
constexpr int kFitDegree = 4;

double kraus_point(const FieldState& state, ScanVariant variant, double theta, double tau) {
  const KrausPair plain = jc_kraus(tau, state.dim());
  switch (variant) {
    case ScanVariant::Plain1Atom:
      return outcome_probability(state, plain, AtomicOutcome::Ground);
    case ScanVariant::Rotated1Atom:
      return outcome_probability(state, rotated_kraus(plain, theta), AtomicOutcome::Ground);
    case ScanVariant::Rotated2Atom:
      return two_atom_probability(state, rotated_kraus(plain, theta), AtomicOutcome::Ground);
  }
  throw std::logic_error("kraus_point: unreachable variant");
}

double exact_point(const FieldState& state, ScanVariant variant, double theta, double tau,
                   const ExactScanContext& ctx) {
  if (ctx.atom.g <= 0.0) throw std::invalid_argument("exact scan needs g > 0");
  const double t_int = tau / ctx.atom.g;
  std::optional<ExternalPulse> pulse;
  if (variant != ScanVariant::Plain1Atom)
    pulse = ExternalPulse::for_measurement_angle(theta, ctx.atom);
  const PassageResult first = exact_atom_passage(state, ctx.atom, ctx.drive, t_int, pulse,
                                                 AtomicOutcome::Ground, ctx.prop, ctx.dce_on,
                                                 ctx.t_start);
  if (variant != ScanVariant::Rotated2Atom) return first.probability;
  const PassageResult second = exact_atom_passage(first.state, ctx.atom, ctx.drive, t_int, pulse,
                                                  AtomicOutcome::Ground, ctx.prop, ctx.dce_on,
                                                  ctx.t_start + t_int);
  return first.probability * second.probability;
}

void require_variant(const TauScan& scan, ScanVariant expected, const char* what) {
  if (scan.variant != expected)
    throw std::invalid_argument(std::string(what) + ": scan variant does not match");
}

}  // namespace

double scan_reference_at_zero(ScanVariant variant) {
  switch (variant) {
    case ScanVariant::Plain1Atom: return 1.0;
    case ScanVariant::Rotated1Atom: return 0.5;
    case ScanVariant::Rotated2Atom: return 0.25;
  }
  throw std::logic_error("scan_reference_at_zero: unreachable variant");
}

const char* scan_variant_name(ScanVariant variant) {
  switch (variant) {
    case ScanVariant::Plain1Atom: return "plain-1atom";
    case ScanVariant::Rotated1Atom: return "rotated-1atom";
    case ScanVariant::Rotated2Atom: return "rotated-2atom";
  }
  throw std::logic_error("scan_variant_name: unreachable variant");
}

std::vector<double> make_tau_grid(double tau_max, int points) {
  if (!(tau_max > 0.0)) throw std::invalid_argument("make_tau_grid: tau_max must be positive");
  if (points < 5) throw std::invalid_argument("make_tau_grid: need at least 5 points");
  std::vector<double> grid(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) grid[static_cast<std::size_t>(i)] = tau_max * i / (points - 1);
  return grid;
}

std::vector<double> make_theta_grid(int points) {
  if (points < 1) throw std::invalid_argument("make_theta_grid: need at least 1 point");
  std::vector<double> grid(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) grid[static_cast<std::size_t>(i)] = kPi * i / points;
  return grid;
}

TauScan scan_probability(const FieldState& state, ScanVariant variant, double theta,
                         const std::vector<double>& tau_grid, ScanMode mode,
                         const std::optional<ExactScanContext>& ctx) {
  if (tau_grid.empty()) throw std::invalid_argument("scan_probability: empty tau grid");
  for (double tau : tau_grid)
    if (!(tau >= 0.0)) throw std::invalid_argument("scan_probability: tau must be >= 0");
  if (mode == ScanMode::ExactJoint && !ctx)
    throw std::invalid_argument("scan_probability: exact mode needs a context");

  TauScan scan;
  scan.variant = variant;
  scan.theta = (variant == ScanVariant::Plain1Atom) ? 0.0 : theta;
  scan.tau = tau_grid;
  scan.prob.reserve(tau_grid.size());
  for (double tau : tau_grid) {
    const double p = (mode == ScanMode::Kraus) ? kraus_point(state, variant, scan.theta, tau)
                                               : exact_point(state, variant, scan.theta, tau, *ctx);
    scan.prob.push_back(p);
  }
  scan.weakness = weakness_check(*std::max_element(tau_grid.begin(), tau_grid.end()), state);
  return scan;
}

// -- derivative fit ------------------------------------------------------------

// Model in u = tau/tau_max:  P(u) - P0 = sum_{k=1..4} c_k u^k.  Pinning the
// intercept keeps d1/d2 anchored to the known tau = 0 limit of each curve.
DerivativeEstimate fit_derivatives(const TauScan& scan) {
  const Eigen::Index m = static_cast<Eigen::Index>(scan.tau.size());
  if (m < kFitDegree + 1) throw FitError("fit_derivatives: need at least 5 scan points");
  if (scan.prob.size() != scan.tau.size())
    throw FitError("fit_derivatives: tau/prob length mismatch");
  const double tau_max = *std::max_element(scan.tau.begin(), scan.tau.end());
  if (!(tau_max > 0.0)) throw FitError("fit_derivatives: all tau vanish");

  const double p0 = scan_reference_at_zero(scan.variant);
  const bool weighted = scan.std_err.has_value();
  if (weighted && scan.std_err->size() != scan.tau.size())
    throw FitError("fit_derivatives: std_err length mismatch");

  Eigen::MatrixXd design(m, kFitDegree);
  Eigen::VectorXd rhs(m);
  Eigen::VectorXd sqrt_w = Eigen::VectorXd::Ones(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double u = scan.tau[static_cast<std::size_t>(i)] / tau_max;
    double uk = u;
    for (int k = 0; k < kFitDegree; ++k, uk *= u) design(i, k) = uk;
    rhs(i) = scan.prob[static_cast<std::size_t>(i)] - p0;
    if (weighted) {
      const double sigma = std::max((*scan.std_err)[static_cast<std::size_t>(i)], 1e-15);
      sqrt_w(i) = 1.0 / sigma;
    }
  }

  const Eigen::MatrixXd scaled = sqrt_w.asDiagonal() * design;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(scaled, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const double s_max = svd.singularValues()(0);
  const double s_min = svd.singularValues()(svd.singularValues().size() - 1);
  if (!(s_min > 0.0) || s_max / s_min > kConditionLimit)
    throw FitError("fit_derivatives: design matrix is numerically singular");
  const Eigen::VectorXd coeff = svd.solve((sqrt_w.asDiagonal() * rhs).eval());

  // cov(c) = (X^T W X)^{-1}; without supplied errors, scale by the residual variance
  Eigen::MatrixXd cov_c = (scaled.transpose() * scaled).inverse();
  if (!weighted) {
    const double dof = static_cast<double>(m - kFitDegree);
    const double rss = (design * coeff - rhs).squaredNorm();
    cov_c *= (dof > 0.0) ? rss / dof : 0.0;
  }

  Eigen::Matrix<double, 2, kFitDegree> jac = Eigen::Matrix<double, 2, kFitDegree>::Zero();
  jac(0, 0) = 1.0 / tau_max;
  jac(1, 1) = 2.0 / (tau_max * tau_max);

  DerivativeEstimate est;
  est.d1 = coeff(0) / tau_max;
  est.d2 = 2.0 * coeff(1) / (tau_max * tau_max);
  est.covariance = jac * cov_c * jac.transpose();
  est.fit_degree = kFitDegree;
  est.condition = s_max / s_min;
  est.weakness = scan.weakness;
  return est;
}

MomentEstimate estimate_mean_n(const TauScan& scan) {
  require_variant(scan, ScanVariant::Plain1Atom, "estimate_mean_n");
  const DerivativeEstimate d = fit_derivatives(scan);
  return {-0.5 * d.d2, 0.5 * std::sqrt(std::max(d.covariance(1, 1), 0.0))};
}

MomentEstimate estimate_Q_mean(const TauScan& scan) {
  require_variant(scan, ScanVariant::Rotated1Atom, "estimate_Q_mean");
  const DerivativeEstimate d = fit_derivatives(scan);
  return {kSqrt2 * d.d1, kSqrt2 * std::sqrt(std::max(d.covariance(0, 0), 0.0))};
}

MomentEstimate estimate_Q2(const TauScan& scan) {
  require_variant(scan, ScanVariant::Rotated2Atom, "estimate_Q2");
  const DerivativeEstimate d = fit_derivatives(scan);
  return {d.d2 + 0.5, std::sqrt(std::max(d.covariance(1, 1), 0.0))};
}

// -- squeezing witness ---------------------------------------------------------

WitnessRecord squeezing_witness(const FieldState& state, const std::vector<double>& theta_grid,
                                WitnessPipeline pipeline, double margin,
                                const std::vector<double>& tau_grid) {
  if (theta_grid.size() < 16)
    throw std::invalid_argument("squeezing_witness: need at least 16 angles");
  for (std::size_t i = 0; i < theta_grid.size(); ++i) {
    if (!(theta_grid[i] >= 0.0 && theta_grid[i] < kPi))
      throw std::invalid_argument("squeezing_witness: angles must lie in [0, pi)");
    if (i > 0 && !(theta_grid[i] > theta_grid[i - 1]))
      throw std::invalid_argument("squeezing_witness: angles must ascend");
  }

  WitnessRecord record;
  record.theta = theta_grid;
  record.variance_Q.reserve(theta_grid.size());
  record.margin = margin;
  const ModeOperatorSet ops = make_mode_operators(state.dim());
  for (double theta : theta_grid) {
    double var = 0.0;
    if (pipeline == WitnessPipeline::Direct) {
      var = variance(state, quadrature_Q(ops, theta));
    } else {
      const TauScan one = scan_probability(state, ScanVariant::Rotated1Atom, theta, tau_grid,
                                           ScanMode::Kraus);
      const TauScan two = scan_probability(state, ScanVariant::Rotated2Atom, theta, tau_grid,
                                           ScanMode::Kraus);
      const double mean_q = estimate_Q_mean(one).value;
      var = estimate_Q2(two).value - mean_q * mean_q;
    }
    record.variance_Q.push_back(var);
  }

  const auto it = std::min_element(record.variance_Q.begin(), record.variance_Q.end());
  record.min_variance = *it;
  record.theta_at_min = theta_grid[static_cast<std::size_t>(it - record.variance_Q.begin())];
  record.squeezed = record.min_variance < 0.5 - margin;
  return record;
}

}  // namespace dce
