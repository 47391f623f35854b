// Probability scans, pinned-intercept derivative fits and the moment estimators:
//   <n>   = -(1/2) P''(0)        from the plain ground curve
//   <Q>   = sqrt(2) P~'(0)       from the rotated one-atom curve
//   <Q^2> = P~~''(0) + 1/2       from the rotated two-atom curve
// A degree-4 polynomial with the intercept pinned to the exact tau = 0 value is
// recovered bit-true by the fit, so synthetic quartics are exact oracles.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <complex>

#include "dce/estimators.hpp"

using namespace dce;

namespace {

constexpr double kSinh2Half = 0.2715403174076219;    // sinh^2(0.5)
constexpr double kExpM06Half = 0.2744058180470132;   // e^{-0.6}/2

FieldState coherent_state(Complex alpha, Index dim) {
  Vector psi(dim);
  Complex amp = 1.0;
  for (Index n = 0; n < dim; ++n) {
    if (n > 0) amp *= alpha / std::sqrt(double(n));
    psi[n] = amp;
  }
  psi /= psi.norm();
  return FieldState::pure(psi);
}

TauScan synthetic_scan(ScanVariant variant, double a1, double a2, double a3, double a4) {
  TauScan scan;
  scan.variant = variant;
  scan.tau = make_tau_grid(0.05, 9);
  const double ref = scan_reference_at_zero(variant);
  for (double tau : scan.tau)
    scan.prob.push_back(ref + a1 * tau + a2 * tau * tau + a3 * tau * tau * tau +
                        a4 * tau * tau * tau * tau);
  return scan;
}

}  // namespace

TEST_CASE("grids are uniform and validated") {
  const std::vector<double> tau = make_tau_grid(0.05, 9);
  REQUIRE(tau.size() == 9);
  CHECK(tau.front() == 0.0);
  CHECK(tau.back() == doctest::Approx(0.05).epsilon(1e-15));
  for (std::size_t i = 1; i < tau.size(); ++i)
    CHECK(tau[i] - tau[i - 1] == doctest::Approx(0.05 / 8.0).epsilon(1e-12));
  CHECK_THROWS_AS(make_tau_grid(0.05, 4), std::invalid_argument);
  CHECK_THROWS_AS(make_tau_grid(0.0, 9), std::invalid_argument);

  const std::vector<double> theta = make_theta_grid(16);
  REQUIRE(theta.size() == 16);
  CHECK(theta.front() == 0.0);
  for (double t : theta) {
    CHECK(t >= 0.0);
    CHECK(t < kPi);
  }
  CHECK(theta[1] == doctest::Approx(kPi / 16.0).epsilon(1e-15));
  CHECK_THROWS_AS(make_theta_grid(0), std::invalid_argument);
}

TEST_CASE("variant bookkeeping") {
  CHECK(scan_reference_at_zero(ScanVariant::Plain1Atom) == 1.0);
  CHECK(scan_reference_at_zero(ScanVariant::Rotated1Atom) == 0.5);
  CHECK(scan_reference_at_zero(ScanVariant::Rotated2Atom) == 0.25);
  CHECK(std::string(scan_variant_name(ScanVariant::Plain1Atom)) == "plain-1atom");
  CHECK(std::string(scan_variant_name(ScanVariant::Rotated1Atom)) == "rotated-1atom");
  CHECK(std::string(scan_variant_name(ScanVariant::Rotated2Atom)) == "rotated-2atom");
}

TEST_CASE("derivative fit recovers an exact quartic bit-true") {
  const TauScan scan = synthetic_scan(ScanVariant::Plain1Atom, -0.3, -1.0, 0.2, 0.05);
  const DerivativeEstimate est = fit_derivatives(scan);
  CHECK(est.d1 == doctest::Approx(-0.3).epsilon(1e-9));
  CHECK(est.d2 == doctest::Approx(-2.0).epsilon(1e-9));
  CHECK(est.fit_degree == 4);
  CHECK(est.condition > 0.0);
  CHECK(est.condition < 1e8);

  // supplying uncertainties switches to weighted mode but cannot move an exact fit
  TauScan weighted = scan;
  weighted.std_err = std::vector<double>(scan.tau.size(), 1e-3);
  const DerivativeEstimate west = fit_derivatives(weighted);
  CHECK(west.d1 == doctest::Approx(-0.3).epsilon(1e-8));
  CHECK(west.d2 == doctest::Approx(-2.0).epsilon(1e-8));
  CHECK(west.covariance(0, 0) > 0.0);
  CHECK(west.covariance(1, 1) > 0.0);
}

TEST_CASE("derivative fit rejects unusable scans") {
  TauScan scan;
  scan.variant = ScanVariant::Plain1Atom;
  scan.tau = {0.0, 0.01, 0.02, 0.03};
  scan.prob = {1.0, 0.999, 0.996, 0.991};
  CHECK_THROWS_AS(fit_derivatives(scan), FitError);  // needs five points

  TauScan mismatched = synthetic_scan(ScanVariant::Plain1Atom, 0.0, -1.0, 0.0, 0.0);
  mismatched.prob.pop_back();
  CHECK_THROWS_AS(fit_derivatives(mismatched), FitError);

  TauScan degenerate = synthetic_scan(ScanVariant::Plain1Atom, 0.0, -1.0, 0.0, 0.0);
  for (double& t : degenerate.tau) t = 0.0;
  CHECK_THROWS_AS(fit_derivatives(degenerate), FitError);

  TauScan bad_err = synthetic_scan(ScanVariant::Plain1Atom, 0.0, -1.0, 0.0, 0.0);
  bad_err.std_err = std::vector<double>(3, 1e-3);
  CHECK_THROWS_AS(fit_derivatives(bad_err), FitError);
}

TEST_CASE("moment estimators demand the matching scan variant") {
  const TauScan plain = synthetic_scan(ScanVariant::Plain1Atom, 0.0, -0.5, 0.0, 0.0);
  const TauScan rot1 = synthetic_scan(ScanVariant::Rotated1Atom, 0.2, 0.0, 0.0, 0.0);
  const TauScan rot2 = synthetic_scan(ScanVariant::Rotated2Atom, 0.0, 0.25, 0.0, 0.0);
  CHECK(estimate_mean_n(plain).value == doctest::Approx(0.5).epsilon(1e-8));  // d2 = 2 a2 = -1
  CHECK(estimate_Q_mean(rot1).value == doctest::Approx(kSqrt2 * 0.2).epsilon(1e-8));
  CHECK(estimate_Q2(rot2).value == doctest::Approx(1.0).epsilon(1e-8));
  CHECK_THROWS_AS(estimate_mean_n(rot1), std::invalid_argument);
  CHECK_THROWS_AS(estimate_Q_mean(plain), std::invalid_argument);
  CHECK_THROWS_AS(estimate_Q2(rot1), std::invalid_argument);
}

TEST_CASE("scan probabilities validate their inputs and flag strong coupling") {
  const FieldState sq = squeezed_vacuum({0.5, kPi}, 40);
  CHECK_THROWS_AS(scan_probability(sq, ScanVariant::Plain1Atom, 0.0, {}, ScanMode::Kraus),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      scan_probability(sq, ScanVariant::Plain1Atom, 0.0, {0.0, -0.1}, ScanMode::Kraus),
      std::invalid_argument);
  CHECK_THROWS_AS(scan_probability(sq, ScanVariant::Plain1Atom, 0.0, {0.0, 0.01, 0.02},
                                   ScanMode::ExactJoint),
                  std::invalid_argument);  // exact mode needs a context

  const TauScan scan = scan_probability(sq, ScanVariant::Plain1Atom, 0.0,
                                        make_tau_grid(0.05, 9), ScanMode::Kraus);
  REQUIRE(scan.weakness.has_value());
  CHECK(scan.weakness->product == doctest::Approx(0.05 * sq.mean_n()).epsilon(1e-10));
  CHECK_FALSE(scan.weakness->flagged);
  CHECK(scan.prob.front() == doctest::Approx(1.0).epsilon(1e-13));
  for (double p : scan.prob) {
    CHECK(p >= 0.0);
    CHECK(p <= 1.0);
  }
}

TEST_CASE("estimators recover operator moments from exact probability scans") {
  const Index dim = 40;
  const ModeOperatorSet ops = make_mode_operators(dim);
  const std::vector<double> grid = make_tau_grid(0.05, 9);

  // squeezed vacuum: <n> known in closed form, <Q(0)> = 0
  const FieldState sq = squeezed_vacuum({0.5, kPi}, dim);
  const TauScan plain = scan_probability(sq, ScanVariant::Plain1Atom, 0.0, grid, ScanMode::Kraus);
  CHECK(estimate_mean_n(plain).value == doctest::Approx(kSinh2Half).epsilon(1e-4));

  const TauScan rot2 = scan_probability(sq, ScanVariant::Rotated2Atom, 0.0, grid, ScanMode::Kraus);
  CHECK(estimate_Q2(rot2).value == doctest::Approx(0.18393972058572117).epsilon(1e-3));

  // thermal state: <n> = nbar
  const FieldState th = thermal_state(0.4, dim);
  const TauScan thermal_scan =
      scan_probability(th, ScanVariant::Plain1Atom, 0.0, grid, ScanMode::Kraus);
  CHECK(estimate_mean_n(thermal_scan).value == doctest::Approx(0.4).epsilon(1e-3));

  // displaced state: <Q(0)> = <p> = sqrt(2) Im(alpha)
  const FieldState coh = coherent_state(Complex(0.0, 0.3), dim);
  const double mean_p = expectation(coh, ops.p).real();
  const TauScan rot1 = scan_probability(coh, ScanVariant::Rotated1Atom, 0.0, grid,
                                        ScanMode::Kraus);
  CHECK(estimate_Q_mean(rot1).value == doctest::Approx(mean_p).epsilon(1e-4));
  CHECK(mean_p == doctest::Approx(kSqrt2 * 0.3).epsilon(1e-6));
}

TEST_CASE("exact-joint scans agree with the measurement pair when exactness holds") {
  const Index dim = 12;
  DriveProfile drive;
  ExactScanContext ctx;
  ctx.atom = make_atom(5e-4, 0.0, drive);
  ctx.drive = drive;
  ctx.prop = for_drive({}, drive);
  ctx.dce_on = false;

  const FieldState sq = squeezed_vacuum({0.3, kPi}, dim);
  const std::vector<double> grid = make_tau_grid(0.02, 5);
  for (ScanVariant variant :
       {ScanVariant::Plain1Atom, ScanVariant::Rotated1Atom, ScanVariant::Rotated2Atom}) {
    const double theta = variant == ScanVariant::Plain1Atom ? 0.0 : 0.4;
    const TauScan kraus = scan_probability(sq, variant, theta, grid, ScanMode::Kraus);
    const TauScan exact = scan_probability(sq, variant, theta, grid, ScanMode::ExactJoint, ctx);
    REQUIRE(kraus.prob.size() == exact.prob.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
      CHECK(exact.prob[i] == doctest::Approx(kraus.prob[i]).epsilon(1e-8));
  }
}

TEST_CASE("squeezing witness separates squeezed from thermal states") {
  const Index dim = 40;
  const FieldState sq = squeezed_vacuum({0.3, kPi}, dim);  // min dispersion e^{-0.6}/2
  const std::vector<double> angles = make_theta_grid(16);

  const WitnessRecord direct = squeezing_witness(sq, angles, WitnessPipeline::Direct);
  CHECK(direct.squeezed);
  CHECK(direct.min_variance == doctest::Approx(kExpM06Half).epsilon(1e-6));
  const double axis = std::min(direct.theta_at_min, kPi - direct.theta_at_min);
  CHECK(axis < 1e-9);  // theta = 0 lies on the grid

  const WitnessRecord est = squeezing_witness(sq, angles, WitnessPipeline::ViaEstimators);
  CHECK(est.squeezed);
  CHECK(est.min_variance == doctest::Approx(kExpM06Half).epsilon(2e-3));
  REQUIRE(est.theta.size() == angles.size());
  REQUIRE(est.variance_Q.size() == angles.size());

  const FieldState th = thermal_state(0.3, dim);  // dispersion 0.8 at every angle
  const WitnessRecord th_direct = squeezing_witness(th, angles, WitnessPipeline::Direct);
  CHECK_FALSE(th_direct.squeezed);
  CHECK(th_direct.min_variance == doctest::Approx(0.8).epsilon(1e-6));
  const WitnessRecord th_est = squeezing_witness(th, angles, WitnessPipeline::ViaEstimators);
  CHECK_FALSE(th_est.squeezed);

  // vacuum sits exactly at 1/2: inside the margin, so not flagged
  CHECK_FALSE(squeezing_witness(vacuum_state(dim), angles, WitnessPipeline::Direct).squeezed);
}

TEST_CASE("squeezing witness validates its angle grid") {
  const FieldState vac = vacuum_state(8);
  CHECK_THROWS_AS(squeezing_witness(vac, make_theta_grid(8), WitnessPipeline::Direct),
                  std::invalid_argument);
  std::vector<double> bad = make_theta_grid(16);
  bad[3] = bad[2];  // not strictly ascending
  CHECK_THROWS_AS(squeezing_witness(vac, bad, WitnessPipeline::Direct), std::invalid_argument);
  bad = make_theta_grid(16);
  bad.back() = kPi + 0.1;
  CHECK_THROWS_AS(squeezing_witness(vac, bad, WitnessPipeline::Direct), std::invalid_argument);
}
