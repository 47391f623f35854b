#pragma once

#include <vector>

#include "dce/kraus.hpp"

namespace dce {

enum class ScanVariant { Plain1Atom, Rotated1Atom, Rotated2Atom };

// Kraus evaluates the measurement operators directly; ExactJoint runs the full
// joint atom-field propagation per grid point (needs an ExactScanContext).
enum class ScanMode { Kraus, ExactJoint };

struct ExactScanContext {
  AtomParams atom;
  DriveProfile drive;
  PropagatorConfig prop;
  bool dce_on = false;
  double t_start = 0.0;
};

struct TauScan {
  ScanVariant variant = ScanVariant::Plain1Atom;
  double theta = 0.0;  // measurement angle, meaningful for rotated variants
  std::vector<double> tau;
  std::vector<double> prob;
  std::optional<std::vector<double>> std_err;
  std::optional<WeaknessRecord> weakness;  // set when the source state was available
};

// exact curve value at tau = 0: 1, 1/2 or 1/4
double scan_reference_at_zero(ScanVariant variant);

const char* scan_variant_name(ScanVariant variant);  // "plain-1atom" etc.

std::vector<double> make_tau_grid(double tau_max, int points);   // uniform, starts at 0
std::vector<double> make_theta_grid(int points);                 // uniform on [0, pi)

// re-prepares the identical input state at every grid point
TauScan scan_probability(const FieldState& state, ScanVariant variant, double theta,
                         const std::vector<double>& tau_grid, ScanMode mode,
                         const std::optional<ExactScanContext>& ctx = std::nullopt);

// weighted least squares, degree 4, intercept pinned to the theoretical tau = 0 value
struct DerivativeEstimate {
  double d1 = 0.0;  // dP/dtau at 0
  double d2 = 0.0;  // d2P/dtau2 at 0
  Eigen::Matrix2d covariance = Eigen::Matrix2d::Zero();  // of (d1, d2)
  int fit_degree = 4;
  double condition = 0.0;                  // of the scaled design matrix
  std::optional<WeaknessRecord> weakness;  // carried over from the scan
};

DerivativeEstimate fit_derivatives(const TauScan& scan);

struct MomentEstimate {
  double value = 0.0;
  double std_err = 0.0;
};

MomentEstimate estimate_mean_n(const TauScan& scan);  // -(1/2) d2 of the plain curve
MomentEstimate estimate_Q_mean(const TauScan& scan);  // sqrt(2) d1 of the rotated 1-atom curve
MomentEstimate estimate_Q2(const TauScan& scan);      // d2 of the rotated 2-atom curve + 1/2

enum class WitnessPipeline { Direct, ViaEstimators };

struct WitnessRecord {
  std::vector<double> theta;
  std::vector<double> variance_Q;
  double min_variance = 0.0;
  double theta_at_min = 0.0;
  double margin = 0.02;
  bool squeezed = false;  // min variance < 1/2 - margin
};

// theta grid must hold >= 16 ascending angles inside [0, pi)
WitnessRecord squeezing_witness(const FieldState& state, const std::vector<double>& theta_grid,
                                WitnessPipeline pipeline, double margin = 0.02,
                                const std::vector<double>& tau_grid = make_tau_grid(0.05, 9));

}  // namespace dce
