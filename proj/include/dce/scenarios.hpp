#pragma once

#include <array>

#include "dce/config.hpp"

namespace dce {

// ---- shared preparation ----

// 1 mcs of generation plus the measurement axis: the covariance-fitted squeezed
// angle when theta_from_covariance is set, the configured theta otherwise
struct PreparedField {
  GeneratedField field;
  CovarianceFit covariance;
  double theta_X = 0.0;
};

PreparedField prepare_field(const ExperimentConfig& cfg);

// ---- three-interval time series (generation, then two conditioned transits) ----

struct TimeSeriesRow {
  double t_mcs = 0.0;
  double p_ground = 1.0;  // ground probability of the atom currently in the cavity
  double mean_n = 0.0;
  double var_x = 0.5;  // quadrature dispersions in the frame rotating at omega0
  double var_p = 0.5;
};

struct TimeSeriesBranch {
  bool dce_on_during_transits = false;
  std::vector<TimeSeriesRow> rows;  // t ascending; starts at t = 0
  double max_norm_error = 0.0;      // worst |norm^2 - 1| seen along the trajectory
};

struct Fig1Result {
  double interval_mcs = 1.0;       // every interval spans the generation duration
  double theta_squeezed = 0.0;     // covariance-fit angle right after generation
  double var_q_min_generated = 0.5;
  TimeSeriesBranch solid;   // drive stays on while the atoms transit
  TimeSeriesBranch dashed;  // drive off during the transits
};

// Interval 1 generates the field from vacuum; at each interval boundary the atom
// is detected and the field conditioned on the ground outcome, then a fresh
// ground atom enters. Rows sample every interval uniformly.
Fig1Result run_fig1(const ExperimentConfig& cfg);

// ---- exact detection curves vs their low-order expansions ----

struct ProbabilityCurve {
  ScanVariant variant = ScanVariant::Plain1Atom;
  std::vector<double> tau;
  std::vector<double> exact;   // full measurement-operator probabilities
  std::vector<double> series;  // expansion through tau^2
};

struct Fig2Result {
  double theta_X = 0.0;
  double mean_n = 0.0;  // moments feeding the series curves
  double mean_Q = 0.0;
  double mean_Q2 = 0.0;
  std::array<ProbabilityCurve, 3> curves;  // plain, rotated 1-atom, rotated 2-atom
};

Fig2Result run_fig2(const ExperimentConfig& cfg);

// ---- headline estimates with acceptance bands ----

inline constexpr double kReferenceMeanN = 0.28;
inline constexpr double kReferenceMeanQ = 0.0;
inline constexpr double kReferenceQ2 = 0.18;
inline constexpr double kReferenceBand = 0.02;

struct Eq27Result {
  double theta_X = 0.0;
  MomentEstimate mean_n;   // from the exact-probability estimator pipeline
  MomentEstimate mean_Q;
  MomentEstimate mean_Q2;
  double exact_mean_n = 0.0;  // direct operator averages on the same state
  double exact_mean_Q = 0.0;
  double exact_mean_Q2 = 0.0;
  bool within_bands = false;
};

Eq27Result run_eq27(const ExperimentConfig& cfg);

// ---- raw probability scans and the squeezing witness ----

struct ScanResult {
  double theta_X = 0.0;
  TauScan plain;     // exact detection probabilities on the tau grid
  TauScan rotated1;
  TauScan rotated2;
  WitnessRecord witness_direct;     // Var Q(theta) straight from the state
  WitnessRecord witness_estimated;  // same through the probability estimators
  MomentEstimate mean_n;
  MomentEstimate mean_Q;
  MomentEstimate mean_Q2;
};

ScanResult run_scan(const ExperimentConfig& cfg);

// ---- Monte Carlo click pipeline ----

struct McResult {
  double theta_X = 0.0;
  ClickRecord plain;
  ClickRecord rotated1;
  ClickRecord rotated2;
  MomentEstimate mean_n;   // fitted from sampled frequencies
  MomentEstimate mean_Q;
  MomentEstimate mean_Q2;
  MomentEstimate exact_mean_n;  // exact-probability pipeline on the same grids
  MomentEstimate exact_mean_Q;
  MomentEstimate exact_mean_Q2;
};

McResult run_mc(const ExperimentConfig& cfg);

// ---- emission ----

// CSV files carry the fully resolved config as `# key = value` header lines;
// JSON files embed it as an object next to the data. Returns the written paths.
std::vector<std::string> write_fig1(const Fig1Result& result, const ExperimentConfig& cfg);
std::vector<std::string> write_fig2(const Fig2Result& result, const ExperimentConfig& cfg);
std::vector<std::string> write_eq27(const Eq27Result& result, const ExperimentConfig& cfg);
std::vector<std::string> write_scan(const ScanResult& result, const ExperimentConfig& cfg);
std::vector<std::string> write_mc(const McResult& result, const ExperimentConfig& cfg);

}  // namespace dce
