#include "dce/scenarios.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "dce/errors.hpp"
#include "dce/format.hpp"

namespace dce {

namespace {

using nlohmann::json;

double to_mcs(double t_internal, const ExperimentConfig& cfg) {
  return t_internal * cfg.omega0 / cfg.omega0_per_mcs;
}

// reduced field density of a pure joint state (atom traced out)
Matrix reduced_field_density(const Vector& joint, Index dim) {
  const auto ground = joint.head(dim);
  const auto excited = joint.tail(dim);
  return ground * ground.adjoint() + excited * excited.adjoint();
}

TimeSeriesRow joint_sample_row(double t_mcs, const Vector& joint, const ModeOperatorSet& ops) {
  const FieldState reduced = FieldState::density(reduced_field_density(joint, ops.dim));
  TimeSeriesRow row;
  row.t_mcs = t_mcs;
  row.p_ground = joint.head(ops.dim).squaredNorm();
  row.mean_n = reduced.mean_n();
  row.var_x = variance(reduced, ops.x);
  row.var_p = variance(reduced, ops.p);
  return row;
}

template <typename F>
auto with_interval_context(int interval, F&& body) {
  const std::string tag = "fig1 interval " + std::to_string(interval) + ": ";
  try {
    return body();
  } catch (const PropagationError& e) {
    throw PropagationError(tag + e.what());
  } catch (const TruncationError& e) {
    throw TruncationError(tag + e.what());
  }
}

// ---- file helpers ----

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  out << text;
  out.flush();
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

std::string output_path(const ExperimentConfig& cfg, const std::string& name) {
  std::filesystem::create_directories(cfg.out_dir);
  return (std::filesystem::path(cfg.out_dir) / name).string();
}

// resolved config as `# key = value` lines, ready to embed in a CSV header
std::string config_comment_block(const ExperimentConfig& cfg) {
  std::istringstream in(resolved_config_text(cfg));
  std::string line, out;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    out += "# " + line + "\n";
  }
  return out;
}

std::string csv_preamble(const char* command, const ExperimentConfig& cfg) {
  std::string out;
  out += std::string("# dceprobe ") + command + "\n";
  out += std::string("# artifact_version = ") + kArtifactVersion + "\n";
  out += "# config_begin\n";
  out += config_comment_block(cfg);
  out += "# config_end\n";
  return out;
}

json config_json(const ExperimentConfig& cfg) {
  json j;
  j["omega0"] = cfg.omega0;
  j["epsilon"] = cfg.epsilon;
  j["eta"] = cfg.eta;
  j["omega0_per_mcs"] = cfg.omega0_per_mcs;
  j["g"] = cfg.g;
  j["delta"] = cfg.delta;
  j["generation_duration_mcs"] = cfg.generation_duration_mcs;
  j["fock_dim"] = cfg.fock_dim;
  j["steps_per_drive_period"] = cfg.steps_per_drive_period;
  j["integrator"] = integrator_name(cfg.integrator);
  j["unitarity_tol"] = cfg.unitarity_tol;
  j["tail_threshold"] = cfg.tail_threshold;
  j["tau_max"] = cfg.tau_max;
  j["tau_points"] = cfg.tau_points;
  j["theta"] = cfg.theta;
  j["theta_points"] = cfg.theta_points;
  j["theta_from_covariance"] = cfg.theta_from_covariance;
  j["squeeze_margin"] = cfg.squeeze_margin;
  j["atoms_per_point"] = cfg.atoms_per_point;
  j["reset_mode"] = reset_mode_name(cfg.reset_mode);
  j["reset_tau"] = cfg.reset_tau;
  j["reset_cycle_cap"] = cfg.reset_cycle_cap;
  j["reset_vacuum_threshold"] = cfg.reset_vacuum_threshold;
  j["seed"] = cfg.seed;
  j["fig1_samples_per_interval"] = cfg.fig1_samples_per_interval;
  j["fig2_tau_max"] = cfg.fig2_tau_max;
  j["fig2_tau_points"] = cfg.fig2_tau_points;
  j["format"] = output_format_name(cfg.format);
  j["out_dir"] = cfg.out_dir;
  return j;
}

json document_json(const char* command, const ExperimentConfig& cfg) {
  json j;
  j["artifact_version"] = kArtifactVersion;
  j["command"] = command;
  j["config"] = config_json(cfg);
  return j;
}

void write_json_file(const std::string& path, const json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

json moment_json(const MomentEstimate& m) { return json{{"value", m.value}, {"std_err", m.std_err}}; }

std::string moment_csv(const MomentEstimate& m) {
  return format_double(m.value) + "," + format_double(m.std_err);
}

json scan_json(const TauScan& scan) {
  json j;
  j["variant"] = scan_variant_name(scan.variant);
  j["theta"] = scan.theta;
  j["tau"] = scan.tau;
  j["prob"] = scan.prob;
  if (scan.std_err) j["std_err"] = *scan.std_err;
  return j;
}

json witness_json(const WitnessRecord& w) {
  json j;
  j["theta"] = w.theta;
  j["variance_Q"] = w.variance_Q;
  j["min_variance"] = w.min_variance;
  j["theta_at_min"] = w.theta_at_min;
  j["margin"] = w.margin;
  j["squeezed"] = w.squeezed;
  return j;
}

json rows_json(const std::vector<TimeSeriesRow>& rows) {
  json arr = json::array();
  for (const TimeSeriesRow& r : rows)
    arr.push_back({r.t_mcs, r.p_ground, r.mean_n, r.var_x, r.var_p});
  return arr;
}

std::string branch_csv(const TimeSeriesBranch& branch, const Fig1Result& result,
                       const ExperimentConfig& cfg, const char* name) {
  std::string out = csv_preamble("fig1", cfg);
  out += std::string("# branch = ") + name + "\n";
  out += std::string("# dce_on_during_transits = ") +
         (branch.dce_on_during_transits ? "true" : "false") + "\n";
  out += "# interval_mcs = " + format_double(result.interval_mcs) + "\n";
  out += "# theta_squeezed = " + format_double(result.theta_squeezed) + "\n";
  out += "# var_q_min_generated = " + format_double(result.var_q_min_generated) + "\n";
  out += "# max_norm_error = " + format_double(branch.max_norm_error) + "\n";
  out += "t_mcs,p_ground,mean_n,var_x,var_p\n";
  for (const TimeSeriesRow& r : branch.rows) {
    out += format_double(r.t_mcs) + "," + format_double(r.p_ground) + "," +
           format_double(r.mean_n) + "," + format_double(r.var_x) + "," + format_double(r.var_p) +
           "\n";
  }
  return out;
}

}  // namespace

// ---- scenario runners ----

PreparedField prepare_field(const ExperimentConfig& cfg) {
  validate_config(cfg);
  PreparedField prepared;
  prepared.field = generate_dce_field(internal_duration(cfg), drive_of(cfg), propagator_of(cfg),
                                      cfg.fock_dim, tolerances_of(cfg));
  const ModeOperatorSet ops = make_mode_operators(cfg.fock_dim);
  prepared.covariance = fit_squeeze_from_covariance(prepared.field.rotating, ops);
  prepared.theta_X = cfg.theta_from_covariance ? prepared.covariance.theta_min : cfg.theta;
  return prepared;
}

Fig1Result run_fig1(const ExperimentConfig& cfg) {
  validate_config(cfg);
  const double span = internal_duration(cfg);
  if (!(span > 0.0)) throw ConfigError("fig1 needs generation_duration_mcs > 0");

  const DriveProfile drive = drive_of(cfg);
  const AtomParams atom = atom_of(cfg);
  const PropagatorConfig prop = propagator_of(cfg);
  const StateTolerances tol = tolerances_of(cfg);
  // the solid branch amplifies over all three intervals; automatic sizing keeps
  // the truncation guard satisfied for default-length intervals
  const Index dim =
      cfg.fig1_fock_dim > 0 ? cfg.fig1_fock_dim : std::max<Index>(cfg.fock_dim, 144);
  const ModeOperatorSet ops = make_mode_operators(dim);
  const int samples = cfg.fig1_samples_per_interval;

  Fig1Result result;
  result.interval_mcs = cfg.generation_duration_mcs;

  // interval 1: generation from vacuum, sampled in the rotating frame
  std::vector<TimeSeriesRow> shared_rows;
  shared_rows.push_back({0.0, 1.0, 0.0, 0.5, 0.5});
  double shared_norm_error = 0.0;
  const HamiltonianFn field_fn = field_hamiltonian_fn(drive, ops);
  FieldState lab = vacuum_state(dim);
  with_interval_context(1, [&] {
    for (int k = 1; k <= samples; ++k) {
      const double t_a = span * (k - 1) / samples;
      const double t_b = span * k / samples;
      lab = propagate(lab, t_a, t_b, field_fn, prop);
      shared_norm_error = std::max(shared_norm_error, std::abs(lab.norm_or_trace() - 1.0));
      const FieldState rot = to_rotating_frame(lab, drive.omega0, t_b);
      shared_rows.push_back({to_mcs(t_b, cfg), 1.0, rot.mean_n(), variance(rot, ops.x),
                             variance(rot, ops.p)});
    }
    const StateCheck chk = lab.check(tol);
    if (chk.truncation_unsafe)
      throw TruncationError("tail population " + format_short(chk.tail_population));
    return 0;
  });

  const FieldState generated = to_rotating_frame(lab, drive.omega0, span);
  const CovarianceFit fit = fit_squeeze_from_covariance(generated, ops);
  result.theta_squeezed = fit.theta_min;
  result.var_q_min_generated = fit.var_min;

  // intervals 2 and 3: a ground atom transits for one interval, is detected, and
  // the field is conditioned on the ground outcome before the next atom enters
  const auto run_branch = [&](bool dce_on) {
    TimeSeriesBranch branch;
    branch.dce_on_during_transits = dce_on;
    branch.rows = shared_rows;
    branch.max_norm_error = shared_norm_error;
    const HamiltonianFn joint_fn = joint_interaction_fn(drive, atom, ops, dce_on);

    Vector joint = Vector::Zero(2 * dim);
    joint.head(dim) = generated.vector();
    for (int interval = 2; interval <= 3; ++interval) {
      const double start = span * (interval - 1);
      with_interval_context(interval, [&] {
        for (int k = 1; k <= samples; ++k) {
          const double t_a = start + span * (k - 1) / samples;
          const double t_b = start + span * k / samples;
          joint = propagate(FieldState::pure(joint), t_a, t_b, joint_fn, prop).vector();
          branch.max_norm_error =
              std::max(branch.max_norm_error, std::abs(joint.squaredNorm() - 1.0));
          branch.rows.push_back(joint_sample_row(to_mcs(t_b, cfg), joint, ops));
        }
        const StateCheck chk = FieldState::density(reduced_field_density(joint, dim)).check(tol);
        if (chk.truncation_unsafe)
          throw TruncationError("tail population " + format_short(chk.tail_population));
        return 0;
      });
      if (interval == 3) break;

      // ground detection collapses the joint state; a fresh ground atom enters
      Vector field_part = joint.head(dim);
      const double p_ground = field_part.squaredNorm();
      if (p_ground < kProbabilityFloor)
        throw ImpossibleOutcomeError("fig1: ground detection probability vanished");
      field_part /= std::sqrt(p_ground);
      joint.setZero();
      joint.head(dim) = field_part;
    }
    return branch;
  };

  result.solid = run_branch(true);
  result.dashed = run_branch(false);
  return result;
}

Fig2Result run_fig2(const ExperimentConfig& cfg) {
  const PreparedField prepared = prepare_field(cfg);
  const FieldState& state = prepared.field.rotating;
  const ModeOperatorSet ops = make_mode_operators(state.dim());
  const Matrix q = quadrature_Q(ops, prepared.theta_X);

  Fig2Result result;
  result.theta_X = prepared.theta_X;
  result.mean_n = state.mean_n();
  result.mean_Q = expectation(state, q).real();
  result.mean_Q2 = expectation(state, (q * q).eval()).real();

  const std::vector<double> grid = make_tau_grid(cfg.fig2_tau_max, cfg.fig2_tau_points);
  const std::array<ScanVariant, 3> variants = {ScanVariant::Plain1Atom, ScanVariant::Rotated1Atom,
                                               ScanVariant::Rotated2Atom};
  for (std::size_t i = 0; i < variants.size(); ++i) {
    const TauScan scan =
        scan_probability(state, variants[i], prepared.theta_X, grid, ScanMode::Kraus);
    ProbabilityCurve curve;
    curve.variant = variants[i];
    curve.tau = grid;
    curve.exact = scan.prob;
    curve.series.reserve(grid.size());
    for (double tau : grid) {
      double series = 0.0;
      switch (variants[i]) {
        case ScanVariant::Plain1Atom:
          series = 1.0 - tau * tau * result.mean_n;
          break;
        case ScanVariant::Rotated1Atom:
          series = 0.5 * (1.0 + kSqrt2 * tau * result.mean_Q);
          break;
        case ScanVariant::Rotated2Atom:
          series = 0.25 * (1.0 + 2.0 * kSqrt2 * tau * result.mean_Q +
                           tau * tau * (2.0 * result.mean_Q2 - 1.0));
          break;
      }
      curve.series.push_back(series);
    }
    result.curves[i] = std::move(curve);
  }
  return result;
}

Eq27Result run_eq27(const ExperimentConfig& cfg) {
  const PreparedField prepared = prepare_field(cfg);
  const FieldState& state = prepared.field.rotating;
  const ModeOperatorSet ops = make_mode_operators(state.dim());
  const Matrix q = quadrature_Q(ops, prepared.theta_X);
  const std::vector<double> grid = make_tau_grid(cfg.tau_max, cfg.tau_points);

  Eq27Result result;
  result.theta_X = prepared.theta_X;
  result.mean_n = estimate_mean_n(
      scan_probability(state, ScanVariant::Plain1Atom, 0.0, grid, ScanMode::Kraus));
  result.mean_Q = estimate_Q_mean(
      scan_probability(state, ScanVariant::Rotated1Atom, prepared.theta_X, grid, ScanMode::Kraus));
  result.mean_Q2 = estimate_Q2(
      scan_probability(state, ScanVariant::Rotated2Atom, prepared.theta_X, grid, ScanMode::Kraus));
  result.exact_mean_n = state.mean_n();
  result.exact_mean_Q = expectation(state, q).real();
  result.exact_mean_Q2 = expectation(state, (q * q).eval()).real();
  result.within_bands = std::abs(result.mean_n.value - kReferenceMeanN) <= kReferenceBand &&
                        std::abs(result.mean_Q.value - kReferenceMeanQ) <= kReferenceBand &&
                        std::abs(result.mean_Q2.value - kReferenceQ2) <= kReferenceBand;
  return result;
}

ScanResult run_scan(const ExperimentConfig& cfg) {
  const PreparedField prepared = prepare_field(cfg);
  const FieldState& state = prepared.field.rotating;
  const std::vector<double> grid = make_tau_grid(cfg.tau_max, cfg.tau_points);
  const std::vector<double> angles = make_theta_grid(cfg.theta_points);

  ScanResult result;
  result.theta_X = prepared.theta_X;
  result.plain = scan_probability(state, ScanVariant::Plain1Atom, 0.0, grid, ScanMode::Kraus);
  result.rotated1 =
      scan_probability(state, ScanVariant::Rotated1Atom, prepared.theta_X, grid, ScanMode::Kraus);
  result.rotated2 =
      scan_probability(state, ScanVariant::Rotated2Atom, prepared.theta_X, grid, ScanMode::Kraus);
  result.witness_direct =
      squeezing_witness(state, angles, WitnessPipeline::Direct, cfg.squeeze_margin, grid);
  result.witness_estimated =
      squeezing_witness(state, angles, WitnessPipeline::ViaEstimators, cfg.squeeze_margin, grid);
  result.mean_n = estimate_mean_n(result.plain);
  result.mean_Q = estimate_Q_mean(result.rotated1);
  result.mean_Q2 = estimate_Q2(result.rotated2);
  return result;
}

McResult run_mc(const ExperimentConfig& cfg) {
  const PreparedField prepared = prepare_field(cfg);
  const FieldState& state = prepared.field.rotating;
  const std::vector<double> grid = make_tau_grid(cfg.tau_max, cfg.tau_points);

  McResult result;
  result.theta_X = prepared.theta_X;

  // independent streams per variant; grid points and repetitions split further inside
  RunConfig run = run_config_of(cfg);
  result.plain = run_protocol(run, grid, 0.0, ScanVariant::Plain1Atom);
  run.seed = cfg.seed + 1;
  result.rotated1 = run_protocol(run, grid, prepared.theta_X, ScanVariant::Rotated1Atom);
  run.seed = cfg.seed + 2;
  result.rotated2 = run_protocol(run, grid, prepared.theta_X, ScanVariant::Rotated2Atom);

  result.mean_n = estimate_mean_n(estimate_probabilities(result.plain));
  result.mean_Q = estimate_Q_mean(estimate_probabilities(result.rotated1));
  result.mean_Q2 = estimate_Q2(estimate_probabilities(result.rotated2));

  result.exact_mean_n = estimate_mean_n(
      scan_probability(state, ScanVariant::Plain1Atom, 0.0, grid, ScanMode::Kraus));
  result.exact_mean_Q = estimate_Q_mean(
      scan_probability(state, ScanVariant::Rotated1Atom, prepared.theta_X, grid, ScanMode::Kraus));
  result.exact_mean_Q2 = estimate_Q2(
      scan_probability(state, ScanVariant::Rotated2Atom, prepared.theta_X, grid, ScanMode::Kraus));
  return result;
}

// ---- emission ----

std::vector<std::string> write_fig1(const Fig1Result& result, const ExperimentConfig& cfg) {
  std::vector<std::string> paths;
  if (cfg.format == OutputFormat::Csv) {
    const std::string solid = output_path(cfg, "fig1_solid.csv");
    write_text_file(solid, branch_csv(result.solid, result, cfg, "solid"));
    paths.push_back(solid);
    const std::string dashed = output_path(cfg, "fig1_dashed.csv");
    write_text_file(dashed, branch_csv(result.dashed, result, cfg, "dashed"));
    paths.push_back(dashed);
    return paths;
  }
  json j = document_json("fig1", cfg);
  j["interval_mcs"] = result.interval_mcs;
  j["theta_squeezed"] = result.theta_squeezed;
  j["var_q_min_generated"] = result.var_q_min_generated;
  j["columns"] = {"t_mcs", "p_ground", "mean_n", "var_x", "var_p"};
  j["branches"]["solid"] = {{"dce_on_during_transits", true},
                            {"max_norm_error", result.solid.max_norm_error},
                            {"rows", rows_json(result.solid.rows)}};
  j["branches"]["dashed"] = {{"dce_on_during_transits", false},
                             {"max_norm_error", result.dashed.max_norm_error},
                             {"rows", rows_json(result.dashed.rows)}};
  const std::string path = output_path(cfg, "fig1.json");
  write_json_file(path, j);
  paths.push_back(path);
  return paths;
}

std::vector<std::string> write_fig2(const Fig2Result& result, const ExperimentConfig& cfg) {
  std::vector<std::string> paths;
  if (cfg.format == OutputFormat::Csv) {
    std::string out = csv_preamble("fig2", cfg);
    out += "# theta_X = " + format_double(result.theta_X) + "\n";
    out += "# mean_n = " + format_double(result.mean_n) + "\n";
    out += "# mean_Q = " + format_double(result.mean_Q) + "\n";
    out += "# mean_Q2 = " + format_double(result.mean_Q2) + "\n";
    out += "tau,plain_exact,plain_series,rotated1_exact,rotated1_series,rotated2_exact,"
           "rotated2_series\n";
    for (std::size_t i = 0; i < result.curves[0].tau.size(); ++i) {
      out += format_double(result.curves[0].tau[i]);
      for (const ProbabilityCurve& curve : result.curves)
        out += "," + format_double(curve.exact[i]) + "," + format_double(curve.series[i]);
      out += "\n";
    }
    const std::string path = output_path(cfg, "fig2.csv");
    write_text_file(path, out);
    paths.push_back(path);
    return paths;
  }
  json j = document_json("fig2", cfg);
  j["theta_X"] = result.theta_X;
  j["moments"] = {{"mean_n", result.mean_n}, {"mean_Q", result.mean_Q},
                  {"mean_Q2", result.mean_Q2}};
  j["curves"] = json::array();
  for (const ProbabilityCurve& curve : result.curves)
    j["curves"].push_back({{"variant", scan_variant_name(curve.variant)},
                           {"tau", curve.tau},
                           {"exact", curve.exact},
                           {"series", curve.series}});
  const std::string path = output_path(cfg, "fig2.json");
  write_json_file(path, j);
  paths.push_back(path);
  return paths;
}

std::vector<std::string> write_eq27(const Eq27Result& result, const ExperimentConfig& cfg) {
  std::vector<std::string> paths;
  if (cfg.format == OutputFormat::Csv) {
    std::string out = csv_preamble("eq27", cfg);
    out += "theta_X,mean_n,mean_n_err,mean_Q,mean_Q_err,mean_Q2,mean_Q2_err,"
           "exact_mean_n,exact_mean_Q,exact_mean_Q2,within_bands\n";
    out += format_double(result.theta_X) + "," + moment_csv(result.mean_n) + "," +
           moment_csv(result.mean_Q) + "," + moment_csv(result.mean_Q2) + "," +
           format_double(result.exact_mean_n) + "," + format_double(result.exact_mean_Q) + "," +
           format_double(result.exact_mean_Q2) + "," + (result.within_bands ? "1" : "0") + "\n";
    const std::string path = output_path(cfg, "eq27.csv");
    write_text_file(path, out);
    paths.push_back(path);
    return paths;
  }
  json j = document_json("eq27", cfg);
  j["theta_X"] = result.theta_X;
  j["estimates"] = {{"mean_n", moment_json(result.mean_n)},
                    {"mean_Q", moment_json(result.mean_Q)},
                    {"mean_Q2", moment_json(result.mean_Q2)}};
  j["exact"] = {{"mean_n", result.exact_mean_n},
                {"mean_Q", result.exact_mean_Q},
                {"mean_Q2", result.exact_mean_Q2}};
  j["bands"] = {{"mean_n", kReferenceMeanN},
                {"mean_Q", kReferenceMeanQ},
                {"mean_Q2", kReferenceQ2},
                {"half_width", kReferenceBand}};
  j["within_bands"] = result.within_bands;
  const std::string path = output_path(cfg, "eq27.json");
  write_json_file(path, j);
  paths.push_back(path);
  return paths;
}

std::vector<std::string> write_scan(const ScanResult& result, const ExperimentConfig& cfg) {
  std::vector<std::string> paths;
  if (cfg.format == OutputFormat::Csv) {
    std::string tau_out = csv_preamble("scan", cfg);
    tau_out += "# theta_X = " + format_double(result.theta_X) + "\n";
    tau_out += "# mean_n = " + moment_csv(result.mean_n) + "\n";
    tau_out += "# mean_Q = " + moment_csv(result.mean_Q) + "\n";
    tau_out += "# mean_Q2 = " + moment_csv(result.mean_Q2) + "\n";
    tau_out += "tau,p_plain,p_rotated1,p_rotated2\n";
    for (std::size_t i = 0; i < result.plain.tau.size(); ++i) {
      tau_out += format_double(result.plain.tau[i]) + "," + format_double(result.plain.prob[i]) +
                 "," + format_double(result.rotated1.prob[i]) + "," +
                 format_double(result.rotated2.prob[i]) + "\n";
    }
    const std::string tau_path = output_path(cfg, "scan_tau.csv");
    write_text_file(tau_path, tau_out);
    paths.push_back(tau_path);

    std::string theta_out = csv_preamble("scan", cfg);
    theta_out += "# min_variance_direct = " + format_double(result.witness_direct.min_variance) +
                 "\n";
    theta_out += "# theta_at_min_direct = " + format_double(result.witness_direct.theta_at_min) +
                 "\n";
    theta_out += "# squeezed_direct = " + std::string(result.witness_direct.squeezed ? "1" : "0") +
                 "\n";
    theta_out += "theta,var_direct,var_estimated\n";
    for (std::size_t i = 0; i < result.witness_direct.theta.size(); ++i) {
      theta_out += format_double(result.witness_direct.theta[i]) + "," +
                   format_double(result.witness_direct.variance_Q[i]) + "," +
                   format_double(result.witness_estimated.variance_Q[i]) + "\n";
    }
    const std::string theta_path = output_path(cfg, "scan_theta.csv");
    write_text_file(theta_path, theta_out);
    paths.push_back(theta_path);
    return paths;
  }
  json j = document_json("scan", cfg);
  j["theta_X"] = result.theta_X;
  j["scans"] = {scan_json(result.plain), scan_json(result.rotated1), scan_json(result.rotated2)};
  j["witness_direct"] = witness_json(result.witness_direct);
  j["witness_estimated"] = witness_json(result.witness_estimated);
  j["estimates"] = {{"mean_n", moment_json(result.mean_n)},
                    {"mean_Q", moment_json(result.mean_Q)},
                    {"mean_Q2", moment_json(result.mean_Q2)}};
  const std::string path = output_path(cfg, "scan.json");
  write_json_file(path, j);
  paths.push_back(path);
  return paths;
}

std::vector<std::string> write_mc(const McResult& result, const ExperimentConfig& cfg) {
  std::vector<std::string> paths;

  // raw click records always use the documented line format
  const std::array<std::pair<const char*, const ClickRecord*>, 3> records = {
      std::make_pair("mc_plain.clicks", &result.plain),
      std::make_pair("mc_rotated1.clicks", &result.rotated1),
      std::make_pair("mc_rotated2.clicks", &result.rotated2)};
  for (const auto& [name, record] : records) {
    const std::string path = output_path(cfg, name);
    write_text_file(path, click_record_text(*record));
    paths.push_back(path);
  }

  if (cfg.format == OutputFormat::Csv) {
    std::string out = csv_preamble("mc", cfg);
    out += "theta_X,mean_n,mean_n_err,mean_Q,mean_Q_err,mean_Q2,mean_Q2_err,"
           "exact_mean_n,exact_mean_n_err,exact_mean_Q,exact_mean_Q_err,"
           "exact_mean_Q2,exact_mean_Q2_err\n";
    out += format_double(result.theta_X) + "," + moment_csv(result.mean_n) + "," +
           moment_csv(result.mean_Q) + "," + moment_csv(result.mean_Q2) + "," +
           moment_csv(result.exact_mean_n) + "," + moment_csv(result.exact_mean_Q) + "," +
           moment_csv(result.exact_mean_Q2) + "\n";
    const std::string path = output_path(cfg, "mc_estimates.csv");
    write_text_file(path, out);
    paths.push_back(path);
    return paths;
  }
  json j = document_json("mc", cfg);
  j["theta_X"] = result.theta_X;
  j["estimates"] = {{"mean_n", moment_json(result.mean_n)},
                    {"mean_Q", moment_json(result.mean_Q)},
                    {"mean_Q2", moment_json(result.mean_Q2)}};
  j["exact_pipeline"] = {{"mean_n", moment_json(result.exact_mean_n)},
                         {"mean_Q", moment_json(result.exact_mean_Q)},
                         {"mean_Q2", moment_json(result.exact_mean_Q2)}};
  json summaries = json::array();
  for (const ClickRecord* record : {&result.plain, &result.rotated1, &result.rotated2}) {
    json s;
    s["variant"] = scan_variant_name(record->variant);
    s["theta"] = record->theta;
    json points = json::array();
    for (const PointSummary& p : record->summary)
      points.push_back({{"tau", p.tau},
                        {"repetitions", p.repetitions},
                        {"successes", p.successes}});
    s["points"] = points;
    summaries.push_back(s);
  }
  j["summaries"] = summaries;
  const std::string path = output_path(cfg, "mc_estimates.json");
  write_json_file(path, j);
  paths.push_back(path);
  return paths;
}

}  // namespace dce
