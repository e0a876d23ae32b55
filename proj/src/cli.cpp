#include "ogtt/cli.hpp"

#include "ogtt/analysis.hpp"
#include "ogtt/diagnostics.hpp"
#include "ogtt/fit.hpp"
#include "ogtt/io.hpp"
#include "ogtt/synth.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>

namespace ogtt {

namespace {

namespace fs = std::filesystem;

io::RunConfig base_config(const std::string& path) {
  return path.empty() ? io::RunConfig{} : io::load_config(path);
}

std::string resolve_out_dir(const io::RunConfig& cfg, const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv(kOutDirEnv); env != nullptr && *env != '\0') return env;
  return cfg.out_dir;
}

int run_fit(const std::string& obs_path, const std::string& config_path, const std::string& out_flag,
            std::ostream& out, std::ostream& err) {
  const io::RunConfig cfg = base_config(config_path);
  const ObservationSet obs = io::read_observations(obs_path);
  const fs::path out_dir = resolve_out_dir(cfg, out_flag);

  const Posterior posterior(cfg.fs, obs, cfg.priors_for(obs), cfg.solver);
  const PosteriorSample sample = fit(posterior, cfg.sampler);

  io::RunInfo info;
  info.seed = cfg.sampler.seed;
  info.n_draws = sample.size();
  info.acceptance_rate = sample.acceptance_rate;
  info.warnings = sample.warnings;
  if (sample.size() >= kMinDiagnosticDraws) {
    const ChainSummary diag = diagnostics(sample);
    info.iat = diag.iat;
    info.ess = diag.ess;
  }
  for (const auto& w : sample.warnings) err << "warning: " << w << "\n";

  const PredictiveBand band = predictive_band(sample, cfg.fs, cfg.band, cfg.solver);
  if (band.dropped > 0) {
    const std::string note = std::to_string(band.dropped) + " posterior curve(s) failed to simulate";
    info.warnings.push_back(note);
    err << "warning: " << note << "\n";
  }
  G3hOptions g3h = cfg.g3h;
  g3h.time = 3.0;
  g3h.seed = mix_seed(cfg.sampler.seed, 0x63);
  FitSummary summary = summarize(sample, cfg.cutoffs);
  summary.g_3h = predict_g3h(sample, cfg.fs, g3h, cfg.solver).summary(g3h.threshold);

  const io::OutputFiles files = io::write_outputs(sample, band, summary, out_dir, info, &obs);
  io::write_summary(out, summary, info);
  out << "\nwrote " << files.posterior.string() << ", " << files.band.string() << ", "
      << files.summary.string() << ", " << files.svg.string() << "\n";
  return 0;
}

int run_simulate(const PatientParams& p, const std::string& config_path, double t_end,
                 double grid_step, bool full, std::ostream& out) {
  const io::RunConfig cfg = base_config(config_path);
  SolverOptions solver = cfg.solver;
  if (full) solver.path = Integration::Full;
  const Trajectory traj = simulate(p, cfg.fs, t_end, grid_step, solver);
  out << "time_hr,G,I,L,D,V\n";
  for (Eigen::Index k = 0; k < traj.size(); ++k) {
    out << io::format_double(traj.times(k));
    for (Eigen::Index j = 0; j < 5; ++j) out << ',' << io::format_double(traj.states(k, j));
    out << '\n';
  }
  return 0;
}

synth::ExperimentConfig experiment_config(const io::RunConfig& cfg, std::size_t iterations,
                                          std::uint64_t seed) {
  synth::ExperimentConfig ex;
  ex.sampler = cfg.sampler;
  if (iterations > 0) {
    ex.sampler.n_iterations = iterations;
    ex.sampler.burn_in = iterations / 10;
  }
  ex.master_seed = seed;
  ex.solver = cfg.solver;
  return ex;
}

int run_sbc(int replicates, std::size_t iterations, std::uint64_t seed, const std::string& config_path,
            const std::string& out_flag, std::ostream& out) {
  const io::RunConfig cfg = base_config(config_path);
  PriorSpec spec = cfg.priors;
  spec.g0 = {cfg.g0_center.value_or(100.0), cfg.g0_sd.value_or(2.0 * cfg.fs.sigma)};
  synth::SbcConfig sbc_cfg;
  sbc_cfg.experiment = experiment_config(cfg, iterations, seed);

  out << "seed: " << seed << "\n";
  const synth::SbcReport report =
      synth::sbc(spec, cfg.fs, synth::default_schedule(), replicates, sbc_cfg);
  out << "replicates: " << report.n_replicates << " (failed " << report.failures << ")\n";
  out << std::setprecision(4);
  for (std::size_t j = 0; j < 4; ++j)
    out << kParamNames[j] << ": chi2 = " << report.uniformity[j].statistic
        << ", p = " << report.uniformity[j].p_value << "\n";

  if (!out_flag.empty() || std::getenv(kOutDirEnv) != nullptr) {
    const fs::path dir = resolve_out_dir(cfg, out_flag);
    fs::create_directories(dir);
    std::ofstream csv(dir / "sbc_ranks.csv");
    if (!csv) throw io::IoError("cannot write " + (dir / "sbc_ranks.csv").string());
    csv << "theta0,theta1,theta2,g0\n";
    for (Eigen::Index k = 0; k < report.ranks.rows(); ++k)
      csv << report.ranks(k, 0) << ',' << report.ranks(k, 1) << ',' << report.ranks(k, 2) << ','
          << report.ranks(k, 3) << '\n';
    out << "wrote " << (dir / "sbc_ranks.csv").string() << "\n";
  }
  return 0;
}

int run_recover(const std::string& profile, int replicates, std::size_t iterations, std::uint64_t seed,
                const std::string& config_path, std::ostream& out) {
  const io::RunConfig cfg = base_config(config_path);
  const PatientParams truth = profile == "resistant" ? synth::insulin_resistant() : synth::healthy();
  out << "seed: " << seed << "\n";
  const synth::RecoveryReport report = synth::recovery_experiment(
      truth, cfg.fs, synth::default_schedule(), replicates, experiment_config(cfg, iterations, seed));
  out << "profile: " << profile << ", replicates: " << report.n_replicates << " (failed "
      << report.failures << ")\n";
  const Eigen::Vector4d t = truth.to_vector();
  const Eigen::Array4d ratio = report.mean_sd_ratio();
  out << std::setprecision(4);
  for (Eigen::Index j = 0; j < 4; ++j)
    out << kParamNames[static_cast<std::size_t>(j)] << ": truth " << t(j) << ", 95% coverage "
        << report.coverage(j) << ", mean posterior/prior sd " << ratio(j) << "\n";
  return 0;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bayesian OGTT minimal-model fitting"};
  app.require_subcommand(1);

  std::string obs_path, config_path, out_dir;
  auto* fit_cmd = app.add_subcommand("fit", "sample the posterior for one OGTT and write outputs");
  fit_cmd->add_option("observations", obs_path, "CSV with header time_hr,glucose_mg_dl")->required();
  fit_cmd->add_option("--config", config_path, "key = value config file");
  fit_cmd->add_option("--out", out_dir, "output directory");

  PatientParams p;
  double t_end = 3.0, grid_step = 0.05;
  bool full = false;
  auto* sim_cmd = app.add_subcommand("simulate", "forward trajectory as CSV on stdout");
  sim_cmd->add_option("--theta0", p.theta0)->required();
  sim_cmd->add_option("--theta1", p.theta1)->required();
  sim_cmd->add_option("--theta2", p.theta2)->required();
  sim_cmd->add_option("--g0", p.g0)->required();
  sim_cmd->add_option("--t-end", t_end, "hours")->capture_default_str();
  sim_cmd->add_option("--grid-step", grid_step, "hours")->capture_default_str();
  sim_cmd->add_flag("--full", full, "integrate all five equations numerically");
  sim_cmd->add_option("--config", config_path);

  int replicates = 0;
  std::size_t iterations = 0;
  std::uint64_t seed = 1;
  auto* sbc_cmd = app.add_subcommand("sbc", "simulation-based calibration");
  sbc_cmd->add_option("--replicates", replicates)->capture_default_str();
  sbc_cmd->add_option("--iterations", iterations, "t-walk iterations per replicate");
  sbc_cmd->add_option("--seed", seed)->capture_default_str();
  sbc_cmd->add_option("--config", config_path);
  sbc_cmd->add_option("--out", out_dir);

  std::string profile = "healthy";
  auto* rec_cmd = app.add_subcommand("recover", "parameter-recovery coverage experiment");
  rec_cmd->add_option("--profile", profile)->check(CLI::IsMember({"healthy", "resistant"}))->capture_default_str();
  rec_cmd->add_option("--replicates", replicates);
  rec_cmd->add_option("--iterations", iterations, "t-walk iterations per replicate");
  rec_cmd->add_option("--seed", seed)->capture_default_str();
  rec_cmd->add_option("--config", config_path);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (fit_cmd->parsed()) return run_fit(obs_path, config_path, out_dir, out, err);
    if (sim_cmd->parsed()) return run_simulate(p, config_path, t_end, grid_step, full, out);
    if (sbc_cmd->parsed())
      return run_sbc(replicates > 0 ? replicates : 100, iterations, seed, config_path, out_dir, out);
    if (rec_cmd->parsed())
      return run_recover(profile, replicates > 0 ? replicates : 50, iterations, seed, config_path, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}

}  // namespace ogtt
