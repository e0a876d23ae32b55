#include "ogtt/synth.hpp"

#include "ogtt/analysis.hpp"
#include "ogtt/fit.hpp"
#include "ogtt/random.hpp"

#include <algorithm>

namespace ogtt::synth {

namespace {

constexpr Eigen::Index kPriorSdDraws = 20000;

Eigen::Array4d prior_sds(const PriorSpec& spec) {
  Rng rng(mix_seed(0x5D));
  Eigen::MatrixXd draws(kPriorSdDraws, 4);
  for (Eigen::Index k = 0; k < kPriorSdDraws; ++k)
    draws.row(k) = sample_prior(spec, rng).to_vector().transpose();
  Eigen::Array4d sd;
  for (Eigen::Index j = 0; j < 4; ++j) sd(j) = stats::sample_sd(draws.col(j));
  return sd;
}

SamplerConfig replicate_sampler(const ExperimentConfig& cfg, std::uint64_t replicate_seed) {
  SamplerConfig s = cfg.sampler;
  s.seed = mix_seed(replicate_seed, 2);
  s.init_x.resize(0);
  s.init_xp.resize(0);
  return s;
}

}  // namespace

PatientParams healthy() { return {2.0, 0.5, 0.5, 100.0}; }

PatientParams insulin_resistant() { return {0.5, 0.5, 0.5, 100.0}; }

Eigen::VectorXd default_schedule() { return Eigen::Vector4d(0.0, 0.5, 1.0, 2.0); }

SynthPatient generate(const PatientParams& truth, const FixedSettings& fs,
                      const Eigen::VectorXd& schedule, std::uint64_t seed,
                      const SolverOptions& solver) {
  fs.validate(true);
  const Eigen::VectorXd curve = glucose_at(truth, fs, schedule, solver);
  Rng rng(seed);
  Eigen::VectorXd readings(curve.size());
  Eigen::Index clipped = 0;
  for (Eigen::Index i = 0; i < curve.size(); ++i) {
    readings(i) = curve(i) + fs.sigma * standard_normal(rng);
    if (readings(i) < kReadingFloor) {
      readings(i) = kReadingFloor;
      ++clipped;
    }
  }
  return SynthPatient{truth, fs, schedule, seed, curve, ObservationSet(schedule, readings), clipped};
}

LogDensity default_target(const ObservationSet& obs, const PriorSpec& spec, const FixedSettings& fs) {
  return Posterior(fs, obs, spec);
}

Eigen::Array4d RecoveryReport::mean_sd_ratio() const {
  if (sds.rows() == 0) return Eigen::Array4d::Constant(std::numeric_limits<double>::quiet_NaN());
  return sds.colwise().mean().transpose().array() / prior_sd;
}

RecoveryReport recovery_experiment(const PatientParams& truth, const FixedSettings& fs,
                                   const Eigen::VectorXd& schedule, int n_replicates,
                                   const ExperimentConfig& cfg) {
  if (n_replicates < 20) throw std::invalid_argument("recovery_experiment: need >= 20 replicates");
  RecoveryReport report;
  report.truth = truth;
  report.n_replicates = n_replicates;

  std::vector<Eigen::Vector4d> medians, sds, los, his;
  const Eigen::Vector4d t = truth.to_vector();
  Eigen::Array4d covered = Eigen::Array4d::Zero();

  for (int r = 0; r < n_replicates; ++r) {
    const std::uint64_t seed = mix_seed(cfg.master_seed, static_cast<std::uint64_t>(r));
    try {
      const SynthPatient patient = generate(truth, fs, schedule, mix_seed(seed, 1), cfg.solver);
      const Posterior posterior(fs, patient.obs, PriorSpec::for_observations(patient.obs, fs), cfg.solver);
      const PosteriorSample sample = fit(posterior, replicate_sampler(cfg, seed));
      const FitSummary summary = summarize(sample);
      Eigen::Vector4d med, sd, lo, hi;
      for (Eigen::Index j = 0; j < 4; ++j) {
        const auto& s = summary.params[static_cast<std::size_t>(j)];
        med(j) = s.median;
        sd(j) = s.sd;
        lo(j) = s.lo;
        hi(j) = s.hi;
        if (lo(j) <= t(j) && t(j) <= hi(j)) covered(j) += 1.0;
      }
      medians.push_back(med);
      sds.push_back(sd);
      los.push_back(lo);
      his.push_back(hi);
    } catch (const std::exception& e) {
      ++report.failures;
      report.failure_messages.push_back("replicate " + std::to_string(r) + ": " + e.what());
    }
  }

  const auto ok = static_cast<Eigen::Index>(medians.size());
  auto stack = [ok](const std::vector<Eigen::Vector4d>& rows) {
    Eigen::MatrixXd m(ok, 4);
    for (Eigen::Index k = 0; k < ok; ++k) m.row(k) = rows[static_cast<std::size_t>(k)].transpose();
    return m;
  };
  report.medians = stack(medians);
  report.sds = stack(sds);
  report.lo = stack(los);
  report.hi = stack(his);
  if (ok > 0) report.coverage = covered / static_cast<double>(ok);
  report.prior_sd = prior_sds(PriorSpec{});
  return report;
}

SbcReport sbc(const PriorSpec& spec, const FixedSettings& fs, const Eigen::VectorXd& schedule,
              int n_replicates, const SbcConfig& cfg, const TargetFactory& make_target) {
  if (n_replicates < 100) throw std::invalid_argument("sbc: need >= 100 replicates");
  if (cfg.rank_draws < 1 || cfg.bins < 2 || (cfg.rank_draws + 1) % cfg.bins != 0)
    throw std::invalid_argument("sbc: bins must divide rank_draws + 1");
  spec.validate();

  SbcReport report;
  report.n_replicates = n_replicates;
  report.rank_draws = cfg.rank_draws;
  std::vector<Eigen::Vector4i> ranks;

  for (int r = 0; r < n_replicates; ++r) {
    const std::uint64_t seed = mix_seed(cfg.experiment.master_seed, static_cast<std::uint64_t>(r));
    try {
      Rng truth_rng(mix_seed(seed, 3));
      const PatientParams truth = sample_prior(spec, truth_rng);
      const SynthPatient patient = generate(truth, fs, schedule, mix_seed(seed, 1), cfg.experiment.solver);
      const LogDensity target = make_target(patient.obs, spec, fs);
      const PosteriorSample sample = fit(target, spec, replicate_sampler(cfg.experiment, seed));
      if (sample.size() < cfg.rank_draws)
        throw std::invalid_argument("sbc: fewer kept draws than rank_draws");

      const auto picks = thinned_indices(sample.size(), cfg.rank_draws);
      const Eigen::Vector4d t = truth.to_vector();
      Eigen::Vector4i rank = Eigen::Vector4i::Zero();
      for (Eigen::Index row : picks)
        for (Eigen::Index j = 0; j < 4; ++j)
          if (sample.draws(row, j) < t(j)) ++rank(j);
      ranks.push_back(rank);
    } catch (const std::exception& e) {
      ++report.failures;
      report.failure_messages.push_back("replicate " + std::to_string(r) + ": " + e.what());
    }
  }

  const auto ok = static_cast<Eigen::Index>(ranks.size());
  report.ranks.resize(ok, 4);
  for (Eigen::Index k = 0; k < ok; ++k) report.ranks.row(k) = ranks[static_cast<std::size_t>(k)].transpose();

  const Eigen::Index per_bin = (cfg.rank_draws + 1) / cfg.bins;
  report.histograms = Eigen::MatrixXd::Zero(4, cfg.bins);
  for (Eigen::Index k = 0; k < ok; ++k)
    for (Eigen::Index j = 0; j < 4; ++j) report.histograms(j, report.ranks(k, j) / per_bin) += 1.0;
  if (ok > 0)
    for (Eigen::Index j = 0; j < 4; ++j)
      report.uniformity[static_cast<std::size_t>(j)] =
          stats::chi_square_uniform(report.histograms.row(j).transpose());
  return report;
}

}  // namespace ogtt::synth
