// Synthetic OGTT patients and the validation experiments built on them:
// parameter recovery (interval coverage) and simulation-based calibration.
#ifndef OGTT_SYNTH_HPP
#define OGTT_SYNTH_HPP

#include "ogtt/inference.hpp"
#include "ogtt/stats.hpp"
#include "ogtt/twalk.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace ogtt::synth {

/// theta0 = 2, theta1 = 0.5, theta2 = 0.5, g0 = 100. theta1 is an artifact
/// choice; no reference value exists for it.
PatientParams healthy();
/// As healthy() but theta0 = 0.5.
PatientParams insulin_resistant();

/// Readings at 0, 0.5, 1 and 2 hr.
Eigen::VectorXd default_schedule();

inline constexpr double kReadingFloor = 1.0;

struct SynthPatient {
  PatientParams truth;
  FixedSettings fs;
  Eigen::VectorXd schedule;
  std::uint64_t seed = 0;
  Eigen::VectorXd noiseless;  ///< G_truth at the schedule
  ObservationSet obs;
  Eigen::Index clipped = 0;   ///< readings raised to kReadingFloor
};

/// d_i = G_truth(t_i) + N(0, sigma), floored at 1 mg/dL. fs.sigma may be 0.
SynthPatient generate(const PatientParams& truth, const FixedSettings& fs,
                      const Eigen::VectorXd& schedule, std::uint64_t seed,
                      const SolverOptions& solver = {});

/// Builds the log-density to sample for one replicate. Production code uses
/// default_target; tests can inject deliberately broken targets.
using TargetFactory =
    std::function<LogDensity(const ObservationSet&, const PriorSpec&, const FixedSettings&)>;

LogDensity default_target(const ObservationSet& obs, const PriorSpec& spec, const FixedSettings& fs);

struct ExperimentConfig {
  /// Template for every replicate; the seed and init points are replaced.
  SamplerConfig sampler;
  std::uint64_t master_seed = 1;
  SolverOptions solver;
};

struct RecoveryReport {
  PatientParams truth;
  int n_replicates = 0;
  int failures = 0;
  std::vector<std::string> failure_messages;
  Eigen::Array4d coverage = Eigen::Array4d::Zero();  ///< fraction of fits whose 95% interval holds the truth
  Eigen::MatrixXd medians;  ///< successful replicates x 4
  Eigen::MatrixXd sds;
  Eigen::MatrixXd lo;
  Eigen::MatrixXd hi;
  Eigen::Array4d prior_sd = Eigen::Array4d::Zero();

  /// Mean over replicates of posterior SD / prior SD.
  Eigen::Array4d mean_sd_ratio() const;
};

/// Repeats generate -> fit with g0 prior centred on each replicate's d_0.
RecoveryReport recovery_experiment(const PatientParams& truth, const FixedSettings& fs,
                                   const Eigen::VectorXd& schedule, int n_replicates,
                                   const ExperimentConfig& cfg);

struct SbcConfig {
  ExperimentConfig experiment;
  Eigen::Index rank_draws = 99;  ///< L; ranks fall in 0..L
  Eigen::Index bins = 10;        ///< must divide L + 1
};

struct SbcReport {
  int n_replicates = 0;
  int failures = 0;
  std::vector<std::string> failure_messages;
  Eigen::Index rank_draws = 0;
  Eigen::MatrixXi ranks;        ///< successful replicates x 4
  Eigen::MatrixXd histograms;   ///< 4 x bins
  std::array<stats::UniformityTest, 4> uniformity;
};

/// For each replicate: truth ~ prior, data ~ model, fit with the same prior,
/// rank the truth among L evenly spaced kept draws. Uses a fixed g0 prior
/// (the one in `spec`) since a data-centred prior would break calibration.
SbcReport sbc(const PriorSpec& spec, const FixedSettings& fs, const Eigen::VectorXd& schedule,
              int n_replicates, const SbcConfig& cfg,
              const TargetFactory& make_target = default_target);

}  // namespace ogtt::synth

#endif  // OGTT_SYNTH_HPP
