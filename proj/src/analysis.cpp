#include "ogtt/analysis.hpp"

#include "ogtt/random.hpp"
#include "ogtt/stats.hpp"

#include <sstream>

namespace ogtt {

namespace {

void require_draws(const PosteriorSample& sample) {
  if (sample.size() == 0) throw AnalysisError("posterior sample is empty");
  if (sample.dim() != PatientParams::kDim)
    throw AnalysisError("posterior sample must have 4 columns (theta0, theta1, theta2, g0)");
}

void check_dropped(Eigen::Index dropped, Eigen::Index total) {
  if (static_cast<double>(dropped) > 0.01 * static_cast<double>(total)) {
    std::ostringstream msg;
    msg << dropped << " of " << total << " posterior draws failed to simulate (> 1%)";
    throw AnalysisError(msg.str());
  }
}

}  // namespace

std::vector<Eigen::Index> thinned_indices(Eigen::Index n, Eigen::Index max_count) {
  const Eigen::Index m = std::min(n, std::max<Eigen::Index>(max_count, 1));
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(m));
  for (Eigen::Index k = 0; k < m; ++k) idx[static_cast<std::size_t>(k)] = (k * n) / m;
  return idx;
}

PredictiveBand predictive_band(const PosteriorSample& sample, const FixedSettings& fs,
                               const BandOptions& opts, const SolverOptions& solver) {
  require_draws(sample);
  if (!(opts.horizon > 0.0) || !(opts.grid_step > 0.0))
    throw std::invalid_argument("predictive_band: horizon and grid_step must be > 0");

  const auto picks = thinned_indices(sample.size(), opts.max_curves);
  PredictiveBand band;
  std::vector<Eigen::VectorXd> curves;
  curves.reserve(picks.size());
  for (Eigen::Index row : picks) {
    const PatientParams p = PatientParams::from_vector(sample.draws.row(row).transpose());
    try {
      Trajectory traj = simulate(p, fs, opts.horizon, opts.grid_step, solver);
      if (band.times.size() == 0) band.times = traj.times;
      curves.push_back(traj.glucose());
    } catch (const IntegrationError&) {
      ++band.dropped;
    }
  }
  check_dropped(band.dropped, static_cast<Eigen::Index>(picks.size()));
  if (curves.empty()) throw AnalysisError("no posterior draw could be simulated");

  const Eigen::Index n_times = band.times.size();
  band.curves.resize(static_cast<Eigen::Index>(curves.size()), n_times);
  for (std::size_t k = 0; k < curves.size(); ++k)
    band.curves.row(static_cast<Eigen::Index>(k)) = curves[k].transpose();

  band.mean = band.curves.colwise().mean().transpose();
  band.quantiles.resize(n_times, 5);
  for (Eigen::Index t = 0; t < n_times; ++t)
    band.quantiles.row(t) = stats::quantiles(band.curves.col(t), kBandLevels).transpose();
  return band;
}

double G3hPrediction::probability_above(double threshold) const {
  if (predictive.size() == 0) return 0.0;
  return static_cast<double>((predictive.array() > threshold).count()) /
         static_cast<double>(predictive.size());
}

G3hSummary G3hPrediction::summary(double threshold) const {
  G3hSummary s;
  s.time = time;
  s.n = predictive.size();
  s.latent_mean = latent.mean();
  s.mean = predictive.mean();
  s.lo = stats::quantile(predictive, 0.025);
  s.hi = stats::quantile(predictive, 0.975);
  s.threshold = threshold;
  s.prob_above = probability_above(threshold);
  return s;
}

G3hPrediction predict_g3h(const PosteriorSample& sample, const FixedSettings& fs,
                          const G3hOptions& opts, const SolverOptions& solver) {
  require_draws(sample);
  const auto picks = thinned_indices(sample.size(), opts.max_draws);
  const double at[] = {opts.time};
  Rng rng(opts.seed);

  std::vector<double> latent;
  latent.reserve(picks.size());
  Eigen::Index dropped = 0;
  for (Eigen::Index row : picks) {
    const PatientParams p = PatientParams::from_vector(sample.draws.row(row).transpose());
    try {
      latent.push_back(glucose_at(p, fs, at, solver)(0));
    } catch (const IntegrationError&) {
      ++dropped;
    }
  }
  check_dropped(dropped, static_cast<Eigen::Index>(picks.size()));
  if (latent.empty()) throw AnalysisError("no posterior draw could be simulated");

  G3hPrediction out;
  out.time = opts.time;
  out.latent = Eigen::Map<const Eigen::VectorXd>(latent.data(), static_cast<Eigen::Index>(latent.size()));
  out.predictive.resize(out.latent.size());
  for (Eigen::Index k = 0; k < out.latent.size(); ++k)
    out.predictive(k) = out.latent(k) + fs.sigma * standard_normal(rng);
  return out;
}

std::string to_string(Theta0Flag flag) {
  switch (flag) {
    case Theta0Flag::Low: return "low";
    case Theta0Flag::Normal: return "normal";
    case Theta0Flag::High: return "high";
  }
  return "unknown";
}

FitSummary summarize(const PosteriorSample& sample, const Theta0Cutoffs& cutoffs) {
  require_draws(sample);
  FitSummary out;
  out.cutoffs = cutoffs;
  static constexpr double kLevels[] = {0.025, 0.5, 0.975};
  for (Eigen::Index j = 0; j < PatientParams::kDim; ++j) {
    const auto col = sample.draws.col(j);
    const Eigen::VectorXd q = stats::quantiles(col, kLevels);
    auto& s = out.params[static_cast<std::size_t>(j)];
    s.mean = col.mean();
    s.sd = stats::sample_sd(col);
    s.lo = q(0);
    s.median = q(1);
    s.hi = q(2);
  }
  const double median = out.params[0].median;
  out.theta0_flag = median < cutoffs.low    ? Theta0Flag::Low
                    : median > cutoffs.high ? Theta0Flag::High
                                            : Theta0Flag::Normal;
  return out;
}

}  // namespace ogtt
