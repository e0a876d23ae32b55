// Posterior summaries: predictive glucose bands, the 3 h glucose
// prediction, and per-parameter summaries with the theta0 flag.
#ifndef OGTT_ANALYSIS_HPP
#define OGTT_ANALYSIS_HPP

#include "ogtt/model.hpp"
#include "ogtt/twalk.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ogtt {

inline constexpr std::array<double, 5> kBandLevels = {0.05, 0.25, 0.50, 0.75, 0.95};

class AnalysisError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Latent (noise-free) glucose band over [0, horizon].
struct PredictiveBand {
  Eigen::VectorXd times;
  Eigen::Matrix<double, Eigen::Dynamic, 5> quantiles;  ///< columns follow kBandLevels
  Eigen::VectorXd mean;
  Eigen::MatrixXd curves;  ///< one simulated curve per row
  Eigen::Index dropped = 0;
};

struct BandOptions {
  double horizon = 3.0;
  double grid_step = 0.05;
  Eigen::Index max_curves = 1000;
};

/// Row indices floor(k n / m), k = 0..m-1: m evenly spaced picks out of n.
std::vector<Eigen::Index> thinned_indices(Eigen::Index n, Eigen::Index max_count);

/// Simulates every retained draw on the grid and takes pointwise quantiles.
/// Draws whose simulation fails are dropped and counted; more than 1%
/// dropped raises AnalysisError.
PredictiveBand predictive_band(const PosteriorSample& sample, const FixedSettings& fs,
                               const BandOptions& opts = {}, const SolverOptions& solver = {});

struct G3hOptions {
  double time = 3.0;
  double threshold = 120.0;
  Eigen::Index max_draws = 4000;
  std::uint64_t seed = 7;
};

struct G3hSummary {
  double time = 3.0;
  double latent_mean = 0.0;  ///< mean of G(time) before observation noise
  double mean = 0.0;         ///< with N(0, sigma) noise
  double lo = 0.0;           ///< 2.5% predictive quantile
  double hi = 0.0;           ///< 97.5% predictive quantile
  double threshold = 120.0;
  double prob_above = 0.0;   ///< P[G(time) + e > threshold]
  Eigen::Index n = 0;
};

struct G3hPrediction {
  double time = 3.0;
  Eigen::VectorXd latent;      ///< G(time) per retained draw
  Eigen::VectorXd predictive;  ///< latent + N(0, sigma)

  double probability_above(double threshold) const;
  G3hSummary summary(double threshold) const;
};

G3hPrediction predict_g3h(const PosteriorSample& sample, const FixedSettings& fs,
                          const G3hOptions& opts = {}, const SolverOptions& solver = {});

struct ParamSummary {
  double mean = 0.0;
  double sd = 0.0;
  double median = 0.0;
  double lo = 0.0;  ///< 2.5% quantile
  double hi = 0.0;  ///< 97.5% quantile
};

enum class Theta0Flag { Low, Normal, High };
std::string to_string(Theta0Flag flag);

/// Artifact defaults, not clinical thresholds.
struct Theta0Cutoffs {
  double low = 1.0;
  double high = 4.0;
};

inline constexpr std::array<const char*, 4> kParamNames = {"theta0", "theta1", "theta2", "g0"};

struct FitSummary {
  std::array<ParamSummary, 4> params;
  Theta0Cutoffs cutoffs;
  Theta0Flag theta0_flag = Theta0Flag::Normal;
  std::optional<G3hSummary> g_3h;
};

/// Moments and central 95% intervals per coordinate; theta0 is flagged by
/// comparing its posterior median with the cutoffs.
FitSummary summarize(const PosteriorSample& sample, const Theta0Cutoffs& cutoffs = {});

}  // namespace ogtt

#endif  // OGTT_ANALYSIS_HPP
