// The t-walk: a self-adjusting, derivative-free MCMC kernel that moves a
// pair of points (x, x') through the product target pi(x) pi(x'). Each
// iteration picks one of the pair, then one of four moves:
//
//   traverse  h = x' + beta (x' - x)      beta ~ density prop. to beta^(at-1) / beta^(-at-1)
//   walk      h = x + (x - x') z          z   ~ density prop. to 1/sqrt(1 + z) on [-aw/(1+aw), aw]
//   blow      h = x' + s N(0, I)          s = max |x' - x|
//   hop       h = x + (s / 3) N(0, I)     s = max |x' - x|
//
// restricted to a random subset of coordinates. The move probabilities and
// the constants at = 6, aw = 1.5 are the published defaults and are not
// exposed for tuning. Only the x half of the pair is reported.
#ifndef OGTT_TWALK_HPP
#define OGTT_TWALK_HPP

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ogtt {

/// Log-density on R^n; -inf marks points outside the support.
using LogDensity = std::function<double(const Eigen::VectorXd&)>;

struct SamplerConfig {
  std::size_t n_iterations = 200000;
  std::size_t burn_in = 20000;
  std::size_t thin = 1;
  std::uint64_t seed = 20160101;
  Eigen::VectorXd init_x;
  Eigen::VectorXd init_xp;

  /// Kept draws: floor((n_iterations - burn_in) / thin).
  std::size_t n_kept() const { return (n_iterations - burn_in) / thin; }

  /// Structural checks only (counts, dimensions, distinct init points).
  void validate() const;
};

struct PosteriorSample {
  Eigen::MatrixXd draws;    ///< n_kept x dim
  Eigen::VectorXd logpost;  ///< one per draw
  double acceptance_rate = 0.0;
  Eigen::VectorXd iat;      ///< per coordinate; NaN when the chain is too short
  std::vector<std::string> warnings;

  Eigen::Index size() const { return draws.rows(); }
  Eigen::Index dim() const { return draws.cols(); }
};

class SamplerError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Runs the t-walk on `target`. Deterministic for a fixed config.
/// Throws SamplerError if either initial point has non-finite density.
/// Sustained acceptance below 1% is recorded in `warnings`, not thrown.
PosteriorSample run_twalk(const LogDensity& target, const SamplerConfig& cfg);

}  // namespace ogtt

#endif  // OGTT_TWALK_HPP
