// Unnormalized log-posterior for one OGTT: Gaussian readings around the
// model curve, Gamma priors on theta0 and theta1, a truncated Gamma on
// theta2 and a positive-truncated Normal on g0.
#ifndef OGTT_INFERENCE_HPP
#define OGTT_INFERENCE_HPP

#include "ogtt/model.hpp"
#include "ogtt/random.hpp"

#include <functional>
#include <limits>
#include <string_view>

namespace ogtt {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// OGTT readings (t_i hr, d_i mg/dL). Constructed only in a valid state:
/// n >= 2, t_0 >= 0, times strictly increasing, readings > 0.
class ObservationSet {
 public:
  ObservationSet(Eigen::VectorXd times, Eigen::VectorXd glucose);

  const Eigen::VectorXd& times() const { return times_; }
  const Eigen::VectorXd& glucose() const { return glucose_; }
  Eigen::Index size() const { return times_.size(); }

 private:
  Eigen::VectorXd times_;
  Eigen::VectorXd glucose_;
};

struct GammaPrior {
  double shape;
  double rate;
  double mean() const { return shape / rate; }
  double sd() const { return std::sqrt(shape) / rate; }
  /// Normalized log-density; -inf for x <= 0.
  double log_density(double x) const;
};

/// Gamma restricted to [lo, hi] and renormalized by the mass it keeps.
struct TruncatedGammaPrior {
  double shape;
  double rate;
  double lo;
  double hi;
  double log_density(double x) const;
  double log_mass() const;
};

/// Normal(center, sd) restricted to (0, inf) and renormalized.
struct PositiveNormalPrior {
  double center;
  double sd;
  double log_density(double x) const;
};

struct PriorSpec {
  GammaPrior theta0{2.0, 0.25};
  GammaPrior theta1{2.0, 0.25};
  TruncatedGammaPrior theta2{10.0, 20.0, 1.0 / 6.0, 2.0};
  PositiveNormalPrior g0{100.0, 10.0};

  /// Default priors with the g0 prior centred on the fasting reading d_0
  /// and sd = 2 sigma.
  static PriorSpec for_observations(const ObservationSet& obs, const FixedSettings& fs);

  void validate() const;
};

/// Sum of the four normalized prior log-densities; -inf outside the support.
double log_prior(const PatientParams& p, const PriorSpec& spec);

/// One independent draw from the prior (theta2 by rejection into [lo, hi],
/// g0 by rejection into (0, inf)).
PatientParams sample_prior(const PriorSpec& spec, Rng& rng);

/// Receives one-line notes about evaluations that fell back to -inf.
using DiagnosticSink = std::function<void(std::string_view)>;

/// Gaussian log-likelihood including -(n/2) log(2 pi sigma^2). Failed or
/// inadmissible simulations give -inf.
double log_likelihood(const PatientParams& p, const FixedSettings& fs, const ObservationSet& obs,
                      const SolverOptions& opts = {}, const DiagnosticSink& sink = {});

double log_posterior(const PatientParams& p, const FixedSettings& fs, const ObservationSet& obs,
                     const PriorSpec& spec, const SolverOptions& opts = {},
                     const DiagnosticSink& sink = {});

/// Callable bundle of everything log_posterior needs. Copyable and
/// immutable, so it can be handed to a sampler running on any thread.
class Posterior {
 public:
  Posterior(FixedSettings fs, ObservationSet obs, PriorSpec spec, SolverOptions opts = {});

  double operator()(const Eigen::VectorXd& x) const;
  double log_prior(const Eigen::VectorXd& x) const;
  double log_likelihood(const Eigen::VectorXd& x) const;

  const FixedSettings& settings() const { return fs_; }
  const ObservationSet& observations() const { return obs_; }
  const PriorSpec& priors() const { return spec_; }
  const SolverOptions& solver() const { return opts_; }

 private:
  FixedSettings fs_;
  ObservationSet obs_;
  PriorSpec spec_;
  SolverOptions opts_;
};

}  // namespace ogtt

#endif  // OGTT_INFERENCE_HPP
