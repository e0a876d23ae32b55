// Chain diagnostics: integrated autocorrelation time (IAT) and effective
// sample size.
#ifndef OGTT_DIAGNOSTICS_HPP
#define OGTT_DIAGNOSTICS_HPP

#include "ogtt/twalk.hpp"

#include <Eigen/Dense>

namespace ogtt {

inline constexpr Eigen::Index kMinDiagnosticDraws = 100;

/// Normalized autocorrelation function rho_0..rho_{n-1} computed by FFT.
/// Returns all zeros except rho_0 = 1 for an exactly constant series.
Eigen::VectorXd autocorrelation(const Eigen::Ref<const Eigen::VectorXd>& series);

/// IAT via Sokal's self-consistent window: tau(M) = 1 + 2 sum_{k<=M} rho_k
/// with the smallest M >= 5 tau(M). Clamped to >= 1. A series with zero
/// variance has no meaningful IAT; +inf is returned as the sentinel.
double integrated_autocorrelation_time(const Eigen::Ref<const Eigen::VectorXd>& series);

struct ChainSummary {
  double acceptance_rate = 0.0;
  Eigen::VectorXd iat;
  Eigen::VectorXd ess;
  /// True for coordinates whose IAT is the divergence sentinel.
  Eigen::Array<bool, Eigen::Dynamic, 1> degenerate;
};

class InsufficientDrawsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Throws InsufficientDrawsError below kMinDiagnosticDraws kept draws.
ChainSummary diagnostics(const PosteriorSample& sample);

/// Thinning interval that leaves roughly independent draws: ceil(max IAT).
std::size_t suggested_thin(const ChainSummary& summary);

}  // namespace ogtt

#endif  // OGTT_DIAGNOSTICS_HPP
