// Glue between the OGTT posterior and the generic t-walk.
#ifndef OGTT_FIT_HPP
#define OGTT_FIT_HPP

#include "ogtt/inference.hpp"
#include "ogtt/twalk.hpp"

#include <cstdint>

namespace ogtt {

struct InitPoints {
  Eigen::VectorXd x;
  Eigen::VectorXd xp;
};

/// Two distinct prior draws at which `target` is finite. Fresh pairs are
/// drawn until both qualify; after `max_tries` draws a SamplerError is
/// thrown (usually a sign that data and model disagree badly).
InitPoints init_points_from_prior(const PriorSpec& spec, const LogDensity& target,
                                  std::uint64_t seed, int max_tries = 1000);

/// Runs the t-walk on `target`, drawing init points from `spec` when the
/// config does not carry them.
PosteriorSample fit(const LogDensity& target, const PriorSpec& spec, SamplerConfig cfg);

inline PosteriorSample fit(const Posterior& posterior, SamplerConfig cfg) {
  return fit(LogDensity(posterior), posterior.priors(), std::move(cfg));
}

}  // namespace ogtt

#endif  // OGTT_FIT_HPP
