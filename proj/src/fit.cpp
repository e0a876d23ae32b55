#include "ogtt/fit.hpp"

#include <cmath>

namespace ogtt {

InitPoints init_points_from_prior(const PriorSpec& spec, const LogDensity& target,
                                  std::uint64_t seed, int max_tries) {
  spec.validate();
  Rng rng(mix_seed(seed, 0x1417));
  InitPoints out;
  bool have_first = false;
  for (int attempt = 0; attempt < max_tries; ++attempt) {
    const Eigen::VectorXd candidate = sample_prior(spec, rng).to_vector();
    if (!std::isfinite(target(candidate))) continue;
    if (!have_first) {
      out.x = candidate;
      have_first = true;
    } else if (!(candidate.array() == out.x.array()).any()) {
      out.xp = candidate;
      return out;
    }
  }
  throw SamplerError("could not find two prior draws with finite posterior density after " +
                     std::to_string(max_tries) + " tries");
}

PosteriorSample fit(const LogDensity& target, const PriorSpec& spec, SamplerConfig cfg) {
  if (cfg.init_x.size() == 0 || cfg.init_xp.size() == 0) {
    InitPoints init = init_points_from_prior(spec, target, cfg.seed);
    cfg.init_x = std::move(init.x);
    cfg.init_xp = std::move(init.xp);
  }
  return run_twalk(target, cfg);
}

}  // namespace ogtt
