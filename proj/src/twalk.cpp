#include "ogtt/twalk.hpp"

#include "ogtt/diagnostics.hpp"
#include "ogtt/random.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace ogtt {

namespace {

// Published t-walk defaults.
constexpr double kTraverseScale = 6.0;  // at
constexpr double kWalkScale = 1.5;      // aw
constexpr double kExpectedMoved = 4.0;  // n1phi
constexpr double kPTraverse = 0.4918;
constexpr double kPWalk = 0.4918;
constexpr double kPBlow = 0.0082;
// hop takes the remaining 0.0082

constexpr double kLog2Pi = 1.8378770664093454835606594728112;
constexpr std::size_t kStagnationWindow = 2000;
constexpr double kStagnationRate = 0.01;

using Mask = Eigen::Array<bool, Eigen::Dynamic, 1>;

double draw_beta(Rng& rng) {
  const double at = kTraverseScale;
  if (uniform01(rng) < (at - 1.0) / (2.0 * at))
    return std::pow(uniform01(rng), 1.0 / (at + 1.0));
  return std::pow(uniform01(rng), 1.0 / (1.0 - at));
}

double draw_walk_factor(Rng& rng) {
  const double aw = kWalkScale;
  const double u = uniform01(rng);
  return (aw / (1.0 + aw)) * (aw * u * u + 2.0 * u - 1.0);
}

double max_abs_diff(const Eigen::VectorXd& a, const Eigen::VectorXd& b, const Mask& phi) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i)
    if (phi(i)) s = std::max(s, std::abs(a(i) - b(i)));
  return s;
}

double masked_sq_norm(const Eigen::VectorXd& v, const Mask& phi) {
  return phi.select(v.array(), 0.0).matrix().squaredNorm();
}

// -log density of a Gaussian kernel on the masked coordinates.
double neg_log_kernel(const Eigen::VectorXd& to, const Eigen::VectorXd& centre, double scale,
                      const Mask& phi, int nphi) {
  return 0.5 * nphi * kLog2Pi + nphi * std::log(scale) +
         0.5 * masked_sq_norm(to - centre, phi) / (scale * scale);
}

struct Proposal {
  Eigen::VectorXd point;
  double log_ratio_extra = 0.0;  // proposal-density correction added to log pi(h) - log pi(x)
  bool valid = true;
};

// Proposes a replacement for `x` given the partner `other`.
Proposal propose(const Eigen::VectorXd& x, const Eigen::VectorXd& other, const Mask& phi,
                 int nphi, Rng& rng) {
  Proposal prop{x};
  const Eigen::Index n = x.size();
  const double ker = uniform01(rng);

  if (ker < kPTraverse) {
    const double beta = draw_beta(rng);
    for (Eigen::Index i = 0; i < n; ++i)
      if (phi(i)) prop.point(i) = other(i) + beta * (other(i) - x(i));
    prop.log_ratio_extra = (nphi - 2) * std::log(beta);
  } else if (ker < kPTraverse + kPWalk) {
    for (Eigen::Index i = 0; i < n; ++i)
      if (phi(i)) prop.point(i) = x(i) + (x(i) - other(i)) * draw_walk_factor(rng);
  } else if (ker < kPTraverse + kPWalk + kPBlow) {
    const double scale = max_abs_diff(other, x, phi);
    if (!(scale > 0.0)) return {x, 0.0, false};
    for (Eigen::Index i = 0; i < n; ++i)
      if (phi(i)) prop.point(i) = other(i) + scale * standard_normal(rng);
    const double back_scale = max_abs_diff(other, prop.point, phi);
    if (!(back_scale > 0.0)) return {x, 0.0, false};
    const double forward = neg_log_kernel(prop.point, other, scale, phi, nphi);
    const double backward = neg_log_kernel(x, other, back_scale, phi, nphi);
    prop.log_ratio_extra = forward - backward;
  } else {
    const double scale = max_abs_diff(other, x, phi) / 3.0;
    if (!(scale > 0.0)) return {x, 0.0, false};
    for (Eigen::Index i = 0; i < n; ++i)
      if (phi(i)) prop.point(i) = x(i) + scale * standard_normal(rng);
    const double back_scale = max_abs_diff(other, prop.point, phi) / 3.0;
    if (!(back_scale > 0.0)) return {x, 0.0, false};
    const double forward = neg_log_kernel(prop.point, x, scale, phi, nphi);
    const double backward = neg_log_kernel(x, prop.point, back_scale, phi, nphi);
    prop.log_ratio_extra = forward - backward;
  }
  // The pair must stay distinct in every moved coordinate.
  for (Eigen::Index i = 0; i < n; ++i)
    if (phi(i) && prop.point(i) == other(i)) prop.valid = false;
  return prop;
}

}  // namespace

void SamplerConfig::validate() const {
  if (!(n_iterations > burn_in)) throw std::invalid_argument("sampler: need n_iterations > burn_in");
  if (thin < 1) throw std::invalid_argument("sampler: thin must be >= 1");
  if (init_x.size() == 0 || init_x.size() != init_xp.size())
    throw std::invalid_argument("sampler: init points must be non-empty and the same size");
  if (!init_x.allFinite() || !init_xp.allFinite())
    throw std::invalid_argument("sampler: init points must be finite");
  if ((init_x.array() == init_xp.array()).any())
    throw std::invalid_argument("sampler: init points must differ in every coordinate");
}

PosteriorSample run_twalk(const LogDensity& target, const SamplerConfig& cfg) {
  cfg.validate();
  const Eigen::Index n = cfg.init_x.size();
  Eigen::VectorXd pts[2] = {cfg.init_x, cfg.init_xp};
  double logp[2] = {target(pts[0]), target(pts[1])};
  if (!std::isfinite(logp[0]) || !std::isfinite(logp[1]))
    throw SamplerError("t-walk: initial points must have finite log-density");

  Rng rng(cfg.seed);
  const double p_move = std::min(static_cast<double>(n), kExpectedMoved) / static_cast<double>(n);

  PosteriorSample out;
  const auto kept = static_cast<Eigen::Index>(cfg.n_kept());
  out.draws.resize(kept, n);
  out.logpost.resize(kept);

  std::size_t accepted = 0;
  std::size_t window_accepted = 0;
  std::size_t stagnant_windows = 0;
  Eigen::Index row = 0;
  Mask phi(n);

  for (std::size_t it = 0; it < cfg.n_iterations; ++it) {
    const int moving = uniform01(rng) < 0.5 ? 0 : 1;
    int nphi = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      phi(i) = uniform01(rng) < p_move;
      nphi += phi(i) ? 1 : 0;
    }

    if (nphi > 0) {
      const Proposal prop = propose(pts[moving], pts[1 - moving], phi, nphi, rng);
      if (prop.valid) {
        const double lp = target(prop.point);
        if (std::isfinite(lp)) {
          const double log_accept = lp - logp[moving] + prop.log_ratio_extra;
          if (log_accept >= 0.0 || std::log(uniform01(rng)) < log_accept) {
            pts[moving] = prop.point;
            logp[moving] = lp;
            ++accepted;
            ++window_accepted;
          }
        }
      }
    }

    if ((it + 1) % kStagnationWindow == 0) {
      if (static_cast<double>(window_accepted) < kStagnationRate * kStagnationWindow)
        ++stagnant_windows;
      window_accepted = 0;
    }

    if (it >= cfg.burn_in && (it - cfg.burn_in + 1) % cfg.thin == 0 && row < kept) {
      out.draws.row(row) = pts[0].transpose();
      out.logpost(row) = logp[0];
      ++row;
    }
  }

  out.acceptance_rate = static_cast<double>(accepted) / static_cast<double>(cfg.n_iterations);
  if (stagnant_windows > 0) {
    std::ostringstream msg;
    msg << "t-walk: acceptance below 1% in " << stagnant_windows << " window(s) of "
        << kStagnationWindow << " iterations";
    out.warnings.push_back(msg.str());
  }
  out.iat = Eigen::VectorXd::Constant(n, std::numeric_limits<double>::quiet_NaN());
  if (kept >= kMinDiagnosticDraws)
    for (Eigen::Index j = 0; j < n; ++j)
      out.iat(j) = integrated_autocorrelation_time(out.draws.col(j));
  return out;
}

}  // namespace ogtt
