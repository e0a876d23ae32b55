#include "ogtt/stats.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace ogtt::stats {

namespace {

double sorted_quantile(const std::vector<double>& sorted, double q) {
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

}  // namespace

double quantile(const Eigen::Ref<const Eigen::VectorXd>& values, double q) {
  const double level[] = {q};
  return quantiles(values, level)(0);
}

Eigen::VectorXd quantiles(const Eigen::Ref<const Eigen::VectorXd>& values,
                          std::span<const double> levels) {
  if (values.size() == 0) throw std::invalid_argument("quantile of an empty set");
  std::vector<double> sorted(values.data(), values.data() + values.size());
  std::sort(sorted.begin(), sorted.end());
  Eigen::VectorXd out(static_cast<Eigen::Index>(levels.size()));
  for (std::size_t k = 0; k < levels.size(); ++k) {
    if (!(levels[k] >= 0.0 && levels[k] <= 1.0)) throw std::invalid_argument("quantile level outside [0, 1]");
    out(static_cast<Eigen::Index>(k)) = sorted_quantile(sorted, levels[k]);
  }
  return out;
}

double sample_sd(const Eigen::Ref<const Eigen::VectorXd>& values) {
  if (values.size() < 2) return 0.0;
  const double mean = values.mean();
  return std::sqrt((values.array() - mean).square().sum() / static_cast<double>(values.size() - 1));
}

double chi_square_sf(double x, double dof) {
  if (x <= 0.0) return 1.0;
  return boost::math::gamma_q(0.5 * dof, 0.5 * x);
}

UniformityTest chi_square_uniform(const Eigen::Ref<const Eigen::VectorXd>& counts) {
  if (counts.size() < 2) throw std::invalid_argument("uniformity test needs at least 2 bins");
  UniformityTest t;
  const double expected = counts.sum() / static_cast<double>(counts.size());
  if (!(expected > 0.0)) throw std::invalid_argument("uniformity test needs positive total count");
  t.statistic = (counts.array() - expected).square().sum() / expected;
  t.dof = static_cast<double>(counts.size() - 1);
  t.p_value = chi_square_sf(t.statistic, t.dof);
  return t;
}

}  // namespace ogtt::stats
