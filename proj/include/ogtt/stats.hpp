// Small descriptive and testing helpers over Eigen vectors.
#ifndef OGTT_STATS_HPP
#define OGTT_STATS_HPP

#include <Eigen/Dense>

#include <span>

namespace ogtt::stats {

/// Quantile by linear interpolation between order statistics at position
/// q (n - 1) of the sorted data (the "type 7" convention). Sorts a copy.
double quantile(const Eigen::Ref<const Eigen::VectorXd>& values, double q);

/// Several quantiles sharing one sort.
Eigen::VectorXd quantiles(const Eigen::Ref<const Eigen::VectorXd>& values,
                          std::span<const double> levels);

/// Sample standard deviation (n - 1 denominator); 0 for fewer than 2 values.
double sample_sd(const Eigen::Ref<const Eigen::VectorXd>& values);

/// Upper tail P[X >= x] of a chi-square distribution with `dof` degrees.
double chi_square_sf(double x, double dof);

/// Pearson chi-square statistic and p-value for observed counts against
/// equal expected counts.
struct UniformityTest {
  double statistic = 0.0;
  double dof = 0.0;
  double p_value = 1.0;
};
UniformityTest chi_square_uniform(const Eigen::Ref<const Eigen::VectorXd>& counts);

}  // namespace ogtt::stats

#endif  // OGTT_STATS_HPP
