// Five-compartment OGTT minimal model: blood glucose G, insulin action I,
// glucagon action L, digestive glucose D and drink glucose V.
//
//   dG/dt = L - I + D / theta2
//   dI/dt = theta0 (G - Gb)^+ - I / a
//   dL/dt = theta1 (Gb - G)^+ - L / b
//   dD/dt = -D / theta2 + 2 V / c
//   dV/dt = -2 V / c
//
// Time is in hours. I and L enter dG/dt directly, so they behave as effective
// glucose rates (mg/dL per hr) even though they are labelled as mg/dL.
#ifndef OGTT_MODEL_HPP
#define OGTT_MODEL_HPP

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>

namespace ogtt {

template <typename Scalar>
using StateT = Eigen::Matrix<Scalar, 5, 1>;
using State = StateT<double>;

/// Component indices into a State.
enum StateIndex : Eigen::Index {
  kGlucose = 0,
  kInsulin = 1,
  kGlucagon = 2,
  kDigestive = 3,
  kDrink = 4,
};

/// Constants that are not inferred. Defaults: a = b = 0.6 hr mean life,
/// c = 5 min drink time, sigma = 5 mg/dL. gb and v0 are conventions
/// (fasting reference and 75 g over ~11.4 L) and can be overridden.
struct FixedSettings {
  double a = 0.6;
  double b = 0.6;
  double c = 5.0 / 60.0;
  double gb = 100.0;
  double v0 = 660.0;
  double sigma = 5.0;

  /// Throws std::invalid_argument unless every field is finite and > 0.
  /// sigma may be 0 when `allow_zero_sigma` is set (noise-free synthetic data).
  void validate(bool allow_zero_sigma = false) const;
};

/// Patient-specific parameters, the vector the sampler explores.
struct PatientParams {
  double theta0 = 2.0;  ///< insulin tissue sensitivity (1/hr)
  double theta1 = 0.5;  ///< glucagon liver sensitivity (1/hr)
  double theta2 = 0.5;  ///< digestive transfer mean life (hr)
  double g0 = 100.0;    ///< blood glucose at t = 0 (mg/dL)

  static constexpr Eigen::Index kDim = 4;

  Eigen::Vector4d to_vector() const { return {theta0, theta1, theta2, g0}; }
  static PatientParams from_vector(const Eigen::Ref<const Eigen::VectorXd>& v);

  /// True when the parameters satisfy the model's own constraints:
  /// theta0, theta1, g0 > 0 and theta2 > c / 2 (D stays non-negative).
  /// Prior truncation of theta2 is a separate matter, see PriorSpec.
  bool admissible(const FixedSettings& fs) const;

  /// Throws std::invalid_argument naming the first violated constraint.
  void validate(const FixedSettings& fs) const;
};

/// Thrown when a simulated state stops being finite.
class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(double time, const std::string& what)
      : std::runtime_error(what), time_(time) {}
  double time() const { return time_; }

 private:
  double time_;
};

enum class Integration {
  /// D and V by their closed forms, RK4 on (G, I, L) only.
  Forced,
  /// RK4 on all five equations.
  Full,
};

struct SolverOptions {
  /// Largest RK4 step (hr). Output intervals are split into equal substeps.
  double step = 0.005;
  Integration path = Integration::Forced;
};

struct Trajectory {
  Eigen::VectorXd times;
  Eigen::Matrix<double, Eigen::Dynamic, 5> states;

  Eigen::Index size() const { return times.size(); }
  Eigen::VectorXd glucose() const { return states.col(kGlucose); }
};

inline double positive_part(double x) { return x > 0.0 ? x : 0.0; }

/// Right-hand side of the five-equation system.
template <typename Scalar>
StateT<Scalar> rhs(const StateT<Scalar>& s, const PatientParams& p,
                   const FixedSettings& fs) {
  using std::max;
  const Scalar zero(0);
  const Scalar g = s(kGlucose);
  const Scalar gb(fs.gb);
  StateT<Scalar> ds;
  ds(kGlucose) = s(kGlucagon) - s(kInsulin) + s(kDigestive) / Scalar(p.theta2);
  ds(kInsulin) = Scalar(p.theta0) * max(g - gb, zero) - s(kInsulin) / Scalar(fs.a);
  ds(kGlucagon) = Scalar(p.theta1) * max(gb - g, zero) - s(kGlucagon) / Scalar(fs.b);
  ds(kDigestive) = -s(kDigestive) / Scalar(p.theta2) + Scalar(2) * s(kDrink) / Scalar(fs.c);
  ds(kDrink) = Scalar(-2) * s(kDrink) / Scalar(fs.c);
  return ds;
}

/// Closed-form digestive and drink compartments.
struct DrinkDigest {
  double d = 0.0;
  double v = 0.0;
};

/// D(t) = V0 / (c / (2 theta2) - 1) * (exp(-2t/c) - exp(-t/theta2)),
/// V(t) = V0 exp(-2t/c). Requires theta2 > c / 2 and t >= 0.
DrinkDigest analytic_dv(double t, const PatientParams& p, const FixedSettings& fs);

/// Integrates from (g0, 0, 0, 0, v0) and reports the state on the grid
/// 0, h, 2h, ... up to t_end (t_end is appended if it is not on the grid).
Trajectory simulate(const PatientParams& p, const FixedSettings& fs, double t_end,
                    double grid_step, const SolverOptions& opts = {});

/// G at the requested times (sorted, non-negative). Each interval between
/// consecutive times is integrated with equal RK4 substeps, so the requested
/// times are hit exactly.
Eigen::VectorXd glucose_at(const PatientParams& p, const FixedSettings& fs,
                           std::span<const double> times, const SolverOptions& opts = {});

/// Same as above, for a caller that holds times in an Eigen vector.
inline Eigen::VectorXd glucose_at(const PatientParams& p, const FixedSettings& fs,
                                  const Eigen::VectorXd& times,
                                  const SolverOptions& opts = {}) {
  return glucose_at(p, fs, std::span<const double>(times.data(), times.size()), opts);
}

}  // namespace ogtt

#endif  // OGTT_MODEL_HPP
