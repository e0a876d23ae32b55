#include "ogtt/inference.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <numbers>
#include <sstream>
#include <stdexcept>

namespace ogtt {

namespace {

constexpr double kLog2Pi = 1.8378770664093454835606594728112;

void require(bool ok, const std::string& what) {
  if (!ok) throw std::invalid_argument(what);
}

bool positive_finite(double x) { return std::isfinite(x) && x > 0.0; }

}  // namespace

ObservationSet::ObservationSet(Eigen::VectorXd times, Eigen::VectorXd glucose)
    : times_(std::move(times)), glucose_(std::move(glucose)) {
  require(times_.size() == glucose_.size(), "observations: times and readings differ in length");
  require(times_.size() >= 2, "observations: need n >= 2 readings");
  require(std::isfinite(times_(0)) && times_(0) >= 0.0, "observations: t_0 must be >= 0");
  for (Eigen::Index i = 0; i < times_.size(); ++i) {
    if (i > 0 && !(times_(i) > times_(i - 1)))
      throw std::invalid_argument("observations: times must be strictly increasing (record " +
                                  std::to_string(i) + ")");
    if (!positive_finite(glucose_(i)))
      throw std::invalid_argument("observations: readings must be > 0 (record " +
                                  std::to_string(i) + ")");
  }
}

double GammaPrior::log_density(double x) const {
  if (!(x > 0.0) || !std::isfinite(x)) return kNegInf;
  return shape * std::log(rate) - std::lgamma(shape) + (shape - 1.0) * std::log(x) - rate * x;
}

double TruncatedGammaPrior::log_mass() const {
  const double upper = boost::math::gamma_p(shape, rate * hi);
  const double lower = boost::math::gamma_p(shape, rate * lo);
  return std::log(upper - lower);
}

double TruncatedGammaPrior::log_density(double x) const {
  if (!(x >= lo && x <= hi)) return kNegInf;
  return GammaPrior{shape, rate}.log_density(x) - log_mass();
}

double PositiveNormalPrior::log_density(double x) const {
  if (!(x > 0.0) || !std::isfinite(x)) return kNegInf;
  const double z = (x - center) / sd;
  const double log_kept = std::log(0.5 * std::erfc(-center / (sd * std::numbers::sqrt2)));
  return -0.5 * kLog2Pi - std::log(sd) - 0.5 * z * z - log_kept;
}

PriorSpec PriorSpec::for_observations(const ObservationSet& obs, const FixedSettings& fs) {
  PriorSpec spec;
  spec.g0 = {obs.glucose()(0), 2.0 * fs.sigma};
  return spec;
}

void PriorSpec::validate() const {
  require(positive_finite(theta0.shape) && positive_finite(theta0.rate), "theta0 prior: shape, rate > 0");
  require(positive_finite(theta1.shape) && positive_finite(theta1.rate), "theta1 prior: shape, rate > 0");
  require(positive_finite(theta2.shape) && positive_finite(theta2.rate), "theta2 prior: shape, rate > 0");
  require(positive_finite(theta2.lo) && positive_finite(theta2.hi) && theta2.lo < theta2.hi,
          "theta2 prior: need 0 < lo < hi");
  require(std::isfinite(g0.center) && positive_finite(g0.sd), "g0 prior: finite center, sd > 0");
}

double log_prior(const PatientParams& p, const PriorSpec& spec) {
  const double lp = spec.theta0.log_density(p.theta0) + spec.theta1.log_density(p.theta1) +
                    spec.theta2.log_density(p.theta2) + spec.g0.log_density(p.g0);
  return std::isnan(lp) ? kNegInf : lp;
}

PatientParams sample_prior(const PriorSpec& spec, Rng& rng) {
  PatientParams p;
  p.theta0 = gamma_draw(rng, spec.theta0.shape, spec.theta0.rate);
  p.theta1 = gamma_draw(rng, spec.theta1.shape, spec.theta1.rate);
  do {
    p.theta2 = gamma_draw(rng, spec.theta2.shape, spec.theta2.rate);
  } while (p.theta2 < spec.theta2.lo || p.theta2 > spec.theta2.hi);
  do {
    p.g0 = spec.g0.center + spec.g0.sd * standard_normal(rng);
  } while (!(p.g0 > 0.0));
  return p;
}

double log_likelihood(const PatientParams& p, const FixedSettings& fs, const ObservationSet& obs,
                      const SolverOptions& opts, const DiagnosticSink& sink) {
  if (!p.admissible(fs)) return kNegInf;
  Eigen::VectorXd curve;
  try {
    curve = glucose_at(p, fs, obs.times(), opts);
  } catch (const IntegrationError& e) {
    if (sink) {
      std::ostringstream msg;
      msg << "likelihood set to -inf: " << e.what() << " (theta0=" << p.theta0
          << ", theta1=" << p.theta1 << ", theta2=" << p.theta2 << ", g0=" << p.g0 << ")";
      sink(msg.str());
    }
    return kNegInf;
  }
  const double sigma2 = fs.sigma * fs.sigma;
  const double n = static_cast<double>(obs.size());
  const double sse = (obs.glucose() - curve).squaredNorm();
  return -0.5 * sse / sigma2 - 0.5 * n * (kLog2Pi + std::log(sigma2));
}

double log_posterior(const PatientParams& p, const FixedSettings& fs, const ObservationSet& obs,
                     const PriorSpec& spec, const SolverOptions& opts, const DiagnosticSink& sink) {
  const double lp = log_prior(p, spec);
  if (lp == kNegInf || !p.admissible(fs)) return kNegInf;
  return lp + log_likelihood(p, fs, obs, opts, sink);
}

Posterior::Posterior(FixedSettings fs, ObservationSet obs, PriorSpec spec, SolverOptions opts)
    : fs_(fs), obs_(std::move(obs)), spec_(spec), opts_(opts) {
  fs_.validate();
  spec_.validate();
}

double Posterior::operator()(const Eigen::VectorXd& x) const {
  return log_posterior(PatientParams::from_vector(x), fs_, obs_, spec_, opts_);
}

double Posterior::log_prior(const Eigen::VectorXd& x) const {
  return ogtt::log_prior(PatientParams::from_vector(x), spec_);
}

double Posterior::log_likelihood(const Eigen::VectorXd& x) const {
  return ogtt::log_likelihood(PatientParams::from_vector(x), fs_, obs_, opts_);
}

}  // namespace ogtt
