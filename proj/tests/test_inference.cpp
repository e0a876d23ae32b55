#include "ogtt/inference.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <string>

using namespace ogtt;

namespace {

ObservationSet healthy_readings() {
  return {Eigen::Vector4d(0.0, 0.5, 1.0, 2.0), Eigen::Vector4d(98.0, 420.0, 470.0, 240.0)};
}

// Trapezoid rule on a fine uniform grid; independent of the code under test.
template <typename F>
double integrate(F f, double lo, double hi, int n = 200000) {
  const double h = (hi - lo) / n;
  double sum = 0.5 * (f(lo) + f(hi));
  for (int k = 1; k < n; ++k) sum += f(lo + k * h);
  return sum * h;
}

}  // namespace

TEST_CASE("ObservationSet enforces its invariants") {
  CHECK_NOTHROW(healthy_readings());
  CHECK_THROWS_AS(ObservationSet(Eigen::VectorXd::Constant(1, 0.0), Eigen::VectorXd::Constant(1, 90.0)),
                  std::invalid_argument);
  CHECK_THROWS_AS(ObservationSet(Eigen::Vector3d(0, 1, 1), Eigen::Vector3d(90, 150, 140)),
                  std::invalid_argument);
  CHECK_THROWS_AS(ObservationSet(Eigen::Vector2d(-0.1, 1), Eigen::Vector2d(90, 150)), std::invalid_argument);
  CHECK_THROWS_AS(ObservationSet(Eigen::Vector2d(0, 1), Eigen::Vector2d(90, 0)), std::invalid_argument);
  CHECK_THROWS_AS(ObservationSet(Eigen::Vector2d(0, 1), Eigen::Vector3d(90, 1, 2)), std::invalid_argument);
}

TEST_CASE("prior support") {
  const PriorSpec spec;
  CHECK(log_prior({2.0, 0.5, 0.1, 100.0}, spec) == kNegInf);
  CHECK(log_prior({2.0, 0.5, 2.01, 100.0}, spec) == kNegInf);
  CHECK(log_prior({0.0, 0.5, 0.5, 100.0}, spec) == kNegInf);
  CHECK(log_prior({2.0, -1.0, 0.5, 100.0}, spec) == kNegInf);
  CHECK(log_prior({2.0, 0.5, 0.5, -3.0}, spec) == kNegInf);
  CHECK(std::isfinite(log_prior({2.0, 0.5, 1.0 / 6.0, 100.0}, spec)));
  CHECK(std::isfinite(log_prior({2.0, 0.5, 2.0, 100.0}, spec)));
}

TEST_CASE("Gamma(2, 1/4) log-density peaks at its mode 4") {
  const GammaPrior g{2.0, 0.25};
  CHECK(g.log_density(8.0) > g.log_density(8.0 + 1e-3));
  CHECK(g.log_density(4.0) > g.log_density(3.9));
  CHECK(g.log_density(4.0) > g.log_density(4.1));
  CHECK(g.mean() == 8.0);
}

TEST_CASE("prior densities are normalized") {
  const PriorSpec spec;
  const double gamma_mass = integrate([&](double x) { return std::exp(spec.theta0.log_density(x)); }, 1e-9, 400.0);
  CHECK(gamma_mass == doctest::Approx(1.0).epsilon(1e-6));
  const double trunc_mass =
      integrate([&](double x) { return std::exp(spec.theta2.log_density(x)); }, spec.theta2.lo, spec.theta2.hi);
  CHECK(trunc_mass == doctest::Approx(1.0).epsilon(1e-6));
  const PositiveNormalPrior near_zero{5.0, 10.0};
  const double normal_mass = integrate([&](double x) { return std::exp(near_zero.log_density(x)); }, 1e-12, 200.0);
  CHECK(normal_mass == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("prior sampler reproduces prior moments") {
  const PriorSpec spec;
  Rng rng(mix_seed(5));
  const int n = 20000;
  Eigen::VectorXd theta0(n);
  for (int k = 0; k < n; ++k) {
    const PatientParams p = sample_prior(spec, rng);
    theta0(k) = p.theta0;
    CHECK(std::isfinite(log_prior(p, spec)));
  }
  const double se = spec.theta0.sd() / std::sqrt(static_cast<double>(n));
  CHECK(std::abs(theta0.mean() - 8.0) < 3.0 * se);
}

TEST_CASE("g0 prior defaults to the fasting reading with sd 2 sigma") {
  const ObservationSet obs = healthy_readings();
  const PriorSpec spec = PriorSpec::for_observations(obs, FixedSettings{});
  CHECK(spec.g0.center == 98.0);
  CHECK(spec.g0.sd == 10.0);
}

TEST_CASE("likelihood on noiseless data attains its maximum") {
  const FixedSettings fs;
  const PatientParams p{2.0, 0.5, 0.5, 100.0};
  const Eigen::VectorXd times = Eigen::Vector4d(0.0, 0.5, 1.0, 2.0);
  const ObservationSet obs(times, glucose_at(p, fs, times));
  const double max_ll = -2.0 * std::log(2.0 * std::numbers::pi * 25.0);
  CHECK(log_likelihood(p, fs, obs) == doctest::Approx(max_ll).epsilon(1e-12));

  Eigen::VectorXd shifted = obs.glucose();
  shifted(2) += fs.sigma;
  const ObservationSet one_sigma(times, shifted);
  CHECK(log_likelihood(p, fs, one_sigma) == doctest::Approx(max_ll - 0.5).epsilon(1e-12));
}

TEST_CASE("likelihood equals a hand-summed Gaussian log-density") {
  const FixedSettings fs;
  const ObservationSet obs = healthy_readings();
  const PatientParams p{2.2, 0.8, 0.45, 101.0};
  const Eigen::VectorXd curve = glucose_at(p, fs, obs.times());
  double expected = 0.0;
  for (Eigen::Index i = 0; i < obs.size(); ++i) {
    const double r = obs.glucose()(i) - curve(i);
    expected += -0.5 * std::log(2.0 * std::numbers::pi) - std::log(fs.sigma) - r * r / (2.0 * fs.sigma * fs.sigma);
  }
  CHECK(log_likelihood(p, fs, obs) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("log_posterior is prior plus likelihood") {
  const FixedSettings fs;
  const ObservationSet obs = healthy_readings();
  const PriorSpec spec = PriorSpec::for_observations(obs, fs);
  const PatientParams p{2.2, 0.8, 0.45, 101.0};
  CHECK(log_posterior(p, fs, obs, spec) == log_prior(p, spec) + log_likelihood(p, fs, obs));
  CHECK(log_posterior({2.2, 0.8, 0.1, 101.0}, fs, obs, spec) == kNegInf);

  const Posterior post(fs, obs, spec);
  CHECK(post(p.to_vector()) == log_posterior(p, fs, obs, spec));
  CHECK(post.log_prior(p.to_vector()) + post.log_likelihood(p.to_vector()) == post(p.to_vector()));
}

TEST_CASE("shifting one reading by sigma changes log_posterior by the Gaussian delta") {
  const FixedSettings fs;
  const ObservationSet obs = healthy_readings();
  const PriorSpec spec = PriorSpec::for_observations(obs, fs);
  const PatientParams p{2.2, 0.8, 0.45, 101.0};
  const double r = obs.glucose()(1) - glucose_at(p, fs, obs.times())(1);
  Eigen::VectorXd bumped = obs.glucose();
  bumped(1) += fs.sigma;
  const double delta =
      log_posterior(p, fs, ObservationSet(obs.times(), bumped), spec) - log_posterior(p, fs, obs, spec);
  CHECK(delta == doctest::Approx(-r / fs.sigma - 0.5).epsilon(1e-9));
}

TEST_CASE("log_posterior is -inf exactly outside the support") {
  const FixedSettings fs;
  const ObservationSet obs = healthy_readings();
  const PriorSpec spec = PriorSpec::for_observations(obs, fs);
  Rng rng(mix_seed(11));
  for (int k = 0; k < 300; ++k) {
    const PatientParams p{-1.0 + 6.0 * uniform01(rng), -1.0 + 6.0 * uniform01(rng), 2.5 * uniform01(rng),
                          -20.0 + 200.0 * uniform01(rng)};
    const bool inside = p.theta0 > 0 && p.theta1 > 0 && p.theta2 >= 1.0 / 6.0 && p.theta2 <= 2.0 && p.g0 > 0;
    CAPTURE(p.theta0);
    CAPTURE(p.theta2);
    CHECK((log_posterior(p, fs, obs, spec) == kNegInf) == !inside);
  }
}

TEST_CASE("larger residuals give a smaller log_posterior") {
  const FixedSettings fs;
  const PatientParams p{2.0, 0.5, 0.5, 100.0};
  const Eigen::VectorXd times = Eigen::Vector4d(0.0, 0.5, 1.0, 2.0);
  const Eigen::VectorXd curve = glucose_at(p, fs, times);
  const Eigen::Vector4d direction(1.0, -2.0, 0.5, 3.0);
  const PriorSpec spec;
  double previous = std::numeric_limits<double>::infinity();
  for (double scale : {0.0, 1.0, 2.0, 4.0, 8.0}) {
    const double lp = log_posterior(p, fs, ObservationSet(times, curve + scale * direction), spec);
    CHECK(lp < previous);
    previous = lp;
  }
}

TEST_CASE("integration failure becomes -inf with a diagnostic") {
  FixedSettings fs;
  fs.v0 = 1e308;
  const ObservationSet obs = healthy_readings();
  std::string note;
  const double ll = log_likelihood({2.0, 0.5, 0.5, 100.0}, fs, obs, {0.005, Integration::Full},
                                   [&](std::string_view msg) { note = std::string(msg); });
  CHECK(ll == kNegInf);
  CHECK(note.find("non-finite") != std::string::npos);
}
