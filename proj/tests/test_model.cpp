#include "ogtt/model.hpp"
#include "ogtt/random.hpp"

#include <doctest.h>

#include <cmath>

using namespace ogtt;

namespace {

// Independent brute-force integration of dD/dt = -D/theta2 + 2V/c,
// dV/dt = -2V/c with a tiny fixed step, written out by hand.
std::pair<double, double> brute_force_dv(double t_end, double theta2, double c, double v0) {
  const int n = static_cast<int>(std::ceil(t_end / 1e-4));
  const double h = t_end / n;
  double d = 0.0, v = v0;
  auto fd = [&](double dd, double vv) { return -dd / theta2 + 2.0 * vv / c; };
  auto fv = [&](double vv) { return -2.0 * vv / c; };
  for (int k = 0; k < n; ++k) {
    const double d1 = fd(d, v), v1 = fv(v);
    const double d2 = fd(d + 0.5 * h * d1, v + 0.5 * h * v1), v2 = fv(v + 0.5 * h * v1);
    const double d3 = fd(d + 0.5 * h * d2, v + 0.5 * h * v2), v3 = fv(v + 0.5 * h * v2);
    const double d4 = fd(d + h * d3, v + h * v3), v4 = fv(v + h * v3);
    d += h / 6.0 * (d1 + 2 * d2 + 2 * d3 + d4);
    v += h / 6.0 * (v1 + 2 * v2 + 2 * v3 + v4);
  }
  return {d, v};
}

FixedSettings fixed_point_settings() {
  FixedSettings fs;
  fs.v0 = 0.0;
  return fs;
}

}  // namespace

TEST_CASE("rhs vanishes at homeostasis") {
  const FixedSettings fs;
  const PatientParams p{2.0, 0.5, 0.5, fs.gb};
  State s;
  s << fs.gb, 0, 0, 0, 0;
  CHECK(rhs<double>(s, p, fs).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("rhs at the start of the drink moves glucose from V to D") {
  const FixedSettings fs;
  const PatientParams p{2.0, 0.5, 0.5, 95.0};
  State s;
  s << p.g0, 0, 0, 0, fs.v0;
  const State ds = rhs<double>(s, p, fs);
  CHECK(ds(kDigestive) == doctest::Approx(2.0 * fs.v0 / fs.c));
  CHECK(ds(kDrink) == doctest::Approx(-2.0 * fs.v0 / fs.c));
}

TEST_CASE("rhs insulin production above threshold") {
  const FixedSettings fs;
  const PatientParams p{2.0, 0.5, 0.5, 100.0};
  State s;
  s << fs.gb + 10.0, 0, 0, 0, 0;
  const State ds = rhs<double>(s, p, fs);
  CHECK(ds(kInsulin) == doctest::Approx(20.0));
  CHECK(ds(kGlucagon) == 0.0);
}

TEST_CASE("rhs is generic over the scalar type") {
  const FixedSettings fs;
  const PatientParams p{2.0, 0.7, 0.4, 100.0};
  State s;
  s << 130.0, 12.0, 1.5, 80.0, 40.0;
  const StateT<long double> wide = rhs<long double>(s.cast<long double>(), p, fs);
  CHECK((wide.cast<double>() - rhs<double>(s, p, fs)).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("analytic_dv boundary values") {
  const FixedSettings fs;
  const PatientParams p{2.0, 0.5, 0.5, 100.0};
  const DrinkDigest start = analytic_dv(0.0, p, fs);
  CHECK(start.d == doctest::Approx(0.0));
  CHECK(start.v == doctest::Approx(fs.v0));

  const DrinkDigest at_c = analytic_dv(fs.c, p, fs);
  CHECK(at_c.v / fs.v0 == doctest::Approx(std::exp(-2.0)));
  CHECK(1.0 - at_c.v / fs.v0 == doctest::Approx(0.8647).epsilon(1e-4));
}

TEST_CASE("analytic_dv rejects theta2 at or below c/2") {
  const FixedSettings fs;
  CHECK_THROWS_AS(analytic_dv(0.1, {2.0, 0.5, fs.c / 2.0, 100.0}, fs), std::invalid_argument);
  CHECK_THROWS_AS(analytic_dv(0.1, {2.0, 0.5, 0.01, 100.0}, fs), std::invalid_argument);
  CHECK_THROWS_AS(analytic_dv(-1.0, {2.0, 0.5, 0.5, 100.0}, fs), std::invalid_argument);
}

TEST_CASE("analytic_dv matches brute-force integration") {
  FixedSettings fs;
  fs.v0 = 100.0;
  const PatientParams p{2.0, 0.5, 0.5, 100.0};
  for (double t : {0.01, 0.05, 0.2, 0.7, 1.5, 3.0}) {
    CAPTURE(t);
    const auto [d, v] = brute_force_dv(t, p.theta2, fs.c, fs.v0);
    const DrinkDigest closed = analytic_dv(t, p, fs);
    CHECK(std::abs(closed.d - d) < 1e-6);
    CHECK(std::abs(closed.v - v) < 1e-6);
  }
}

TEST_CASE("five-equation path reproduces the closed form for D and V") {
  const FixedSettings fs;
  const SolverOptions full{5e-4, Integration::Full};
  for (double theta2 : {0.25, 0.5, 1.0}) {
    CAPTURE(theta2);
    const PatientParams p{2.0, 0.5, theta2, 100.0};
    const Trajectory traj = simulate(p, fs, 3.0, 0.01, full);
    double worst = 0.0;
    for (Eigen::Index k = 0; k < traj.size(); ++k) {
      const DrinkDigest dv = analytic_dv(traj.times(k), p, fs);
      worst = std::max({worst, std::abs(dv.d - traj.states(k, kDigestive)),
                        std::abs(dv.v - traj.states(k, kDrink))});
    }
    CHECK(worst < 1e-6);
  }
}

TEST_CASE("forced and full paths agree on glucose") {
  const FixedSettings fs;
  const PatientParams p{2.0, 0.5, 0.5, 100.0};
  const Trajectory forced = simulate(p, fs, 3.0, 0.05, {1e-3, Integration::Forced});
  const Trajectory full = simulate(p, fs, 3.0, 0.05, {1e-3, Integration::Full});
  CHECK((forced.states - full.states).cwiseAbs().maxCoeff() < 1e-4);
}

TEST_CASE("trajectory starts at the documented initial condition") {
  const FixedSettings fs;
  const PatientParams p{1.3, 0.5, 0.8, 92.0};
  const Trajectory traj = simulate(p, fs, 3.0, 0.1);
  CHECK(traj.times(0) == 0.0);
  State s0;
  s0 << 92.0, 0, 0, 0, fs.v0;
  CHECK((traj.states.row(0).transpose() - s0).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(traj.size() == 31);
  for (Eigen::Index k = 1; k < traj.size(); ++k) CHECK(traj.times(k) > traj.times(k - 1));
}

TEST_CASE("grid that does not divide t_end gets t_end appended") {
  const Trajectory traj = simulate({2.0, 0.5, 0.5, 100.0}, FixedSettings{}, 1.0, 0.3);
  REQUIRE(traj.size() == 5);
  CHECK(traj.times(3) == doctest::Approx(0.9));
  CHECK(traj.times(4) == 1.0);
}

TEST_CASE("homeostasis is a fixed point for both paths") {
  const FixedSettings fs = fixed_point_settings();
  const PatientParams p{3.7, 1.2, 0.4, fs.gb};
  for (Integration path : {Integration::Forced, Integration::Full}) {
    const Trajectory traj = simulate(p, fs, 3.0, 0.01, {0.005, path});
    State home;
    home << fs.gb, 0, 0, 0, 0;
    for (Eigen::Index k = 0; k < traj.size(); ++k)
      CHECK((traj.states.row(k).transpose() - home).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("healthy curve rises then returns toward baseline") {
  const FixedSettings fs;
  const PatientParams p{2.0, 0.5, 0.5, fs.gb};
  // dense fine-step reference
  const Trajectory traj = simulate(p, fs, 3.0, 0.01, {1e-4, Integration::Full});
  Eigen::Index peak = 0;
  traj.states.col(kGlucose).maxCoeff(&peak);
  CHECK(peak > 0);
  CHECK(traj.states(peak, kGlucose) > fs.gb + 50.0);
  CHECK(std::abs(traj.states(traj.size() - 1, kGlucose) - fs.gb) <
        traj.states(peak, kGlucose) - fs.gb);
}

TEST_CASE("glucose_at basics") {
  const FixedSettings fs;
  const PatientParams p{2.0, 0.5, 0.5, 97.0};
  const double zero[] = {0.0};
  CHECK(glucose_at(p, fs, zero)(0) == 97.0);

  const FixedSettings flat = fixed_point_settings();
  const double times[] = {0.0, 0.5, 1.0, 2.0, 3.0};
  const Eigen::VectorXd g = glucose_at({2.0, 0.5, 0.5, flat.gb}, flat, times);
  CHECK((g.array() - flat.gb).abs().maxCoeff() < 1e-12);

  const double unsorted[] = {1.0, 0.5};
  CHECK_THROWS_AS(glucose_at(p, fs, unsorted), std::invalid_argument);
}

TEST_CASE("glucose_at matches a fine-step reference") {
  const FixedSettings fs;
  const PatientParams p{2.0, 0.5, 0.5, 100.0};
  const Eigen::VectorXd times = Eigen::Vector4d(0.0, 0.5, 1.0, 2.0);
  const Eigen::VectorXd fine = glucose_at(p, fs, times, {1e-5, Integration::Full});
  const Eigen::VectorXd g = glucose_at(p, fs, times);
  CHECK((g - fine).cwiseAbs().maxCoeff() < 0.01);
}

TEST_CASE("step halving shows fourth-order convergence") {
  const FixedSettings fs;
  const Eigen::VectorXd times = Eigen::Vector4d(0.5, 1.0, 2.0, 3.0);
  for (const PatientParams& p : {PatientParams{2.0, 0.5, 0.5, 100.0}, PatientParams{0.5, 0.5, 0.5, 100.0}}) {
    const Eigen::VectorXd g1 = glucose_at(p, fs, times, {0.04});
    const Eigen::VectorXd g2 = glucose_at(p, fs, times, {0.02});
    const Eigen::VectorXd g3 = glucose_at(p, fs, times, {0.01});
    const double ratio = (g1 - g2).cwiseAbs().maxCoeff() / (g2 - g3).cwiseAbs().maxCoeff();
    CAPTURE(ratio);
    CHECK(ratio > 8.0);   // 2^3
    CHECK(ratio < 32.0);  // 2^5
  }
}

TEST_CASE("drink compartment drains monotonically") {
  const FixedSettings fs;
  const PatientParams p{2.0, 0.5, 0.5, 100.0};
  const Trajectory traj = simulate(p, fs, 0.5, 0.005);
  for (Eigen::Index k = 1; k < traj.size(); ++k)
    CHECK(traj.states(k, kDrink) < traj.states(k - 1, kDrink));
  const double transferred = fs.v0 - analytic_dv(fs.c, p, fs).v;
  CHECK(transferred / fs.v0 == doctest::Approx(1.0 - std::exp(-2.0)));
}

TEST_CASE("insulin, glucagon, D and V stay non-negative over prior-like draws") {
  const FixedSettings fs;
  Rng rng(mix_seed(42));
  for (int k = 0; k < 100; ++k) {
    PatientParams p;
    p.theta0 = gamma_draw(rng, 2.0, 0.25);
    p.theta1 = gamma_draw(rng, 2.0, 0.25);
    p.theta2 = 1.0 / 6.0 + uniform01(rng) * (2.0 - 1.0 / 6.0);
    p.g0 = 70.0 + 60.0 * uniform01(rng);
    const Trajectory traj = simulate(p, fs, 3.0, 0.01);
    CAPTURE(p.theta0);
    CHECK(traj.states.rightCols(4).minCoeff() >= -1e-9);
  }
}

TEST_CASE("glucose stays non-negative for moderate insulin sensitivity") {
  const FixedSettings fs;
  Rng rng(mix_seed(43));
  for (int k = 0; k < 100; ++k) {
    const PatientParams p{0.1 + 1.9 * uniform01(rng), 0.05 + 5.0 * uniform01(rng),
                          1.0 / 6.0 + uniform01(rng) * (2.0 - 1.0 / 6.0), 70.0 + 60.0 * uniform01(rng)};
    const Trajectory traj = simulate(p, fs, 3.0, 0.01);
    CAPTURE(p.theta0);
    CHECK(traj.states.minCoeff() >= -1e-9);
  }
}

TEST_CASE("strong insulin response can push glucose below zero") {
  // A property of the equations themselves: nothing bounds G from below.
  const Trajectory traj = simulate({4.0, 0.5, 0.5, 100.0}, FixedSettings{}, 3.0, 0.01);
  CHECK(traj.states.col(kGlucose).minCoeff() < 0.0);
}

TEST_CASE("invalid inputs are rejected") {
  const FixedSettings fs;
  CHECK_THROWS_AS(simulate({-1.0, 0.5, 0.5, 100.0}, fs, 3.0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(simulate({1.0, 0.0, 0.5, 100.0}, fs, 3.0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(simulate({1.0, 0.5, 0.5, 0.0}, fs, 3.0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(simulate({1.0, 0.5, 0.5, 100.0}, fs, 0.0, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(simulate({1.0, 0.5, 0.5, 100.0}, fs, 3.0, -0.1), std::invalid_argument);
  FixedSettings bad = fs;
  bad.a = 0.0;
  CHECK_THROWS_AS(simulate({1.0, 0.5, 0.5, 100.0}, bad, 3.0, 0.1), std::invalid_argument);
}

TEST_CASE("blow-up is reported with the offending time") {
  FixedSettings fs;
  fs.v0 = 1e308;
  try {
    simulate({2.0, 0.5, 0.5, 100.0}, fs, 1.0, 0.1, {0.005, Integration::Full});
    FAIL("expected IntegrationError");
  } catch (const IntegrationError& e) {
    CHECK(e.time() > 0.0);
    CHECK(e.time() <= 1.0);
  }
}
