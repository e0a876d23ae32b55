#include "ogtt/synth.hpp"

#include <doctest.h>

#include <cmath>

using namespace ogtt;

TEST_CASE("noiseless readings sit on the simulated curve") {
  FixedSettings fs;
  fs.sigma = 0.0;
  const synth::SynthPatient pt = synth::generate(synth::healthy(), fs, synth::default_schedule(), 3);
  const Eigen::VectorXd curve = glucose_at(synth::healthy(), fs, synth::default_schedule());
  CHECK((pt.obs.glucose() - curve).cwiseAbs().maxCoeff() == 0.0);
  CHECK((pt.noiseless - curve).cwiseAbs().maxCoeff() == 0.0);
  CHECK(pt.clipped == 0);
}

TEST_CASE("generation is deterministic in the seed") {
  const FixedSettings fs;
  const auto a = synth::generate(synth::healthy(), fs, synth::default_schedule(), 17);
  const auto b = synth::generate(synth::healthy(), fs, synth::default_schedule(), 17);
  const auto c = synth::generate(synth::healthy(), fs, synth::default_schedule(), 18);
  CHECK((a.obs.glucose().array() == b.obs.glucose().array()).all());
  CHECK((a.obs.glucose().array() != c.obs.glucose().array()).any());
}

TEST_CASE("noise has variance sigma^2") {
  const FixedSettings fs;
  const Eigen::VectorXd schedule = synth::default_schedule();
  double sum = 0.0, sum_sq = 0.0;
  long n = 0;
  for (std::uint64_t r = 0; r < 10000; ++r) {
    const auto pt = synth::generate(synth::healthy(), fs, schedule, r);
    const Eigen::VectorXd e = pt.obs.glucose() - pt.noiseless;
    sum += e.sum();
    sum_sq += e.squaredNorm();
    n += e.size();
  }
  const double mean = sum / n;
  CHECK(std::abs(mean) < 0.1);
  CHECK((sum_sq / n - mean * mean) == doctest::Approx(25.0).epsilon(0.05));
}

TEST_CASE("readings below the floor are clipped and counted") {
  FixedSettings fs;
  fs.sigma = 400.0;
  Eigen::Index clipped = 0;
  for (std::uint64_t r = 0; r < 50; ++r) {
    const auto pt = synth::generate(synth::healthy(), fs, synth::default_schedule(), r);
    CHECK(pt.obs.glucose().minCoeff() >= synth::kReadingFloor);
    clipped += pt.clipped;
  }
  CHECK(clipped > 0);
}

TEST_CASE("recovery experiment bookkeeping") {
  synth::ExperimentConfig cfg;
  cfg.sampler.n_iterations = 3000;
  cfg.sampler.burn_in = 500;
  cfg.master_seed = 5;
  const synth::RecoveryReport rep =
      synth::recovery_experiment(synth::healthy(), FixedSettings{}, synth::default_schedule(), 20, cfg);
  CHECK(rep.n_replicates == 20);
  CHECK(rep.medians.rows() + rep.failures == 20);
  CHECK(rep.medians.cols() == 4);
  CHECK((rep.coverage >= 0.0).all());
  CHECK((rep.coverage <= 1.0).all());
  CHECK(rep.prior_sd(0) == doctest::Approx(std::sqrt(32.0)).epsilon(0.05));
  CHECK((rep.lo.array() <= rep.hi.array()).all());
  CHECK_THROWS_AS(synth::recovery_experiment(synth::healthy(), FixedSettings{}, synth::default_schedule(), 19, cfg),
                  std::invalid_argument);
}

TEST_CASE("SBC ranks stay in 0..L and histograms add up") {
  synth::SbcConfig cfg;
  cfg.experiment.sampler.n_iterations = 1500;
  cfg.experiment.sampler.burn_in = 300;
  const synth::SbcReport rep =
      synth::sbc(PriorSpec{}, FixedSettings{}, synth::default_schedule(), 100, cfg);
  CHECK(rep.ranks.rows() + rep.failures == 100);
  CHECK(rep.ranks.minCoeff() >= 0);
  CHECK(rep.ranks.maxCoeff() <= 99);
  for (Eigen::Index j = 0; j < 4; ++j) {
    CHECK(rep.histograms.row(j).sum() == doctest::Approx(double(rep.ranks.rows())));
    CHECK(rep.uniformity[j].dof == 9.0);
  }
  CHECK_THROWS_AS(synth::sbc(PriorSpec{}, FixedSettings{}, synth::default_schedule(), 99, cfg),
                  std::invalid_argument);
}
