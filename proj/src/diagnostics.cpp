#include "ogtt/diagnostics.hpp"

#include <unsupported/Eigen/FFT>

#include <cmath>
#include <complex>
#include <limits>
#include <vector>

namespace ogtt {

namespace {

constexpr double kWindowFactor = 5.0;

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace

Eigen::VectorXd autocorrelation(const Eigen::Ref<const Eigen::VectorXd>& series) {
  const auto n = static_cast<std::size_t>(series.size());
  Eigen::VectorXd rho = Eigen::VectorXd::Zero(series.size());
  if (n == 0) return rho;
  rho(0) = 1.0;

  const double mean = series.mean();
  const std::size_t len = next_pow2(2 * n);
  std::vector<double> padded(len, 0.0);
  for (std::size_t i = 0; i < n; ++i) padded[i] = series(static_cast<Eigen::Index>(i)) - mean;

  Eigen::FFT<double> fft;
  std::vector<std::complex<double>> spectrum;
  fft.fwd(spectrum, padded);
  for (auto& z : spectrum) z = std::norm(z);
  std::vector<double> acov;
  fft.inv(acov, spectrum);

  if (!(acov[0] > 0.0)) return rho;
  for (std::size_t k = 0; k < n; ++k) rho(static_cast<Eigen::Index>(k)) = acov[k] / acov[0];
  return rho;
}

double integrated_autocorrelation_time(const Eigen::Ref<const Eigen::VectorXd>& series) {
  const Eigen::Index n = series.size();
  if (n < 2) return std::numeric_limits<double>::infinity();
  const double mean = series.mean();
  if ((series.array() - mean).abs().maxCoeff() == 0.0) return std::numeric_limits<double>::infinity();

  const Eigen::VectorXd rho = autocorrelation(series);
  double tau = 1.0;
  for (Eigen::Index m = 1; m < n; ++m) {
    tau += 2.0 * rho(m);
    if (static_cast<double>(m) >= kWindowFactor * tau) break;
  }
  return std::max(tau, 1.0);
}

ChainSummary diagnostics(const PosteriorSample& sample) {
  if (sample.size() < kMinDiagnosticDraws)
    throw InsufficientDrawsError("diagnostics need at least " +
                                 std::to_string(kMinDiagnosticDraws) + " draws, got " +
                                 std::to_string(sample.size()));
  ChainSummary out;
  out.acceptance_rate = sample.acceptance_rate;
  const Eigen::Index dim = sample.dim();
  out.iat.resize(dim);
  out.ess.resize(dim);
  out.degenerate.resize(dim);
  const auto n = static_cast<double>(sample.size());
  for (Eigen::Index j = 0; j < dim; ++j) {
    out.iat(j) = integrated_autocorrelation_time(sample.draws.col(j));
    out.degenerate(j) = !std::isfinite(out.iat(j));
    out.ess(j) = out.degenerate(j) ? 0.0 : n / out.iat(j);
  }
  return out;
}

std::size_t suggested_thin(const ChainSummary& summary) {
  double worst = 1.0;
  for (Eigen::Index j = 0; j < summary.iat.size(); ++j)
    if (!summary.degenerate(j)) worst = std::max(worst, summary.iat(j));
  return static_cast<std::size_t>(std::ceil(worst));
}

}  // namespace ogtt
