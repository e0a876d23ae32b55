// File formats and run configuration.
//
//   observations  time_hr,glucose_mg_dl
//   posterior.csv theta0,theta1,theta2,g0,log_post
//   band.csv      time_hr,mean,q05,q25,q50,q75,q95
//   summary.txt   human-readable FitSummary
//   band.svg      data points, a thinned set of posterior curves and the band
//
// Numbers are written in the shortest decimal form that parses back to the
// same double, so every CSV round-trips bit-exactly. Times are hours.
#ifndef OGTT_IO_HPP
#define OGTT_IO_HPP

#include "ogtt/analysis.hpp"
#include "ogtt/inference.hpp"
#include "ogtt/twalk.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>

namespace ogtt::io {

inline constexpr const char* kObservationHeader = "time_hr,glucose_mg_dl";
inline constexpr const char* kPosteriorHeader = "theta0,theta1,theta2,g0,log_post";
inline constexpr const char* kBandHeader = "time_hr,mean,q05,q25,q50,q75,q95";

/// Any I/O failure, with the path in the message.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A problem in the content of an input file. `line` is 1-based and counts
/// the header; 0 when the problem is not tied to one line.
class ParseError : public IoError {
 public:
  enum class Kind { MissingFile, MalformedHeader, NonNumericCell, BadRecord, NonIncreasingTimes, TooFewRecords };

  ParseError(Kind kind, std::size_t line, const std::string& what)
      : IoError(what), kind_(kind), line_(line) {}
  Kind kind() const { return kind_; }
  std::size_t line() const { return line_; }

 private:
  Kind kind_;
  std::size_t line_;
};

/// Shortest round-trip decimal representation.
std::string format_double(double x);

ObservationSet read_observations(const std::filesystem::path& path);
void write_observations(const std::filesystem::path& path, const ObservationSet& obs);

void write_posterior_csv(const std::filesystem::path& path, const PosteriorSample& sample);
/// Reads draws and log_post back; diagnostics fields are left empty.
PosteriorSample read_posterior_csv(const std::filesystem::path& path);

void write_band_csv(const std::filesystem::path& path, const PredictiveBand& band);
/// Reads times, mean and quantiles; `curves` stays empty.
PredictiveBand read_band_csv(const std::filesystem::path& path);

/// Extra run facts printed in summary.txt.
struct RunInfo {
  std::uint64_t seed = 0;
  Eigen::Index n_draws = 0;
  double acceptance_rate = 0.0;
  Eigen::VectorXd iat;
  Eigen::VectorXd ess;
  std::vector<std::string> warnings;
};

void write_summary(std::ostream& os, const FitSummary& summary, const RunInfo& info);

void write_band_svg(const std::filesystem::path& path, const PredictiveBand& band,
                    const ObservationSet* obs = nullptr, Eigen::Index max_curves = 100);

struct OutputFiles {
  std::filesystem::path posterior;
  std::filesystem::path band;
  std::filesystem::path summary;
  std::filesystem::path svg;
};

/// Writes the four output files into `dir` (created if needed). Refuses an
/// empty sample.
OutputFiles write_outputs(const PosteriorSample& sample, const PredictiveBand& band,
                          const FitSummary& summary, const std::filesystem::path& dir,
                          const RunInfo& info = {}, const ObservationSet* obs = nullptr);

/// Everything a run can override. Parsed from flat `key = value` text with
/// `#` comments; unknown keys are an error.
struct RunConfig {
  FixedSettings fs;
  PriorSpec priors;
  std::optional<double> g0_center;  ///< default: first reading
  std::optional<double> g0_sd;      ///< default: 2 sigma
  SamplerConfig sampler;
  SolverOptions solver;
  BandOptions band;
  G3hOptions g3h;
  Theta0Cutoffs cutoffs;
  std::string out_dir = "ogtt_out";

  /// Priors for a fit of `obs`, with the g0 defaults filled in.
  PriorSpec priors_for(const ObservationSet& obs) const;

  /// Throws std::invalid_argument if any override breaks an invariant.
  void validate() const;
};

/// `source` names the input in error messages.
RunConfig parse_config(std::istream& is, const std::string& source = "<config>");
RunConfig load_config(const std::filesystem::path& path);

}  // namespace ogtt::io

#endif  // OGTT_IO_HPP
