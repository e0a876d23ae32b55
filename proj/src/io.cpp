#include "ogtt/io.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>
#include <vector>

namespace ogtt::io {

namespace fs = std::filesystem;

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::optional<double> parse_double(std::string_view cell) {
  cell = trim(cell);
  if (cell.empty()) return std::nullopt;
  if (cell.front() == '+') cell.remove_prefix(1);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
  if (ec != std::errc{} || ptr != cell.data() + cell.size()) return std::nullopt;
  return value;
}

std::vector<std::string_view> split(std::string_view line, char sep = ',') {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    cells.push_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return cells;
}

std::string where(const fs::path& path, std::size_t line) {
  return path.string() + ":" + std::to_string(line);
}

// Numeric table with an exact header. Blank lines at the end are ignored.
struct Table {
  std::vector<std::vector<double>> rows;
  std::vector<std::size_t> lines;  // source line of each row
};

Table read_table(const fs::path& path, std::string_view header) {
  std::ifstream in(path);
  if (!in)
    throw ParseError(ParseError::Kind::MissingFile, 0, "cannot open " + path.string());
  const std::size_t width = split(header).size();

  Table table;
  std::string raw;
  std::size_t line_no = 0;
  bool saw_header = false;
  std::size_t blank_run_start = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string_view line = trim(raw);
    if (!saw_header) {
      if (line != header)
        throw ParseError(ParseError::Kind::MalformedHeader, line_no,
                         where(path, line_no) + ": expected header '" + std::string(header) +
                             "', got '" + std::string(line) + "'");
      saw_header = true;
      continue;
    }
    if (line.empty()) {
      if (blank_run_start == 0) blank_run_start = line_no;
      continue;
    }
    if (blank_run_start != 0)
      throw ParseError(ParseError::Kind::BadRecord, blank_run_start,
                       where(path, blank_run_start) + ": blank line inside data");
    const auto cells = split(line);
    if (cells.size() != width)
      throw ParseError(ParseError::Kind::BadRecord, line_no,
                       where(path, line_no) + ": expected " + std::to_string(width) +
                           " fields, got " + std::to_string(cells.size()));
    std::vector<double> row;
    row.reserve(width);
    for (const auto cell : cells) {
      const auto value = parse_double(cell);
      if (!value)
        throw ParseError(ParseError::Kind::NonNumericCell, line_no,
                         where(path, line_no) + ": non-numeric cell '" + std::string(trim(cell)) + "'");
      row.push_back(*value);
    }
    table.rows.push_back(std::move(row));
    table.lines.push_back(line_no);
  }
  if (!saw_header)
    throw ParseError(ParseError::Kind::MalformedHeader, 1,
                     where(path, 1) + ": empty file, expected header '" + std::string(header) + "'");
  return table;
}

std::ofstream open_for_write(const fs::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

void finish(std::ofstream& out, const fs::path& path) {
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
}

template <typename... Cells>
void write_row(std::ostream& os, double first, Cells... rest) {
  os << format_double(first);
  ((os << ',' << format_double(rest)), ...);
  os << '\n';
}

}  // namespace

std::string format_double(double x) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  if (ec != std::errc{}) throw IoError("cannot format number");
  return std::string(buf.data(), ptr);
}

ObservationSet read_observations(const fs::path& path) {
  const Table table = read_table(path, kObservationHeader);
  const auto n = static_cast<Eigen::Index>(table.rows.size());
  Eigen::VectorXd times(n), glucose(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = table.rows[static_cast<std::size_t>(i)];
    const std::size_t line = table.lines[static_cast<std::size_t>(i)];
    times(i) = row[0];
    glucose(i) = row[1];
    if (!std::isfinite(times(i)) || times(i) < 0.0)
      throw ParseError(ParseError::Kind::BadRecord, line, where(path, line) + ": time must be >= 0 hr");
    if (!std::isfinite(glucose(i)) || glucose(i) <= 0.0)
      throw ParseError(ParseError::Kind::BadRecord, line, where(path, line) + ": glucose must be > 0 mg/dL");
    if (i > 0 && !(times(i) > times(i - 1)))
      throw ParseError(ParseError::Kind::NonIncreasingTimes, line,
                       where(path, line) + ": times must be strictly increasing");
  }
  if (n < 2) {
    const std::size_t line = table.lines.empty() ? 1 : table.lines.back();
    throw ParseError(ParseError::Kind::TooFewRecords, line,
                     where(path, line) + ": need n >= 2 readings, got " + std::to_string(n));
  }
  return ObservationSet(std::move(times), std::move(glucose));
}

void write_observations(const fs::path& path, const ObservationSet& obs) {
  auto out = open_for_write(path);
  out << kObservationHeader << '\n';
  for (Eigen::Index i = 0; i < obs.size(); ++i) write_row(out, obs.times()(i), obs.glucose()(i));
  finish(out, path);
}

void write_posterior_csv(const fs::path& path, const PosteriorSample& sample) {
  if (sample.size() == 0) throw IoError("refusing to write an empty posterior sample to " + path.string());
  if (sample.dim() != 4) throw IoError("posterior sample must have 4 columns");
  auto out = open_for_write(path);
  out << kPosteriorHeader << '\n';
  for (Eigen::Index k = 0; k < sample.size(); ++k)
    write_row(out, sample.draws(k, 0), sample.draws(k, 1), sample.draws(k, 2), sample.draws(k, 3),
              sample.logpost(k));
  finish(out, path);
}

PosteriorSample read_posterior_csv(const fs::path& path) {
  const Table table = read_table(path, kPosteriorHeader);
  PosteriorSample sample;
  const auto n = static_cast<Eigen::Index>(table.rows.size());
  sample.draws.resize(n, 4);
  sample.logpost.resize(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const auto& row = table.rows[static_cast<std::size_t>(k)];
    for (Eigen::Index j = 0; j < 4; ++j) sample.draws(k, j) = row[static_cast<std::size_t>(j)];
    sample.logpost(k) = row[4];
  }
  return sample;
}

void write_band_csv(const fs::path& path, const PredictiveBand& band) {
  auto out = open_for_write(path);
  out << kBandHeader << '\n';
  for (Eigen::Index t = 0; t < band.times.size(); ++t)
    write_row(out, band.times(t), band.mean(t), band.quantiles(t, 0), band.quantiles(t, 1),
              band.quantiles(t, 2), band.quantiles(t, 3), band.quantiles(t, 4));
  finish(out, path);
}

PredictiveBand read_band_csv(const fs::path& path) {
  const Table table = read_table(path, kBandHeader);
  PredictiveBand band;
  const auto n = static_cast<Eigen::Index>(table.rows.size());
  band.times.resize(n);
  band.mean.resize(n);
  band.quantiles.resize(n, 5);
  for (Eigen::Index t = 0; t < n; ++t) {
    const auto& row = table.rows[static_cast<std::size_t>(t)];
    band.times(t) = row[0];
    band.mean(t) = row[1];
    for (Eigen::Index q = 0; q < 5; ++q) band.quantiles(t, q) = row[static_cast<std::size_t>(q + 2)];
  }
  return band;
}

void write_summary(std::ostream& os, const FitSummary& summary, const RunInfo& info) {
  os << "OGTT minimal-model fit\n";
  os << "seed: " << info.seed << "\n";
  os << "kept draws: " << info.n_draws << "\n";
  os << std::fixed << std::setprecision(3);
  os << "acceptance rate: " << info.acceptance_rate << "\n\n";

  os << std::left << std::setw(8) << "param" << std::right << std::setw(12) << "mean"
     << std::setw(12) << "sd" << std::setw(12) << "median" << std::setw(12) << "2.5%"
     << std::setw(12) << "97.5%";
  const bool have_diag = info.iat.size() == 4;
  if (have_diag) os << std::setw(12) << "IAT" << std::setw(12) << "ESS";
  os << "\n";
  for (std::size_t j = 0; j < 4; ++j) {
    const auto& s = summary.params[j];
    os << std::left << std::setw(8) << kParamNames[j] << std::right << std::setw(12) << s.mean
       << std::setw(12) << s.sd << std::setw(12) << s.median << std::setw(12) << s.lo
       << std::setw(12) << s.hi;
    if (have_diag) {
      const auto j_ = static_cast<Eigen::Index>(j);
      os << std::setw(12) << info.iat(j_) << std::setw(12) << std::setprecision(0) << info.ess(j_)
         << std::setprecision(3);
    }
    os << "\n";
  }

  os << "\ntheta0 flag: " << to_string(summary.theta0_flag) << " (posterior median "
     << summary.params[0].median << "; cutoffs low < " << format_double(summary.cutoffs.low) << ", high > "
     << format_double(summary.cutoffs.high) << " are tool defaults, not clinical values)\n";

  if (summary.g_3h) {
    const auto& g = *summary.g_3h;
    const std::string at = "G(" + format_double(g.time) + " h)";
    os << "\npredicted " << at << ", including observation noise:\n";
    os << "  mean " << g.mean << " mg/dL (latent curve mean " << g.latent_mean << ")\n";
    os << "  95% interval [" << g.lo << ", " << g.hi << "] mg/dL\n";
    os << "  P[" << at << " > " << format_double(g.threshold) << "] = " << g.prob_above << "  (" << g.n
       << " draws)\n";
  }
  if (!info.warnings.empty()) {
    os << "\nwarnings:\n";
    for (const auto& w : info.warnings) os << "  " << w << "\n";
  }
}

void write_band_svg(const fs::path& path, const PredictiveBand& band, const ObservationSet* obs,
                    Eigen::Index max_curves) {
  constexpr double kWidth = 800, kHeight = 500, kLeft = 70, kRight = 20, kTop = 20, kBottom = 50;
  const double t_max = band.times.size() > 0 ? band.times.maxCoeff() : 1.0;
  double y_min = band.quantiles.size() > 0 ? band.quantiles.minCoeff() : 0.0;
  double y_max = band.quantiles.size() > 0 ? band.quantiles.maxCoeff() : 1.0;
  const auto picks = thinned_indices(band.curves.rows(), max_curves);
  for (Eigen::Index row : picks) {
    y_min = std::min(y_min, band.curves.row(row).minCoeff());
    y_max = std::max(y_max, band.curves.row(row).maxCoeff());
  }
  if (obs) {
    y_min = std::min(y_min, obs->glucose().minCoeff());
    y_max = std::max(y_max, obs->glucose().maxCoeff());
  }
  y_min = 10.0 * std::floor(y_min / 10.0) - 10.0;
  y_max = 10.0 * std::ceil(y_max / 10.0) + 10.0;

  const auto px = [&](double t) { return kLeft + (kWidth - kLeft - kRight) * t / t_max; };
  const auto py = [&](double g) {
    return kHeight - kBottom - (kHeight - kTop - kBottom) * (g - y_min) / (y_max - y_min);
  };
  const auto polyline = [&](std::ostream& os, const auto& ys) {
    for (Eigen::Index t = 0; t < band.times.size(); ++t)
      os << (t ? " " : "") << px(band.times(t)) << ',' << py(ys(t));
  };
  const auto area = [&](std::ostream& os, Eigen::Index lo, Eigen::Index hi) {
    polyline(os, band.quantiles.col(hi));
    for (Eigen::Index t = band.times.size() - 1; t >= 0; --t)
      os << ' ' << px(band.times(t)) << ',' << py(band.quantiles(t, lo));
  };

  auto out = open_for_write(path);
  out << std::fixed << std::setprecision(2);
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  out << "<g stroke=\"#999999\" stroke-width=\"0.6\" stroke-opacity=\"0.35\" fill=\"none\">\n";
  for (Eigen::Index row : picks) {
    out << "<polyline points=\"";
    polyline(out, band.curves.row(row).transpose());
    out << "\"/>\n";
  }
  out << "</g>\n";

  out << "<polygon fill=\"#4a7fbf\" fill-opacity=\"0.18\" stroke=\"none\" points=\"";
  area(out, 0, 4);
  out << "\"/>\n<polygon fill=\"#4a7fbf\" fill-opacity=\"0.30\" stroke=\"none\" points=\"";
  area(out, 1, 3);
  out << "\"/>\n<polyline fill=\"none\" stroke=\"#1f4e8c\" stroke-width=\"2\" points=\"";
  polyline(out, band.quantiles.col(2));
  out << "\"/>\n";

  if (obs)
    for (Eigen::Index i = 0; i < obs->size(); ++i)
      out << "<circle cx=\"" << px(obs->times()(i)) << "\" cy=\"" << py(obs->glucose()(i))
          << "\" r=\"5\" fill=\"#d62728\"/>\n";

  // Axes with ticks every 0.5 hr and every 20-50 mg/dL.
  out << "<g stroke=\"black\" stroke-width=\"1\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<line x1=\"" << kLeft << "\" y1=\"" << kHeight - kBottom << "\" x2=\"" << kWidth - kRight
      << "\" y2=\"" << kHeight - kBottom << "\"/>\n";
  out << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\""
      << kHeight - kBottom << "\"/>\n";
  for (double t = 0.0; t <= t_max + 1e-9; t += 0.5)
    out << "<text stroke=\"none\" x=\"" << px(t) << "\" y=\"" << kHeight - kBottom + 18
        << "\" text-anchor=\"middle\">" << std::setprecision(1) << t << std::setprecision(2)
        << "</text>\n";
  const double y_tick = (y_max - y_min) > 200.0 ? 50.0 : 20.0;
  for (double g = std::ceil(y_min / y_tick) * y_tick; g <= y_max; g += y_tick)
    out << "<text stroke=\"none\" x=\"" << kLeft - 8 << "\" y=\"" << py(g) + 4
        << "\" text-anchor=\"end\">" << std::setprecision(0) << g << std::setprecision(2)
        << "</text>\n";
  out << "<text stroke=\"none\" x=\"" << (kLeft + kWidth - kRight) / 2 << "\" y=\"" << kHeight - 10
      << "\" text-anchor=\"middle\">time (hr)</text>\n";
  out << "<text stroke=\"none\" x=\"18\" y=\"" << (kTop + kHeight - kBottom) / 2
      << "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " << (kTop + kHeight - kBottom) / 2
      << ")\">glucose (mg/dL)</text>\n";
  out << "</g>\n</svg>\n";
  finish(out, path);
}

OutputFiles write_outputs(const PosteriorSample& sample, const PredictiveBand& band,
                          const FitSummary& summary, const fs::path& dir, const RunInfo& info,
                          const ObservationSet* obs) {
  if (sample.size() == 0) throw IoError("refusing to write outputs for an empty posterior sample");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());

  OutputFiles files{dir / "posterior.csv", dir / "band.csv", dir / "summary.txt", dir / "band.svg"};
  write_posterior_csv(files.posterior, sample);
  write_band_csv(files.band, band);
  {
    auto out = open_for_write(files.summary);
    write_summary(out, summary, info);
    finish(out, files.summary);
  }
  write_band_svg(files.svg, band, obs);
  return files;
}

// ---------------------------------------------------------------------------
// Configuration

PriorSpec RunConfig::priors_for(const ObservationSet& obs) const {
  PriorSpec spec = priors;
  spec.g0 = {g0_center.value_or(obs.glucose()(0)), g0_sd.value_or(2.0 * fs.sigma)};
  return spec;
}

void RunConfig::validate() const {
  fs.validate();
  PriorSpec check = priors;
  check.g0 = {g0_center.value_or(100.0), g0_sd.value_or(2.0 * fs.sigma)};
  check.validate();
  if (!(solver.step > 0.0)) throw std::invalid_argument("step must be > 0");
  if (!(band.horizon > 0.0)) throw std::invalid_argument("horizon must be > 0");
  if (!(band.grid_step > 0.0)) throw std::invalid_argument("grid_step must be > 0");
  if (band.max_curves < 1) throw std::invalid_argument("max_curves must be >= 1");
  if (!(sampler.n_iterations > sampler.burn_in))
    throw std::invalid_argument("iterations must exceed burn_in");
  if (sampler.thin < 1) throw std::invalid_argument("thin must be >= 1");
  if (!(cutoffs.low < cutoffs.high)) throw std::invalid_argument("theta0_low must be < theta0_high");
  if (!std::isfinite(g3h.threshold)) throw std::invalid_argument("threshold must be finite");
  if (out_dir.empty()) throw std::invalid_argument("out_dir must not be empty");
}

RunConfig parse_config(std::istream& is, const std::string& source) {
  RunConfig cfg;
  using Setter = std::function<void(std::string_view)>;

  const auto number = [](double& target) -> Setter {
    return [&target](std::string_view v) {
      const auto x = parse_double(v);
      if (!x) throw std::invalid_argument("expected a number, got '" + std::string(v) + "'");
      target = *x;
    };
  };
  const auto optional_number = [](std::optional<double>& target) -> Setter {
    return [&target](std::string_view v) {
      const auto x = parse_double(v);
      if (!x) throw std::invalid_argument("expected a number, got '" + std::string(v) + "'");
      target = *x;
    };
  };
  const auto count = [](auto& target) -> Setter {
    return [&target](std::string_view v) {
      using T = std::remove_reference_t<decltype(target)>;
      T x{};
      const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
      if (ec != std::errc{} || ptr != v.data() + v.size())
        throw std::invalid_argument("expected a non-negative integer, got '" + std::string(v) + "'");
      target = x;
    };
  };

  const std::map<std::string, Setter, std::less<>> setters = {
      {"a", number(cfg.fs.a)},
      {"b", number(cfg.fs.b)},
      {"c", number(cfg.fs.c)},
      {"gb", number(cfg.fs.gb)},
      {"v0", number(cfg.fs.v0)},
      {"sigma", number(cfg.fs.sigma)},
      {"theta0_shape", number(cfg.priors.theta0.shape)},
      {"theta0_rate", number(cfg.priors.theta0.rate)},
      {"theta1_shape", number(cfg.priors.theta1.shape)},
      {"theta1_rate", number(cfg.priors.theta1.rate)},
      {"theta2_shape", number(cfg.priors.theta2.shape)},
      {"theta2_rate", number(cfg.priors.theta2.rate)},
      {"theta2_lo", number(cfg.priors.theta2.lo)},
      {"theta2_hi", number(cfg.priors.theta2.hi)},
      {"g0_center", optional_number(cfg.g0_center)},
      {"g0_sd", optional_number(cfg.g0_sd)},
      {"iterations", count(cfg.sampler.n_iterations)},
      {"burn_in", count(cfg.sampler.burn_in)},
      {"thin", count(cfg.sampler.thin)},
      {"seed", count(cfg.sampler.seed)},
      {"step", number(cfg.solver.step)},
      {"horizon", number(cfg.band.horizon)},
      {"grid_step", number(cfg.band.grid_step)},
      {"max_curves", count(cfg.band.max_curves)},
      {"threshold", number(cfg.g3h.threshold)},
      {"theta0_low", number(cfg.cutoffs.low)},
      {"theta0_high", number(cfg.cutoffs.high)},
      {"out_dir", [&cfg](std::string_view v) { cfg.out_dir = std::string(v); }},
  };

  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(is, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string at = source + ":" + std::to_string(line_no);
    if (eq == std::string_view::npos)
      throw std::invalid_argument(at + ": expected 'key = value'");
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));
    const auto it = setters.find(key);
    if (it == setters.end()) throw std::invalid_argument(at + ": unknown key '" + std::string(key) + "'");
    if (value.empty()) throw std::invalid_argument(at + ": missing value for '" + std::string(key) + "'");
    try {
      it->second(value);
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument(at + ": " + std::string(key) + ": " + e.what());
    }
  }
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(source + ": " + e.what());
  }
  return cfg;
}

RunConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  return parse_config(in, path.string());
}

}  // namespace ogtt::io
