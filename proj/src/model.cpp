#include "ogtt/model.hpp"

#include <sstream>

namespace ogtt {

namespace {

bool positive_finite(double x) { return std::isfinite(x) && x > 0.0; }

void require(bool ok, const char* what) {
  if (!ok) throw std::invalid_argument(what);
}

using Reduced = Eigen::Vector3d;  // (G, I, L)

// Rates of the (G, I, L) subsystem, with reciprocals precomputed.
struct ForcedSystem {
  ForcedSystem(const PatientParams& p, const FixedSettings& fs)
      : theta0(p.theta0), theta1(p.theta1), gb(fs.gb), inv_theta2(1.0 / p.theta2),
        inv_a(1.0 / fs.a), inv_b(1.0 / fs.b) {}

  // Derivatives given the digestive forcing D at the same instant.
  Reduced operator()(const Reduced& s, double d) const {
    Reduced ds;
    ds(0) = s(2) - s(1) + d * inv_theta2;
    ds(1) = theta0 * positive_part(s(0) - gb) - s(1) * inv_a;
    ds(2) = theta1 * positive_part(gb - s(0)) - s(2) * inv_b;
    return ds;
  }

  double theta0, theta1, gb, inv_theta2, inv_a, inv_b;
};

// Classical RK4 over [t0, t1] in equal substeps no longer than `step`.
class Stepper {
 public:
  Stepper(const PatientParams& p, const FixedSettings& fs, const SolverOptions& opts)
      : p_(p), fs_(fs), opts_(opts), forced_(p, fs) {
    full_ << p.g0, 0.0, 0.0, 0.0, fs.v0;
    reduced_ << p.g0, 0.0, 0.0;
  }

  void advance_to(double t1) {
    if (t1 <= t_) return;
    const auto n = static_cast<long>(std::ceil((t1 - t_) / opts_.step - 1e-9));
    const long substeps = std::max(1L, n);
    const double h = (t1 - t_) / static_cast<double>(substeps);
    if (opts_.path == Integration::Full) {
      for (long k = 0; k < substeps; ++k) step_full(h);
    } else {
      // D(t) is a difference of two exponentials; advance both by their
      // half-step factors instead of calling exp at every stage.
      const double drink_half = std::exp(-h / fs_.c);
      const double gut_half = std::exp(-0.5 * h / p_.theta2);
      double drink = std::exp(-2.0 * t_ / fs_.c);
      double gut = std::exp(-t_ / p_.theta2);
      const ForcedSystem system = forced_;
      const double amplitude = fs_.v0 / (fs_.c / (2.0 * p_.theta2) - 1.0);
      Reduced y = reduced_;
      for (long k = 0; k < substeps; ++k) {
        const double d_start = amplitude * (drink - gut);
        drink *= drink_half;
        gut *= gut_half;
        const double d_mid = amplitude * (drink - gut);
        drink *= drink_half;
        gut *= gut_half;
        const double d_end = amplitude * (drink - gut);

        const Reduced k1 = system(y, d_start);
        const Reduced k2 = system(y + 0.5 * h * k1, d_mid);
        const Reduced k3 = system(y + 0.5 * h * k2, d_mid);
        const Reduced k4 = system(y + h * k3, d_end);
        y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
      }
      reduced_ = y;
    }
    t_ = t1;
    if (!current().allFinite()) {
      std::ostringstream msg;
      msg << "non-finite state at t = " << t_ << " hr";
      throw IntegrationError(t_, msg.str());
    }
  }

  State current() const {
    if (opts_.path == Integration::Full) return full_;
    const DrinkDigest dv = analytic_dv(t_, p_, fs_);
    State s;
    s << reduced_(0), reduced_(1), reduced_(2), dv.d, dv.v;
    return s;
  }

  double glucose() const {
    return opts_.path == Integration::Full ? full_(kGlucose) : reduced_(0);
  }

 private:
  void step_full(double h) {
    const State k1 = rhs<double>(full_, p_, fs_);
    const State k2 = rhs<double>(full_ + 0.5 * h * k1, p_, fs_);
    const State k3 = rhs<double>(full_ + 0.5 * h * k2, p_, fs_);
    const State k4 = rhs<double>(full_ + h * k3, p_, fs_);
    full_ += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }

  const PatientParams& p_;
  const FixedSettings& fs_;
  const SolverOptions& opts_;
  ForcedSystem forced_;
  double t_ = 0.0;
  State full_;
  Reduced reduced_;
};

void check_inputs(const PatientParams& p, const FixedSettings& fs, const SolverOptions& opts) {
  fs.validate(true);
  p.validate(fs);
  require(positive_finite(opts.step), "integration step must be > 0");
}

}  // namespace

void FixedSettings::validate(bool allow_zero_sigma) const {
  require(positive_finite(a), "a must be > 0");
  require(positive_finite(b), "b must be > 0");
  require(positive_finite(c), "c must be > 0");
  require(positive_finite(gb), "gb must be > 0");
  require(positive_finite(v0) || v0 == 0.0, "v0 must be >= 0");
  require(positive_finite(sigma) || (allow_zero_sigma && sigma == 0.0), "sigma must be > 0");
}

PatientParams PatientParams::from_vector(const Eigen::Ref<const Eigen::VectorXd>& v) {
  require(v.size() == kDim, "parameter vector must have 4 entries");
  return {v(0), v(1), v(2), v(3)};
}

bool PatientParams::admissible(const FixedSettings& fs) const {
  return positive_finite(theta0) && positive_finite(theta1) && positive_finite(g0) &&
         std::isfinite(theta2) && theta2 > fs.c / 2.0;
}

void PatientParams::validate(const FixedSettings& fs) const {
  require(positive_finite(theta0), "theta0 must be > 0");
  require(positive_finite(theta1), "theta1 must be > 0");
  require(std::isfinite(theta2) && theta2 > fs.c / 2.0, "theta2 must be > c/2");
  require(positive_finite(g0), "g0 must be > 0");
}

DrinkDigest analytic_dv(double t, const PatientParams& p, const FixedSettings& fs) {
  require(t >= 0.0, "analytic_dv: t must be >= 0");
  require(p.theta2 > fs.c / 2.0, "analytic_dv: theta2 must exceed c/2");
  const double drink_decay = std::exp(-2.0 * t / fs.c);
  const double gut_decay = std::exp(-t / p.theta2);
  const double scale = fs.v0 / (1.0 - fs.c / (2.0 * p.theta2));
  return {scale * (gut_decay - drink_decay), fs.v0 * drink_decay};
}

Trajectory simulate(const PatientParams& p, const FixedSettings& fs, double t_end,
                    double grid_step, const SolverOptions& opts) {
  check_inputs(p, fs, opts);
  require(positive_finite(t_end), "simulate: t_end must be > 0");
  require(positive_finite(grid_step), "simulate: grid_step must be > 0");

  const auto n = static_cast<Eigen::Index>(std::floor(t_end / grid_step + 1e-9));
  const bool append_end = t_end - static_cast<double>(n) * grid_step > 1e-9 * t_end;
  const Eigen::Index points = n + 1 + (append_end ? 1 : 0);

  Trajectory traj;
  traj.times.resize(points);
  traj.states.resize(points, 5);
  for (Eigen::Index k = 0; k <= n; ++k) traj.times(k) = static_cast<double>(k) * grid_step;
  if (append_end) traj.times(points - 1) = t_end;

  Stepper stepper(p, fs, opts);
  for (Eigen::Index k = 0; k < points; ++k) {
    stepper.advance_to(traj.times(k));
    traj.states.row(k) = stepper.current().transpose();
  }
  return traj;
}

Eigen::VectorXd glucose_at(const PatientParams& p, const FixedSettings& fs,
                           std::span<const double> times, const SolverOptions& opts) {
  check_inputs(p, fs, opts);
  Eigen::VectorXd out(static_cast<Eigen::Index>(times.size()));
  Stepper stepper(p, fs, opts);
  double previous = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    require(std::isfinite(times[i]) && times[i] >= previous,
            "glucose_at: times must be sorted and >= 0");
    stepper.advance_to(times[i]);
    out(static_cast<Eigen::Index>(i)) = stepper.glucose();
    previous = times[i];
  }
  return out;
}

}  // namespace ogtt
