#include "lsep/numerics/ode.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "dop853_tableau.hpp"
#include "lsep/errors.hpp"

namespace lsep::numerics {

int OdeMethod::order_main() const { return name == OdeMethodName::FehlbergRK45 ? 5 : 8; }
int OdeMethod::order_embedded() const { return name == OdeMethodName::FehlbergRK45 ? 4 : 5; }

OdeMethod OdeMethod::fehlberg45(double abs_tol, double rel_tol) {
  OdeMethod m;
  m.name = OdeMethodName::FehlbergRK45;
  m.abs_tol = abs_tol;
  m.rel_tol = rel_tol;
  return m;
}

OdeMethod OdeMethod::high_order(double abs_tol, double rel_tol) {
  OdeMethod m;
  m.name = OdeMethodName::HighOrderEmbedded;
  m.abs_tol = abs_tol;
  m.rel_tol = rel_tol;
  return m;
}

std::string_view to_string(OdeMethodName name) {
  switch (name) {
    case OdeMethodName::FehlbergRK45:
      return "FehlbergRK45";
    case OdeMethodName::HighOrderEmbedded:
      return "HighOrderEmbedded";
  }
  return "?";
}

namespace {

namespace rkf45 {
constexpr int kStages = 6;
constexpr double C[kStages] = {0.0, 1.0 / 4.0, 3.0 / 8.0, 12.0 / 13.0, 1.0, 1.0 / 2.0};
constexpr double A[kStages][kStages] = {
    {0, 0, 0, 0, 0, 0},
    {1.0 / 4.0, 0, 0, 0, 0, 0},
    {3.0 / 32.0, 9.0 / 32.0, 0, 0, 0, 0},
    {1932.0 / 2197.0, -7200.0 / 2197.0, 7296.0 / 2197.0, 0, 0, 0},
    {439.0 / 216.0, -8.0, 3680.0 / 513.0, -845.0 / 4104.0, 0, 0},
    {-8.0 / 27.0, 2.0, -3544.0 / 2565.0, 1859.0 / 4104.0, -11.0 / 40.0, 0},
};
constexpr double B5[kStages] = {16.0 / 135.0, 0.0, 6656.0 / 12825.0, 28561.0 / 56430.0, -9.0 / 50.0, 2.0 / 55.0};
constexpr double B4[kStages] = {25.0 / 216.0, 0.0, 1408.0 / 2565.0, 2197.0 / 4104.0, -1.0 / 5.0, 0.0};
}  // namespace rkf45

constexpr double kSafety = 0.9;
constexpr double kMaxGrowth = 5.0;
constexpr double kMaxShrink = 0.2;

class Stepper {
 public:
  Stepper(const OdeRhs& f, std::size_t n, OdeMethodName name)
      : f_(f), n_(n), name_(name), k_(13, std::vector<double>(n)), tmp_(n) {}

  // One trial step from (t, y) with f(t, y) in k_[0]. Returns the scaled
  // error norm; y_new and f_new are written on success or failure alike.
  double step(double t, std::span<const double> y, double h, const OdeMethod& m,
              std::vector<double>& y_new, std::vector<double>& f_new, StepStats& stats) {
    const int stages = name_ == OdeMethodName::FehlbergRK45 ? rkf45::kStages : dop853::kStages;
    for (int s = 1; s < stages; ++s) {
      for (std::size_t i = 0; i < n_; ++i) {
        double acc = 0.0;
        for (int j = 0; j < s; ++j) acc += a(s, j) * k_[j][i];
        tmp_[i] = y[i] + h * acc;
      }
      f_(t + c(s) * h, tmp_, k_[s]);
      ++stats.evaluations;
    }
    for (std::size_t i = 0; i < n_; ++i) {
      double acc = 0.0;
      for (int j = 0; j < stages; ++j) acc += b(j) * k_[j][i];
      y_new[i] = y[i] + h * acc;
    }
    f_(t + h, y_new, f_new);
    ++stats.evaluations;

    auto scale = [&](std::size_t i) {
      return m.abs_tol + m.rel_tol * std::max(std::abs(y[i]), std::abs(y_new[i]));
    };

    if (name_ == OdeMethodName::FehlbergRK45) {
      double sum = 0.0;
      for (std::size_t i = 0; i < n_; ++i) {
        double e = 0.0;
        for (int j = 0; j < stages; ++j) e += (rkf45::B5[j] - rkf45::B4[j]) * k_[j][i];
        e *= h / scale(i);
        sum += e * e;
      }
      return std::sqrt(sum / static_cast<double>(n_));
    }

    // Combined fifth/third-order estimate used by DOP853.
    double e5 = 0.0;
    double e3 = 0.0;
    for (std::size_t i = 0; i < n_; ++i) {
      double a5 = dop853::E5[12] * f_new[i];
      double a3 = dop853::E3[12] * f_new[i];
      for (int j = 0; j < stages; ++j) {
        a5 += dop853::E5[j] * k_[j][i];
        a3 += dop853::E3[j] * k_[j][i];
      }
      const double sc = scale(i);
      e5 += (a5 / sc) * (a5 / sc);
      e3 += (a3 / sc) * (a3 / sc);
    }
    if (e5 == 0.0 && e3 == 0.0) return 0.0;
    const double denom = e5 + 0.01 * e3;
    return std::abs(h) * e5 / std::sqrt(denom * static_cast<double>(n_));
  }

  std::vector<double>& k0() { return k_[0]; }

 private:
  double a(int s, int j) const {
    return name_ == OdeMethodName::FehlbergRK45 ? rkf45::A[s][j] : dop853::A[s][j];
  }
  double b(int j) const { return name_ == OdeMethodName::FehlbergRK45 ? rkf45::B5[j] : dop853::B[j]; }
  double c(int s) const { return name_ == OdeMethodName::FehlbergRK45 ? rkf45::C[s] : dop853::C[s]; }

  const OdeRhs& f_;
  std::size_t n_;
  OdeMethodName name_;
  std::vector<std::vector<double>> k_;
  std::vector<double> tmp_;
};

double rms_scaled(std::span<const double> v, std::span<const double> y, const OdeMethod& m) {
  double s = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double d = v[i] / (m.abs_tol + m.rel_tol * std::abs(y[i]));
    s += d * d;
  }
  return std::sqrt(s / static_cast<double>(v.size()));
}

// Starting step heuristic from Hairer, Norsett & Wanner (II.4).
double initial_step(const OdeRhs& f, std::span<const double> y0, std::span<const double> f0, double t0,
                    double span, const OdeMethod& m, StepStats& stats) {
  const double d0 = rms_scaled(y0, y0, m);
  const double d1 = rms_scaled(f0, y0, m);
  double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 * span : 0.01 * d0 / d1;
  h0 = std::min(h0, span);
  std::vector<double> y1(y0.size());
  std::vector<double> f1(y0.size());
  for (std::size_t i = 0; i < y0.size(); ++i) y1[i] = y0[i] + h0 * f0[i];
  f(t0 + h0, y1, f1);
  ++stats.evaluations;
  std::vector<double> df(y0.size());
  for (std::size_t i = 0; i < y0.size(); ++i) df[i] = (f1[i] - f0[i]);
  const double d2 = rms_scaled(df, y0, m) / h0;
  const int order = m.order_embedded() + 1;
  double h1 = 0.0;
  if (std::max(d1, d2) <= 1e-15) {
    h1 = std::max(1e-6 * span, h0 * 1e-3);
  } else {
    h1 = std::pow(0.01 / std::max(d1, d2), 1.0 / order);
  }
  return std::min({100.0 * h0, h1, span});
}

}  // namespace

Trajectory integrate(const OdeRhs& f, std::span<const double> y0, double t0, double t1,
                     const OdeMethod& method, std::span<const double> sample_times) {
  if (!(t1 > t0)) throw std::invalid_argument("integrate: requires t1 > t0");
  if (!(method.abs_tol > 0.0) || !(method.rel_tol > 0.0))
    throw std::invalid_argument("integrate: tolerances must be positive");
  if (y0.empty()) throw std::invalid_argument("integrate: empty state");
  for (std::size_t i = 0; i < sample_times.size(); ++i) {
    if (sample_times[i] < t0 || sample_times[i] > t1)
      throw std::invalid_argument("integrate: sample time outside [t0, t1]");
    if (i > 0 && !(sample_times[i] > sample_times[i - 1]))
      throw std::invalid_argument("integrate: sample times must be strictly increasing");
  }

  const std::size_t n = y0.size();
  Trajectory traj;
  traj.times.reserve(sample_times.size());
  traj.states.reserve(sample_times.size());

  std::vector<double> y(y0.begin(), y0.end());
  std::vector<double> y_new(n);
  std::vector<double> f_new(n);
  Stepper stepper(f, n, method.name);
  f(t0, y, stepper.k0());
  ++traj.step_stats.evaluations;

  std::size_t next = 0;
  while (next < sample_times.size() && sample_times[next] == t0) {
    traj.times.push_back(t0);
    traj.states.push_back(y);
    ++next;
  }

  const double span = t1 - t0;
  double h = method.initial_step > 0.0
                 ? method.initial_step
                 : initial_step(f, y, stepper.k0(), t0, span, method, traj.step_stats);
  if (method.max_step > 0.0) h = std::min(h, method.max_step);

  const int k = method.order_embedded() + 1;
  const double alpha = 0.7 / k;
  const double beta = 0.4 / k;
  double err_prev = 1.0;
  double t = t0;

  while (t < t1) {
    if (traj.step_stats.accepted + traj.step_stats.rejected >= method.max_steps)
      throw MaxStepsExceeded("integrate: exceeded " + std::to_string(method.max_steps) + " steps");
    if (h < kMinStep) {
      throw StepUnderflow("integrate: step size " + std::to_string(h) + " s fell below the minimum at t = " +
                          std::to_string(t) + " s");
    }

    // Clip to the next sample time or the end point.
    double target = t1;
    if (next < sample_times.size()) target = std::min(target, sample_times[next]);
    double h_try = h;
    bool lands = false;
    if (t + h_try >= target || (target - t - h_try) < 1e-12 * h_try) {
      h_try = target - t;
      lands = true;
    }

    const double err = stepper.step(t, y, h_try, method, y_new, f_new, traj.step_stats);
    if (!std::isfinite(err)) {
      ++traj.step_stats.rejected;
      h *= kMaxShrink;
      continue;
    }
    if (err <= 1.0) {
      ++traj.step_stats.accepted;
      t = lands ? target : t + h_try;
      y.swap(y_new);
      std::swap(stepper.k0(), f_new);
      while (next < sample_times.size() && sample_times[next] <= t) {
        traj.times.push_back(sample_times[next]);
        traj.states.push_back(y);
        ++next;
      }
      double factor = err == 0.0 ? kMaxGrowth
                                 : kSafety * std::pow(err, -alpha) * std::pow(err_prev, beta);
      factor = std::clamp(factor, kMaxShrink, kMaxGrowth);
      err_prev = std::max(err, 1e-4);
      // A clipped step says nothing about the attainable step size.
      if (!lands || h_try >= h) h *= factor;
      if (method.max_step > 0.0) h = std::min(h, method.max_step);
    } else {
      ++traj.step_stats.rejected;
      const double factor = std::max(kMaxShrink, kSafety * std::pow(err, -1.0 / k));
      h = h_try * factor;
    }
  }
  return traj;
}

}  // namespace lsep::numerics
