#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

namespace lsep::numerics {

enum class OdeMethodName {
  FehlbergRK45,      // Fehlberg 4(5), advanced with the fifth-order solution
  HighOrderEmbedded  // Dormand-Prince 8(5,3)
};

struct OdeMethod {
  OdeMethodName name = OdeMethodName::HighOrderEmbedded;
  double abs_tol = 1e-12;
  double rel_tol = 1e-10;
  double initial_step = 0.0;  // 0 selects an automatic first step
  double max_step = 0.0;      // 0 means unbounded
  std::size_t max_steps = 10'000'000;

  int order_main() const;
  int order_embedded() const;

  static OdeMethod fehlberg45(double abs_tol, double rel_tol);
  static OdeMethod high_order(double abs_tol, double rel_tol);
};

std::string_view to_string(OdeMethodName name);

// The adaptive controller aborts with StepUnderflow below this step size (s).
inline constexpr double kMinStep = 1e-21;

struct StepStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t evaluations = 0;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<std::vector<double>> states;
  StepStats step_stats;
};

// dy/dt = f(t, y), written into `dydt`.
using OdeRhs = std::function<void(double t, std::span<const double> y, std::span<double> dydt)>;

// Adaptive embedded Runge-Kutta integration from t0 to t1. Steps are clipped
// so every requested sample time is landed on exactly; the trajectory holds
// the solution at `sample_times` (sorted ascending, inside [t0, t1]).
// Throws StepUnderflow when the controller refuses a step smaller than
// kMinStep (s) and MaxStepsExceeded past method.max_steps.
Trajectory integrate(const OdeRhs& f, std::span<const double> y0, double t0, double t1,
                     const OdeMethod& method, std::span<const double> sample_times);

}  // namespace lsep::numerics
