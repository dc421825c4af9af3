#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace lsep::numerics {

struct NelderMeadOptions {
  double rel_tol = 1e-8;    // on the spread of simplex values
  double x_tol = 1e-10;     // on the simplex diameter, in the caller's units
  std::size_t max_evaluations = 20000;
};

struct NelderMeadResult {
  std::vector<double> x;
  double value = 0.0;
  std::size_t evaluations = 0;
  bool converged = false;
};

// Derivative-free simplex minimisation. `steps` sets the initial simplex
// edge along each coordinate. Box bounds are enforced by clamping trial
// points; lower/upper may be empty for an unbounded problem.
NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& f,
                             std::span<const double> x0, std::span<const double> steps,
                             std::span<const double> lower, std::span<const double> upper,
                             const NelderMeadOptions& options = {});

}  // namespace lsep::numerics
