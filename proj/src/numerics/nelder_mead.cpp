#include "lsep/numerics/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace lsep::numerics {

NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& f,
                             std::span<const double> x0, std::span<const double> steps,
                             std::span<const double> lower, std::span<const double> upper,
                             const NelderMeadOptions& options) {
  const std::size_t n = x0.size();
  if (steps.size() != n) throw std::invalid_argument("nelder_mead: steps length mismatch");
  if (!lower.empty() && lower.size() != n) throw std::invalid_argument("nelder_mead: lower bound length");
  if (!upper.empty() && upper.size() != n) throw std::invalid_argument("nelder_mead: upper bound length");

  NelderMeadResult res;
  auto clamp = [&](std::vector<double>& x) {
    for (std::size_t i = 0; i < n; ++i) {
      if (!lower.empty()) x[i] = std::max(x[i], lower[i]);
      if (!upper.empty()) x[i] = std::min(x[i], upper[i]);
    }
  };
  auto eval = [&](std::vector<double>& x) {
    clamp(x);
    ++res.evaluations;
    return f(x);
  };

  std::vector<std::vector<double>> simplex(n + 1, std::vector<double>(x0.begin(), x0.end()));
  std::vector<double> values(n + 1);
  for (std::size_t i = 0; i < n; ++i) {
    simplex[i + 1][i] += steps[i];
    // Flip the vertex inward if the bound swallowed the step.
    std::vector<double> probe = simplex[i + 1];
    clamp(probe);
    if (probe[i] == x0[i]) simplex[i + 1][i] = x0[i] - steps[i];
  }
  for (std::size_t i = 0; i <= n; ++i) values[i] = eval(simplex[i]);

  std::vector<std::size_t> order(n + 1);
  std::vector<double> centroid(n);
  std::vector<double> trial(n);
  std::vector<double> trial2(n);
  while (res.evaluations < options.max_evaluations) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second = order[n - 1];

    const double spread = std::abs(values[worst] - values[best]);
    double diameter = 0.0;
    for (std::size_t v = 0; v <= n; ++v)
      for (std::size_t i = 0; i < n; ++i) diameter = std::max(diameter, std::abs(simplex[v][i] - simplex[best][i]));
    const double f_tol = options.rel_tol * std::abs(values[best]) + 1e-300;
    if (diameter <= options.x_tol && spread <= f_tol) {
      res.converged = true;
      break;
    }

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t v = 0; v <= n; ++v) {
      if (v == worst) continue;
      for (std::size_t i = 0; i < n; ++i) centroid[i] += simplex[v][i] / static_cast<double>(n);
    }
    for (std::size_t i = 0; i < n; ++i) trial[i] = centroid[i] + (centroid[i] - simplex[worst][i]);
    const double fr = eval(trial);
    if (fr < values[best]) {
      for (std::size_t i = 0; i < n; ++i) trial2[i] = centroid[i] + 2.0 * (centroid[i] - simplex[worst][i]);
      const double fe = eval(trial2);
      if (fe < fr) {
        simplex[worst] = trial2;
        values[worst] = fe;
      } else {
        simplex[worst] = trial;
        values[worst] = fr;
      }
      continue;
    }
    if (fr < values[second]) {
      simplex[worst] = trial;
      values[worst] = fr;
      continue;
    }
    const bool outside = fr < values[worst];
    for (std::size_t i = 0; i < n; ++i) {
      trial2[i] = outside ? centroid[i] + 0.5 * (trial[i] - centroid[i])
                          : centroid[i] + 0.5 * (simplex[worst][i] - centroid[i]);
    }
    const double fc = eval(trial2);
    if (fc < std::min(fr, values[worst])) {
      simplex[worst] = trial2;
      values[worst] = fc;
      continue;
    }
    // Shrink toward the best vertex.
    for (std::size_t v = 0; v <= n; ++v) {
      if (v == best) continue;
      for (std::size_t i = 0; i < n; ++i) simplex[v][i] = simplex[best][i] + 0.5 * (simplex[v][i] - simplex[best][i]);
      values[v] = eval(simplex[v]);
    }
  }

  const auto it = std::min_element(values.begin(), values.end());
  const std::size_t best = static_cast<std::size_t>(it - values.begin());
  res.x = simplex[best];
  res.value = values[best];
  return res;
}

}  // namespace lsep::numerics
