#include "lsep/numerics/kramers_kronig.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "lsep/errors.hpp"

namespace lsep::numerics {

namespace {

double interp(std::span<const double> x, std::span<const double> y, double xq) {
  if (xq <= x.front()) return y.front();
  if (xq >= x.back()) return y.back();
  const auto it = std::upper_bound(x.begin(), x.end(), xq);
  const std::size_t j = static_cast<std::size_t>(it - x.begin());
  const double t = (xq - x[j - 1]) / (x[j] - x[j - 1]);
  return y[j - 1] + t * (y[j] - y[j - 1]);
}

std::vector<double> kk_uniform(double w0, double h, std::span<const double> kappa, double asymptote) {
  const std::size_t n = kappa.size();
  const double a = w0;
  const double b = w0 + h * static_cast<double>(n - 1);
  std::vector<double> out(n);
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double wi = w0 + h * static_cast<double>(i);
    for (std::size_t j = 0; j < n; ++j) {
      const double wj = w0 + h * static_cast<double>(j);
      g[j] = wj * kappa[j] / (wj + wi);
    }
    // Derivative of g at the singular point replaces the 0/0 sample.
    double dg = 0.0;
    if (i == 0) {
      dg = (g[1] - g[0]) / h;
    } else if (i == n - 1) {
      dg = (g[n - 1] - g[n - 2]) / h;
    } else {
      dg = (g[i + 1] - g[i - 1]) / (2.0 * h);
    }
    double sum = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double wj = w0 + h * static_cast<double>(j);
      const double v = j == i ? dg : (g[j] - g[i]) / (wj - wi);
      sum += (j == 0 || j == n - 1) ? 0.5 * v : v;
    }
    sum *= h;
    // Endpoints sit on the edge of the band; the log term there is taken
    // over a half cell instead of diverging.
    const double lo = std::max(wi - a, 0.5 * h);
    const double hi = std::max(b - wi, 0.5 * h);
    sum += g[i] * std::log(hi / lo);
    out[i] = asymptote + (2.0 / std::numbers::pi) * sum;
  }
  return out;
}

}  // namespace

std::vector<double> kramers_kronig_real(std::span<const double> omega, std::span<const double> imag_part,
                                        double asymptote) {
  if (omega.size() != imag_part.size())
    throw std::invalid_argument("kramers_kronig_real: grid and data lengths differ");
  if (omega.size() < kMinKramersKronigPoints) {
    throw GridTooCoarse("kramers_kronig_real: need at least " + std::to_string(kMinKramersKronigPoints) +
                        " points, got " + std::to_string(omega.size()));
  }
  for (std::size_t i = 1; i < omega.size(); ++i)
    if (!(omega[i] > omega[i - 1])) throw std::invalid_argument("kramers_kronig_real: grid not ascending");
  for (double v : imag_part)
    if (!std::isfinite(v)) throw std::invalid_argument("kramers_kronig_real: non-finite imaginary part");

  const std::size_t n = omega.size();
  const double h = (omega.back() - omega.front()) / static_cast<double>(n - 1);
  bool uniform = true;
  for (std::size_t i = 0; i < n && uniform; ++i) {
    const double expect = omega.front() + h * static_cast<double>(i);
    uniform = std::abs(omega[i] - expect) <= 1e-9 * h;
  }
  if (uniform) return kk_uniform(omega.front(), h, imag_part, asymptote);

  // Resample at twice the point count, then come back to the caller's grid.
  const std::size_t m = 2 * n;
  const double hm = (omega.back() - omega.front()) / static_cast<double>(m - 1);
  std::vector<double> wu(m);
  std::vector<double> ku(m);
  for (std::size_t i = 0; i < m; ++i) {
    wu[i] = omega.front() + hm * static_cast<double>(i);
    ku[i] = interp(omega, imag_part, wu[i]);
  }
  const std::vector<double> nu = kk_uniform(omega.front(), hm, ku, asymptote);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = interp(wu, nu, omega[i]);
  return out;
}

}  // namespace lsep::numerics
