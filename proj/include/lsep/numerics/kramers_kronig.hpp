#pragma once

#include <span>
#include <vector>

namespace lsep::numerics {

inline constexpr std::size_t kMinKramersKronigPoints = 16;

// Real part of a causal response from its imaginary part,
//   n(w) = asymptote + (2/pi) PV int w' k(w') / (w'^2 - w^2) dw',
// over the sampled band. Any consistent frequency unit works. The principal
// value is taken by subtracting the singular point (trapezoidal rule on the
// regular remainder plus the analytic log term of the singular cell).
// Non-uniform grids are resampled uniformly and mapped back by linear
// interpolation. Throws GridTooCoarse below kMinKramersKronigPoints samples.
std::vector<double> kramers_kronig_real(std::span<const double> omega, std::span<const double> imag_part,
                                        double asymptote);

}  // namespace lsep::numerics
