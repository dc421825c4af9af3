#include "lsep/aggregate.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "lsep/errors.hpp"

namespace lsep::aggregate {

namespace {

void check_mode(const AggregateChain& chain, std::size_t m) {
  if (m < 1 || m > chain.n) {
    throw ModeOutOfRange("mode index " + std::to_string(m) + " outside 1.." + std::to_string(chain.n));
  }
}

void check_chain(const AggregateChain& chain) {
  if (chain.n < 1) throw std::invalid_argument("aggregate chain needs at least one monomer");
  if (chain.monomer_dipole < 0.0) throw std::invalid_argument("monomer dipole must be non-negative");
}

}  // namespace

std::vector<double> eigenvalues(const AggregateChain& chain) {
  check_chain(chain);
  const double np1 = static_cast<double>(chain.n + 1);
  std::vector<double> out(chain.n);
  for (std::size_t m = 1; m <= chain.n; ++m) {
    out[m - 1] = chain.monomer_energy - 2.0 * chain.coupling_j * std::cos(static_cast<double>(m) * std::numbers::pi / np1);
  }
  return out;
}

std::vector<double> eigenstate(const AggregateChain& chain, std::size_t m) {
  check_chain(chain);
  check_mode(chain, m);
  const double np1 = static_cast<double>(chain.n + 1);
  const double norm = std::sqrt(2.0 / np1);
  std::vector<double> c(chain.n);
  for (std::size_t j = 1; j <= chain.n; ++j) {
    c[j - 1] = norm * std::sin(static_cast<double>(j * m) * std::numbers::pi / np1);
  }
  return c;
}

double mode_dipole(const AggregateChain& chain, std::size_t m) {
  check_chain(chain);
  check_mode(chain, m);
  if (m % 2 == 0) return 0.0;
  const double np1 = static_cast<double>(chain.n + 1);
  const double arg = std::numbers::pi * static_cast<double>(m) / (2.0 * np1);
  return chain.monomer_dipole * std::sqrt(2.0 / np1) / std::tan(arg);
}

double mode_dipole_direct(const AggregateChain& chain, std::size_t m) {
  const std::vector<double> c = eigenstate(chain, m);
  double s = 0.0;
  for (double v : c) s += v;
  return chain.monomer_dipole * std::abs(s);
}

BrightState bright_state(const AggregateChain& chain) {
  check_chain(chain);
  BrightState b;
  b.shift = -2.0 * chain.coupling_j * std::cos(std::numbers::pi / static_cast<double>(chain.n + 1));
  b.energy = chain.monomer_energy + b.shift;
  b.dipole = mode_dipole(chain, 1);
  b.coefficients = eigenstate(chain, 1);
  return b;
}

double orientational_average(double on_axis_dipole, int dims) {
  if (dims != 2 && dims != 3) {
    throw BadDimension("orientational average needs dims 2 or 3, got " + std::to_string(dims));
  }
  return on_axis_dipole / static_cast<double>(dims);
}

std::vector<double> hamiltonian(const AggregateChain& chain) {
  check_chain(chain);
  const std::size_t n = chain.n;
  std::vector<double> h(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    h[i * n + i] = chain.monomer_energy;
    if (i + 1 < n) {
      h[i * n + i + 1] = -chain.coupling_j;
      h[(i + 1) * n + i] = -chain.coupling_j;
    }
  }
  return h;
}

}  // namespace lsep::aggregate
