#pragma once

#include <cstddef>
#include <vector>

// Frenkel-exciton chain with nearest-neighbour coupling. J is a positive
// magnitude; the red shift sits in the formulas, so the m = 1 state is the
// lowest for J > 0.
namespace lsep::aggregate {

struct AggregateChain {
  std::size_t n = 15;
  double monomer_energy = 2.21;  // eV
  double coupling_j = 0.05;      // eV
  double monomer_dipole = 0.0;   // debye
  double ground_energy = 0.0;    // eV
};

struct BrightState {
  double energy = 0.0;    // eV
  double shift = 0.0;     // eV, energy - monomer_energy
  double dipole = 0.0;    // debye
  std::vector<double> coefficients;
};

// lambda_m = E1 - 2 J cos(m pi / (n + 1)), m = 1..n.
std::vector<double> eigenvalues(const AggregateChain& chain);

// sqrt(2/(n+1)) sin(j m pi / (n + 1)), j = 1..n. Throws ModeOutOfRange.
std::vector<double> eigenstate(const AggregateChain& chain, std::size_t m);

// |d(m)| = mu sqrt((1 - (-1)^m)/(n+1)) cot(pi m / (2(n+1))). Zero for even m.
double mode_dipole(const AggregateChain& chain, std::size_t m);

// Same quantity summed directly over the site coefficients.
double mode_dipole_direct(const AggregateChain& chain, std::size_t m);

BrightState bright_state(const AggregateChain& chain);

// d / D for a 2D (planar) or 3D orientation distribution. Throws BadDimension.
double orientational_average(double on_axis_dipole, int dims);

// Explicit tridiagonal Hamiltonian (eV), row-major n x n, with the monomer
// energy on the diagonal and -J off it.
std::vector<double> hamiltonian(const AggregateChain& chain);

}  // namespace lsep::aggregate
