#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "lsep/bloch.hpp"

// Permittivity of a host doped with identical two-level emitters,
//   eps = eps_b + (2 N d / (eps0 E0)) rho01~,
// where rho01~ is the rotating-frame coherence. In the weak-field limit this
// is eps_b + (N d^2 / (eps0 hbar)) (delta + i Gamma) / (delta^2 + Gamma^2).
namespace lsep::medium {

using cplx = std::complex<double>;

struct MaterialParams {
  double number_density = 3.29e25;           // m^-3, molecular sites
  double background_permittivity = 2.3104;  // 1.52^2
  bloch::TwoLevelParams two_level;

  void validate() const;
};

struct PermittivitySpectrum {
  std::vector<double> energies;  // eV, ascending
  std::vector<cplx> epsilon;
  std::optional<double> time;    // s, set on transient slices

  void validate() const;
};

struct LorentzParams {
  double eps_background = 2.3104;
  double oscillator_strength = 0.3;
  double resonance = 2.11;  // eV
  double damping = 0.0461;  // eV
};

cplx epsilon_steady(const MaterialParams& m, double energy_ev);
PermittivitySpectrum epsilon_steady(const MaterialParams& m, std::span<const double> energies);

// eps(t) at the drive's photon energy for a system that starts in the ground
// state and sees the drive from t = 0 (or from turn_on for a step envelope).
// One single-energy slice per sample time.
std::vector<PermittivitySpectrum> epsilon_transient(const MaterialParams& m, const bloch::DriveField& drive,
                                                    std::span<const double> sample_times);

// The same on a grid of photon energies; slice k holds eps(t_k, E) for every E.
std::vector<PermittivitySpectrum> epsilon_transient(const MaterialParams& m, double amplitude,
                                                    std::span<const double> energies,
                                                    std::span<const double> sample_times);

cplx lorentz_epsilon(const LorentzParams& p, double energy_ev);
PermittivitySpectrum lorentz_epsilon(const LorentzParams& p, std::span<const double> energies);

// Lorentz oscillator that reproduces the two-level line near resonance:
// f0 = 2 A / w1 and gamma0 = 2 Gamma, with A = N d^2 / (eps0 e) in eV.
LorentzParams lorentz_equivalent(const MaterialParams& m);

// sqrt(eps) on the branch with a non-negative imaginary part.
cplx refractive_index(cplx eps);
std::vector<cplx> refractive_index(const PermittivitySpectrum& spec);

struct FitReport {
  MaterialParams params;
  double residual = 0.0;          // sum |eps_model - eps_target|^2
  double initial_residual = 0.0;
  std::size_t evaluations = 0;
  bool converged = false;
  bool degenerate = false;        // dipole driven to zero, dephasing unidentifiable
};

// Two-parameter least-squares fit of the dipole and the pure dephasing, with
// density, background, transition energy and decay held at `start`. The free
// parameters start from start.two_level. Throws FitDiverged when the residual
// grows or a parameter runs into a bound; a dipole driven to zero is reported
// as degenerate instead.
FitReport fit_material(const PermittivitySpectrum& target, const MaterialParams& start);

}  // namespace lsep::medium
