#pragma once

#include <array>
#include <complex>
#include <span>
#include <vector>

#include "lsep/numerics/complex_matrix.hpp"
#include "lsep/numerics/ode.hpp"

// Driven, damped two-level system. The ground energy is the zero of energy,
// the drive is E0 cos(w t) coupled through -d E(t) (|0><1| + |1><0|), and all
// fields carry exp(-i w t). The coherence stored as rho01 is the component
// that oscillates as exp(-i w t) in the lab frame; its rotating-frame value is
// rho01 exp(i w t). State vectors are ordered (rho00, rho01, rho10, rho11).
namespace lsep::bloch {

using numerics::cplx;

struct TwoLevelParams {
  double transition_energy = 2.11;  // eV
  double decay_rate = 1.15e12;      // s^-1, population decay
  double pure_dephasing = 0.017;    // eV
  double dipole = 32.0;             // debye, orientation averaged

  // gamma/2 + pure dephasing, as an energy (eV) and as a rate (s^-1).
  double total_dephasing_ev() const;
  double total_dephasing_rate() const;

  void validate() const;
};

enum class Envelope { ContinuousCosine, StepCosine };

struct DriveField {
  double amplitude = 0.0;       // V/m
  double photon_energy = 2.11;  // eV
  Envelope envelope = Envelope::ContinuousCosine;
  double turn_on = 0.0;         // s, StepCosine only

  void validate() const;
  bool on_at(double t) const { return envelope == Envelope::ContinuousCosine || t >= turn_on; }
};

// transition - photon energy, in eV and in rad/s.
double detuning_ev(const TwoLevelParams& p, const DriveField& d);
double detuning_rate(const TwoLevelParams& p, const DriveField& d);

struct DensityMatrix {
  cplx rho00 = 1.0;
  cplx rho01 = 0.0;
  cplx rho10 = 0.0;
  cplx rho11 = 0.0;

  static DensityMatrix ground() { return {}; }
  static DensityMatrix from_vector(std::span<const cplx> v);
  std::array<cplx, 4> as_vector() const { return {rho00, rho01, rho10, rho11}; }

  cplx trace() const { return rho00 + rho11; }
  double min_eigenvalue() const;
  // Largest violation of unit trace, Hermiticity and positivity.
  double invariant_violation() const;
  bool physical(double tol = 1e-9) const { return invariant_violation() <= tol; }
};

double distance(const DensityMatrix& a, const DensityMatrix& b);

enum class Frame { Rotating, Lab };

struct BlochTrajectory {
  std::vector<double> times;
  std::vector<DensityMatrix> states;
  Frame frame = Frame::Rotating;
  numerics::StepStats step_stats;
};

// Time-independent rotating-frame generator, d/dt x = L x, with the drive on.
numerics::ComplexMatrix liouvillian_rwa(const TwoLevelParams& p, const DriveField& d);

// Null vector of liouvillian_rwa with unit trace. Throws NoUniqueSteadyState
// for zero population decay.
DensityMatrix steady_state(const TwoLevelParams& p, const DriveField& d);

// Exact rotating-frame propagation from rho0 at t = 0, by eigen-decomposition
// of the generator. A StepCosine drive is off before turn_on.
BlochTrajectory evolve_rwa(const TwoLevelParams& p, const DriveField& d, const DensityMatrix& rho0,
                           std::span<const double> sample_times);

// Full optical Bloch equations with the cosine drive, integrated as eight
// reals from rho0 (lab frame) at t0. Errors from the integrator propagate;
// an underflowing step means the problem is too stiff for the explicit
// solver and evolve_rwa should be used instead.
BlochTrajectory evolve_lab(const TwoLevelParams& p, const DriveField& d, const DensityMatrix& rho0, double t0,
                           double t1, const numerics::OdeMethod& method, std::span<const double> sample_times);

// Multiply coherences by exp(+-i w t) to move between frames.
DensityMatrix to_rotating(const DensityMatrix& lab, double t, double photon_energy_ev);
DensityMatrix to_lab(const DensityMatrix& rotating, double t, double photon_energy_ev);
BlochTrajectory to_rotating(const BlochTrajectory& lab, double photon_energy_ev);

// Running mean of the rotating-frame coherence over `window` consecutive
// samples. With uniform sampling and window * dt equal to one optical period
// this removes the counter-rotating ripple of a lab-frame solution. Output
// times are the window centres.
struct CoherenceEnvelope {
  std::vector<double> times;
  std::vector<cplx> rho01;
};

CoherenceEnvelope cycle_average(const BlochTrajectory& rotating, std::size_t window);

struct RabiFrequencies {
  double omega_rabi = 0.0;          // rad/s, d E0 / hbar
  double omega_rabi_general = 0.0;  // rad/s, sqrt(omega_rabi^2 + detuning^2)
};

RabiFrequencies rabi_frequencies(const TwoLevelParams& p, const DriveField& d);

// Weak-field steady-state rotating coherence per unit field amplitude (m/V):
// lim rho01 / E0 = (d / 2 hbar) (delta + i Gamma) / (delta^2 + Gamma^2).
cplx linear_coherence_per_field(const TwoLevelParams& p, double photon_energy_ev);

}  // namespace lsep::bloch
