#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "lsep/effective_medium.hpp"

// Mie theory for a homogeneous sphere at the origin, lit by a plane wave
// polarised along x and travelling along +z. Time dependence exp(-i w t).
namespace lsep::mie {

using cplx = std::complex<double>;
using Vec3 = std::array<double, 3>;
using CVec3 = std::array<cplx, 3>;

struct SphereScene {
  double radius = 50e-9;             // m
  cplx sphere_epsilon = 2.3104;
  double host_epsilon = 1.0;
  double wavelength_vacuum = 574e-9;  // m

  void validate() const;
  double host_index() const;
  double wavenumber() const;  // in the host, rad/m
  double size_parameter() const;
  cplx relative_index() const;
};

struct MieCoefficients {
  std::vector<cplx> a, b;  // scattered, index n - 1 holds order n
  std::vector<cplx> c, d;  // internal
  std::size_t n_max = 0;
};

inline constexpr double kMaxSizeParameter = 100.0;

std::size_t default_n_max(double x);

// Throws SizeParameterOutOfRange outside (0, 100] and RecurrenceUnstable when
// a Bessel recurrence stops being finite. n_max = 0 selects default_n_max.
MieCoefficients mie_coefficients(const SphereScene& scene, std::size_t n_max = 0);

struct Efficiencies {
  double q_ext = 0.0;
  double q_sca = 0.0;
  double q_abs = 0.0;
};

Efficiencies efficiencies(const SphereScene& scene, const MieCoefficients& coeffs);
Efficiencies efficiencies(const SphereScene& scene);

struct QSpectrum {
  std::vector<double> energies;  // eV
  std::vector<double> q_ext, q_sca, q_abs;
  std::vector<double> kappa_normalized;  // Im sqrt(eps), scaled to unit peak
  std::optional<double> time;             // s, on transient slices
};

QSpectrum qabs_spectrum(const medium::PermittivitySpectrum& eps, double radius, double host_epsilon);
std::vector<QSpectrum> qabs_transient(std::span<const medium::PermittivitySpectrum> slices, double radius,
                                      double host_epsilon);

struct FieldSample {
  Vec3 position{};
  CVec3 e{};
  CVec3 h{};
  double enhancement = 0.0;  // |E| / E0
};

// Total field (incident plus scattered outside, internal inside) at a point
// with 0 < |r| <= 10 radius. Throws EvaluationTooFarOut beyond that.
FieldSample near_field(const SphereScene& scene, const MieCoefficients& coeffs, const Vec3& point,
                       double e0 = 1.0);

// Time-averaged Poynting vector, Re(E x H*) / 2.
Vec3 poynting(const FieldSample& s);

enum class Termination { LeftDomain, EnteredSphereAndAbsorbed, MaxSteps };

struct Streamline {
  Vec3 seed{};
  std::vector<Vec3> points;
  Termination terminated = Termination::MaxSteps;
};

enum class StreamlineMode { FixedEuler, AdaptiveMidpoint };

struct StreamlineOptions {
  double step = 10e-9;          // m
  std::size_t max_steps = 200;
  double domain_radius = 0.0;   // m, 0 means just inside the 10 radius evaluation limit
  StreamlineMode mode = StreamlineMode::FixedEuler;
  double tolerance = 0.1e-9;    // m per step, adaptive mode only
};

// Traces each seed along the unit Poynting direction. The fixed mode takes
// plain forward steps of `step`; the adaptive mode uses midpoint steps of at
// most `step`, halved until the local error estimate meets `tolerance`. A
// line ends when it crosses into the sphere or leaves the domain sphere.
// Throws ZeroPoyntingVector where the flux vanishes.
std::vector<Streamline> poynting_streamlines(const SphereScene& scene, const MieCoefficients& coeffs,
                                             std::span<const Vec3> seeds, const StreamlineOptions& options = {});

// Largest distance from the z axis among seeds whose lines end in the sphere,
// or 0 when none do.
double capture_radius(std::span<const Streamline> lines);
std::size_t captured_count(std::span<const Streamline> lines);

struct Polarizability {
  cplx alpha;                      // m^3, 4 pi r^3 (eps_s - eps_h) / (eps_s + 2 eps_h)
  double resonance_distance = 0.0;  // |eps_s + 2 eps_h|
  bool divergent = false;
};

Polarizability quasistatic_polarizability(cplx sphere_epsilon, double host_epsilon, double radius);

}  // namespace lsep::mie
