#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace lsep::film {

using cplx = std::complex<double>;

// Semi-infinite, non-absorbing ambient and substrate around one coherent film.
struct FilmGeometry {
  double thickness = 70e-9;  // m
  double ambient_index = 1.0;
  double substrate_index = 1.52;

  void validate() const;
};

struct FilmStack {
  FilmGeometry geometry;
  cplx film_index = 1.0;  // n + i kappa

  void validate() const;
};

struct RTMeasurement {
  double wavelength = 0.0;  // m
  double reflectance = 0.0;
  double transmittance = 0.0;

  void validate() const;
};

// R + T may exceed unity by this much before a measurement is rejected.
inline constexpr double kNoiseAllowance = 0.02;

struct RT {
  double reflectance = 0.0;
  double transmittance = 0.0;
};

// Normal-incidence Airy summation for a single absorbing film.
RT rt_theoretical(const FilmStack& stack, double wavelength);

// |T_t - T_e| + |R_t - R_e| for a trial film index.
double residual(double n, double kappa, const FilmGeometry& geometry, const RTMeasurement& meas);

enum class Branch { Physical, Spurious, Unresolved };

struct NkCandidate {
  double wavelength = 0.0;  // m
  double n = 0.0;
  double kappa = 0.0;
  double residual = 0.0;
  Branch branch = Branch::Unresolved;
  double thickness_used = 0.0;  // m, sweep thickness the candidate was extracted at
  double kappa_extracted = 0.0;    // kappa at thickness_used, kept through rescaling
  double thickness_reference = 0.0;  // m, thickness `kappa` currently refers to
  std::size_t rank = 0;         // 0 for the lowest minimum at this wavelength and thickness
};

struct NkGrid {
  double n_min = 1.0, n_max = 3.5, n_step = 0.005;
  double kappa_min = 0.0, kappa_max = 2.0, kappa_step = 0.005;

  void validate() const;
  std::size_t n_count() const;
  std::size_t kappa_count() const;
};

struct ThicknessRange {
  double min = 63e-9;  // m
  double max = 77e-9;
  std::size_t samples = 15;

  void validate() const;
  std::vector<double> values() const;
};

struct ExtractOptions {
  NkGrid grid;
  ThicknessRange thickness;
  double ambient_index = 1.0;
  double substrate_index = 1.52;
  std::size_t minima_kept = 2;
};

// For every measurement and thickness sample, the lowest local minima of the
// residual on the grid, each refined by a bounded simplex descent. Minima that
// refine onto one another count once. Throws NoMinimumFound when the residual
// is flat over the whole grid.
std::vector<NkCandidate> extract_nk(std::span<const RTMeasurement> measurements, const ExtractOptions& options);

// kappa' = (t_used / t_reference) kappa, from T ~ exp(-kappa t).
double thickness_rescale(double kappa, double t_used, double t_reference);

// Rescales every candidate's kappa to the reference thickness, always from
// kappa_extracted, so rescaling an already rescaled set equals rescaling once.
std::vector<NkCandidate> rescale_candidates(std::span<const NkCandidate> candidates, double t_reference);

struct BranchOptions {
  double max_residual = kNoiseAllowance;  // worse candidates are treated as failures
  double cluster_tolerance = 0.02;        // |dn| + |dkappa| within one branch at one wavelength
  double ambiguity_threshold = 0.05;      // relative total-variation margin required
};

struct BranchSelection {
  std::vector<double> wavelengths;  // ascending, m
  std::vector<double> n;
  std::vector<double> kappa;
  std::vector<double> residual;
  std::vector<bool> interpolated;  // no usable candidate; filled linearly
  double total_variation = 0.0;
  double alternative_variation = 0.0;  // best curve avoiding the chosen branch; equal when single-branch
  std::vector<NkCandidate> candidates;  // input, labelled Physical or Spurious
};

// Picks, per wavelength, the candidate branch that makes the (n, kappa) curve
// smoothest in total variation, by dynamic programming over the candidates.
// Equal-cost choices go to the lower kappa. Throws BranchAmbiguous when the best
// curve avoiding the chosen branch is within ambiguity_threshold of it, and
// NoMinimumFound when no wavelength has a usable candidate.
BranchSelection select_physical_branch(std::span<const NkCandidate> candidates, const BranchOptions& options = {});

// n from kappa by Kramers-Kronig over an ascending photon-energy grid.
std::vector<cplx> close_with_kk(std::span<const double> energies_ev, std::span<const double> kappa,
                                double n_asymptote);

}  // namespace lsep::film
