#include "lsep/effective_medium.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lsep/errors.hpp"
#include "lsep/numerics/nelder_mead.hpp"
#include "lsep/units.hpp"

namespace lsep::medium {

void MaterialParams::validate() const {
  if (!(number_density > 0.0) || !std::isfinite(number_density)) throw ConfigError("number_density must be > 0");
  if (!(background_permittivity >= 1.0) || !std::isfinite(background_permittivity))
    throw ConfigError("background_permittivity must be >= 1");
  two_level.validate();
}

void PermittivitySpectrum::validate() const {
  if (energies.size() != epsilon.size()) throw ConfigError("permittivity spectrum: energy/epsilon length mismatch");
  for (std::size_t i = 0; i < energies.size(); ++i) {
    if (!std::isfinite(energies[i]) || !std::isfinite(epsilon[i].real()) || !std::isfinite(epsilon[i].imag()))
      throw ConfigError("permittivity spectrum: non-finite value at row " + std::to_string(i));
    if (i > 0 && !(energies[i] > energies[i - 1]))
      throw ConfigError("permittivity spectrum: energies must be strictly ascending");
  }
}

namespace {

// 2 N d / eps0, so that eps = eps_b + prefactor * rho01 / E0.
double coherence_prefactor(const MaterialParams& m) {
  return 2.0 * m.number_density * units::debye_to_cm(m.two_level.dipole) / units::eps0;
}

}  // namespace

cplx epsilon_steady(const MaterialParams& m, double energy_ev) {
  return m.background_permittivity +
         coherence_prefactor(m) * bloch::linear_coherence_per_field(m.two_level, energy_ev);
}

PermittivitySpectrum epsilon_steady(const MaterialParams& m, std::span<const double> energies) {
  m.validate();
  PermittivitySpectrum s;
  s.energies.assign(energies.begin(), energies.end());
  s.epsilon.reserve(energies.size());
  for (double e : energies) s.epsilon.push_back(epsilon_steady(m, e));
  return s;
}

std::vector<PermittivitySpectrum> epsilon_transient(const MaterialParams& m, const bloch::DriveField& drive,
                                                    std::span<const double> sample_times) {
  m.validate();
  drive.validate();
  std::vector<PermittivitySpectrum> out;
  out.reserve(sample_times.size());
  std::vector<cplx> eps(sample_times.size(), m.background_permittivity);
  if (drive.amplitude > 0.0) {
    const auto tr = bloch::evolve_rwa(m.two_level, drive, bloch::DensityMatrix::ground(), sample_times);
    const double pref = coherence_prefactor(m) / drive.amplitude;
    for (std::size_t k = 0; k < sample_times.size(); ++k)
      eps[k] = m.background_permittivity + pref * tr.states[k].rho01;
  }
  for (std::size_t k = 0; k < sample_times.size(); ++k) {
    PermittivitySpectrum s;
    s.energies = {drive.photon_energy};
    s.epsilon = {eps[k]};
    s.time = sample_times[k];
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<PermittivitySpectrum> epsilon_transient(const MaterialParams& m, double amplitude,
                                                    std::span<const double> energies,
                                                    std::span<const double> sample_times) {
  std::vector<PermittivitySpectrum> out(sample_times.size());
  for (std::size_t k = 0; k < sample_times.size(); ++k) {
    out[k].energies.assign(energies.begin(), energies.end());
    out[k].epsilon.resize(energies.size());
    out[k].time = sample_times[k];
  }
  for (std::size_t j = 0; j < energies.size(); ++j) {
    bloch::DriveField d;
    d.amplitude = amplitude;
    d.photon_energy = energies[j];
    d.envelope = bloch::Envelope::StepCosine;
    d.turn_on = 0.0;
    const auto slices = epsilon_transient(m, d, sample_times);
    for (std::size_t k = 0; k < sample_times.size(); ++k) out[k].epsilon[j] = slices[k].epsilon[0];
  }
  return out;
}

cplx lorentz_epsilon(const LorentzParams& p, double energy_ev) {
  const double w0 = p.resonance;
  const double w = energy_ev;
  return p.eps_background + p.oscillator_strength * w0 * w0 / cplx(w0 * w0 - w * w, -w * p.damping);
}

PermittivitySpectrum lorentz_epsilon(const LorentzParams& p, std::span<const double> energies) {
  PermittivitySpectrum s;
  s.energies.assign(energies.begin(), energies.end());
  for (double e : energies) s.epsilon.push_back(lorentz_epsilon(p, e));
  return s;
}

LorentzParams lorentz_equivalent(const MaterialParams& m) {
  m.validate();
  const double d = units::debye_to_cm(m.two_level.dipole);
  const double strength = m.number_density * d * d / (units::eps0 * units::e_charge);
  LorentzParams p;
  p.eps_background = m.background_permittivity;
  p.resonance = m.two_level.transition_energy;
  p.oscillator_strength = 2.0 * strength / p.resonance;
  p.damping = 2.0 * m.two_level.total_dephasing_ev();
  return p;
}

cplx refractive_index(cplx eps) {
  cplx n = std::sqrt(eps);
  if (n.imag() < 0.0 || (n.imag() == 0.0 && n.real() < 0.0)) n = -n;
  return n;
}

std::vector<cplx> refractive_index(const PermittivitySpectrum& spec) {
  std::vector<cplx> out;
  out.reserve(spec.epsilon.size());
  for (const auto& e : spec.epsilon) out.push_back(refractive_index(e));
  return out;
}

FitReport fit_material(const PermittivitySpectrum& target, const MaterialParams& start) {
  target.validate();
  start.validate();
  if (target.energies.size() < 3) throw ConfigError("fit_material: need at least three target points");
  const double d0 = start.two_level.dipole > 0.0 ? start.two_level.dipole : 1.0;
  const double g0 = start.two_level.pure_dephasing > 0.0 ? start.two_level.pure_dephasing : 1e-3;

  auto model = [&](double dipole, double dephasing) {
    MaterialParams m = start;
    m.two_level.dipole = dipole;
    m.two_level.pure_dephasing = dephasing;
    return m;
  };
  auto cost = [&](const MaterialParams& m) {
    double s = 0.0;
    for (std::size_t i = 0; i < target.energies.size(); ++i)
      s += std::norm(epsilon_steady(m, target.energies[i]) - target.epsilon[i]);
    return s;
  };
  // Work in units of the starting values.
  auto f = [&](std::span<const double> x) { return cost(model(x[0] * d0, x[1] * g0)); };

  const std::vector<double> x0 = {start.two_level.dipole / d0, start.two_level.pure_dephasing / g0};
  const std::vector<double> steps = {0.2, 0.2};
  const std::vector<double> lower = {0.0, 0.0};
  const std::vector<double> upper = {20.0, 20.0};
  numerics::NelderMeadOptions opt;
  opt.rel_tol = 1e-8;
  opt.x_tol = 1e-9;
  const auto r = numerics::nelder_mead(f, x0, steps, lower, upper, opt);

  FitReport rep;
  rep.params = model(r.x[0] * d0, r.x[1] * g0);
  rep.residual = r.value;
  rep.initial_residual = f(x0);
  rep.evaluations = r.evaluations;
  rep.converged = r.converged;
  rep.degenerate = r.x[0] < 1e-4;

  if (!std::isfinite(rep.residual) || rep.residual > rep.initial_residual)
    throw FitDiverged("fit_material: residual increased from " + std::to_string(rep.initial_residual) + " to " +
                      std::to_string(rep.residual));
  const bool at_bound = r.x[0] >= upper[0] || r.x[1] >= upper[1] || r.x[1] <= lower[1];
  if (!rep.degenerate && at_bound)
    throw FitDiverged("fit_material: parameters ran into a bound (dipole " +
                      std::to_string(rep.params.two_level.dipole) + " D, dephasing " +
                      std::to_string(rep.params.two_level.pure_dephasing) + " eV)");
  return rep;
}

}  // namespace lsep::medium
