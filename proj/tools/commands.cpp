#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include "json.hpp"
#include "lsep/errors.hpp"
#include "lsep/mie.hpp"
#include "lsep/units.hpp"

namespace lsep::cli {

namespace {

using nlohmann::json;
using cplx = std::complex<double>;

json material_json(const medium::MaterialParams& m) {
  return {{"number_density_m3", m.number_density},
          {"background_permittivity", m.background_permittivity},
          {"transition_energy_ev", m.two_level.transition_energy},
          {"decay_rate_s", m.two_level.decay_rate},
          {"pure_dephasing_ev", m.two_level.pure_dephasing},
          {"dipole_debye", m.two_level.dipole}};
}

std::string model_name(const Config& c) {
  const std::string m = c.text("qabs.model");
  if (m != "quantum" && m != "lorentz" && m != "data")
    throw ConfigError("qabs.model must be quantum, lorentz or data, got '" + m + "'");
  return m;
}

medium::PermittivitySpectrum permittivity(const Config& c, const std::string& model) {
  medium::PermittivitySpectrum eps;
  if (model == "quantum") {
    eps = medium::epsilon_steady(material(c), energy_grid(c));
  } else if (model == "lorentz") {
    eps = medium::lorentz_epsilon(lorentz(c), energy_grid(c));
  } else {
    eps = io::read_permittivity(c.path("qabs.data"));
  }
  eps.validate();
  return eps;
}

// Linear interpolation inside a tabulated spectrum.
cplx interpolate(const medium::PermittivitySpectrum& s, double energy) {
  const auto& e = s.energies;
  if (energy < e.front() || energy > e.back())
    throw ConfigError("nearfield.energy_ev lies outside the permittivity data");
  const auto hi = static_cast<std::size_t>(std::upper_bound(e.begin(), e.end(), energy) - e.begin());
  if (hi >= e.size()) return s.epsilon.back();
  const std::size_t lo = hi - 1;
  const double w = (energy - e[lo]) / (e[hi] - e[lo]);
  return (1.0 - w) * s.epsilon[lo] + w * s.epsilon[hi];
}

cplx parse_complex(const Config& c, const std::string& key) {
  std::vector<double> v = c.list(key);
  if (v.size() != 2) throw ConfigError(key + " must be \"re, im\"");
  return {v[0], v[1]};
}

double sphere_radius(const Config& c) { return c.positive("sphere.radius_nm") * 1e-9; }
double host_epsilon(const Config& c) { return c.positive("sphere.host_epsilon"); }

}  // namespace

io::OutputSet fit_permittivity(const Config& c, std::ostream& log) {
  auto target = io::read_permittivity(c.path("fit.target"));
  target.validate();
  const auto start = material(c);
  const auto report = medium::fit_material(target, start);
  const auto model = medium::epsilon_steady(report.params, target.energies);

  json j = material_json(report.params);
  j["residual"] = report.residual;
  j["initial_residual"] = report.initial_residual;
  j["evaluations"] = report.evaluations;
  j["converged"] = report.converged;
  j["degenerate"] = report.degenerate;
  j["points"] = target.energies.size();

  std::string csv = "energy_eV,target_re,target_im,model_re,model_im\n";
  for (std::size_t i = 0; i < target.energies.size(); ++i)
    csv += io::fmt(target.energies[i]) + "," + io::fmt(target.epsilon[i].real()) + "," +
           io::fmt(target.epsilon[i].imag()) + "," + io::fmt(model.epsilon[i].real()) + "," +
           io::fmt(model.epsilon[i].imag()) + "\n";

  log << "fit: dipole " << report.params.two_level.dipole << " D, pure dephasing "
      << report.params.two_level.pure_dephasing * 1e3 << " meV, residual " << report.residual << " after "
      << report.evaluations << " evaluations" << (report.degenerate ? " (degenerate)" : "") << "\n";
  io::OutputSet out;
  out.add("fitted_params.json", j.dump(2) + "\n");
  out.add("epsilon_fit.csv", std::move(csv));
  return out;
}

io::OutputSet qabs_spectrum(const Config& c, std::ostream& log) {
  const std::string model = model_name(c);
  const auto eps = permittivity(c, model);
  const auto q = mie::qabs_spectrum(eps, sphere_radius(c), host_epsilon(c));

  std::size_t peak = 0, kpeak = 0;
  for (std::size_t i = 0; i < q.energies.size(); ++i) {
    if (q.q_abs[i] > q.q_abs[peak]) peak = i;
    if (q.kappa_normalized[i] > q.kappa_normalized[kpeak]) kpeak = i;
  }
  log << "qabs (" << model << "): peak Q_abs " << q.q_abs[peak] << " at " << q.energies[peak]
      << " eV; kappa peaks at " << q.energies[kpeak] << " eV\n";

  std::string kcsv = "energy_eV,kappa_normalized\n";
  for (std::size_t i = 0; i < q.energies.size(); ++i)
    kcsv += io::fmt(q.energies[i]) + "," + io::fmt(q.kappa_normalized[i]) + "\n";
  io::OutputSet out;
  out.add("qabs.csv", io::spectrum_csv(std::span<const mie::QSpectrum>(&q, 1)));
  out.add("kappa.csv", std::move(kcsv));
  return out;
}

io::OutputSet nearfield(const Config& c, std::ostream& log) {
  const double energy = c.positive("nearfield.energy_ev");
  cplx eps;
  if (!c.text("nearfield.epsilon_override").empty()) {
    eps = parse_complex(c, "nearfield.epsilon_override");
  } else {
    const std::string model = model_name(c);
    if (model == "quantum") {
      eps = medium::epsilon_steady(material(c), energy);
    } else if (model == "lorentz") {
      eps = medium::lorentz_epsilon(lorentz(c), energy);
    } else {
      eps = interpolate(permittivity(c, model), energy);
    }
  }

  mie::SphereScene scene;
  scene.radius = sphere_radius(c);
  scene.host_epsilon = host_epsilon(c);
  scene.sphere_epsilon = eps;
  scene.wavelength_vacuum = units::ev_to_wavelength_m(energy);
  scene.validate();
  const auto coeffs = mie::mie_coefficients(scene);

  const double lo = c.number("nearfield.map_min_nm") * 1e-9;
  const double hi = c.number("nearfield.map_max_nm") * 1e-9;
  const std::size_t np = c.count("nearfield.map_points", 2);
  if (!(hi > lo)) throw ConfigError("nearfield.map_max_nm must exceed nearfield.map_min_nm");
  const double reach = 10.0 * scene.radius;
  if (std::hypot(std::max(std::abs(lo), std::abs(hi)), std::max(std::abs(lo), std::abs(hi))) > reach)
    throw ConfigError("nearfield.map_min_nm / map_max_nm: map corners must lie within 10 sphere radii");

  std::vector<mie::FieldSample> map;
  map.reserve(np * np);
  for (std::size_t a = 0; a < np; ++a) {
    const double y = lo + (hi - lo) * static_cast<double>(a) / static_cast<double>(np - 1);
    for (std::size_t b = 0; b < np; ++b) {
      const double z = lo + (hi - lo) * static_cast<double>(b) / static_cast<double>(np - 1);
      // The expansions are singular at the exact centre; the field is not.
      const double zz = (y == 0.0 && z == 0.0) ? 1e-3 * (hi - lo) / static_cast<double>(np) : z;
      auto s = mie::near_field(scene, coeffs, {0.0, y, zz});
      s.position = {0.0, y, z};
      map.push_back(s);
    }
  }

  const double sz = c.number("nearfield.seed_z_nm") * 1e-9;
  const double y0 = c.number("nearfield.seed_y_min_nm") * 1e-9;
  const double y1 = c.number("nearfield.seed_y_max_nm") * 1e-9;
  const std::size_t ns = c.count("nearfield.seed_count");
  if (y1 < y0) throw ConfigError("nearfield.seed_y_max_nm must be >= nearfield.seed_y_min_nm");
  std::vector<mie::Vec3> seeds;
  for (std::size_t i = 0; i < ns; ++i) {
    const double y = ns == 1 ? y0 : y0 + (y1 - y0) * static_cast<double>(i) / static_cast<double>(ns - 1);
    if (std::hypot(y, sz) > reach) throw ConfigError("nearfield.seed_*: seeds must lie within 10 sphere radii");
    seeds.push_back({0.0, y, sz});
  }
  mie::StreamlineOptions opts;
  opts.step = c.positive("nearfield.step_nm") * 1e-9;
  opts.max_steps = c.count("nearfield.max_steps");
  const auto lines = mie::poynting_streamlines(scene, coeffs, seeds, opts);

  log << "nearfield at " << energy << " eV (eps = " << eps.real() << " + " << eps.imag() << "i): "
      << mie::captured_count(lines) << " of " << lines.size() << " seeds absorbed, capture radius "
      << mie::capture_radius(lines) * 1e9 << " nm\n";
  io::OutputSet out;
  out.add("field_map.csv", io::field_map_csv(map));
  out.add("streamlines.json", io::streamlines_json(lines));
  return out;
}

io::OutputSet transient(const Config& c, std::ostream& log) {
  const auto m = material(c);
  const auto detunings = c.list("transient.detunings_ev");
  const double t0 = c.non_negative("transient.time_min_fs") * units::fs;
  const double t1 = c.positive("transient.time_max_fs") * units::fs;
  const double dt = c.positive("transient.time_step_fs") * units::fs;
  if (!(t1 > t0)) throw ConfigError("transient.time_max_fs must exceed transient.time_min_fs");
  std::vector<double> times;
  const auto steps = static_cast<std::size_t>(std::floor((t1 - t0) / dt + 1e-9));
  for (std::size_t k = 0; k <= steps; ++k) times.push_back(t0 + dt * static_cast<double>(k));

  std::vector<double> energies;
  for (double d : detunings) {
    const double e = m.two_level.transition_energy - d;
    if (!(e > 0.0)) throw ConfigError("transient.detunings_ev: photon energy must stay positive");
    energies.push_back(e);
  }
  std::vector<std::size_t> order(energies.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return energies[a] < energies[b]; });
  std::vector<double> sorted;
  for (std::size_t i : order) sorted.push_back(energies[i]);
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    throw ConfigError("transient.detunings_ev must not repeat");

  const double amp = drive_amplitude(c);
  const auto slices = medium::epsilon_transient(m, amp, sorted, times);
  const auto q = mie::qabs_transient(slices, sphere_radius(c), host_epsilon(c));

  for (std::size_t i = 0; i < sorted.size(); ++i) {
    double qmax = 0.0;
    for (const auto& s : q) qmax = std::max(qmax, s.q_abs[i]);
    log << "transient: detuning " << m.two_level.transition_energy - sorted[i] << " eV (" << sorted[i]
        << " eV photons): max Q_abs " << qmax << ", final " << q.back().q_abs[i] << "\n";
  }
  log << "transient: field amplitude " << amp << " V/m\n";
  io::OutputSet out;
  out.add("qabs_t.csv", io::spectrum_csv(q));
  return out;
}

io::OutputSet extract_nk(const Config& c, std::ostream& log) {
  const auto meas = io::read_measurements(c.path("extract.measurements"));
  const auto opts = extract_options(c);
  const auto bopts = branch_options(c);
  const double t_ref = c.positive("extract.reference_thickness_nm") * 1e-9;
  const double n_inf = c.positive("extract.n_asymptote");

  const auto cands = film::extract_nk(meas, opts);
  const auto rescaled = film::rescale_candidates(cands, t_ref);
  const auto sel = film::select_physical_branch(rescaled, bopts);

  // Kramers-Kronig runs on ascending energy, i.e. descending wavelength.
  const std::size_t nw = sel.wavelengths.size();
  std::vector<double> e(nw), k(nw);
  for (std::size_t i = 0; i < nw; ++i) {
    e[i] = units::hc_ev_nm / (sel.wavelengths[nw - 1 - i] * 1e9);
    k[i] = sel.kappa[nw - 1 - i];
  }
  const auto closed = film::close_with_kk(e, k, n_inf);
  std::vector<cplx> nk(nw);
  for (std::size_t i = 0; i < nw; ++i) nk[i] = closed[nw - 1 - i];

  std::size_t kpeak = 0;
  for (std::size_t i = 0; i < nw; ++i)
    if (sel.kappa[i] > sel.kappa[kpeak]) kpeak = i;
  const auto gaps = std::count(sel.interpolated.begin(), sel.interpolated.end(), true);
  log << "extract-nk: " << cands.size() << " candidates over " << nw << " wavelengths, " << gaps
      << " interpolated; kappa peaks at " << units::hc_ev_nm / (sel.wavelengths[kpeak] * 1e9)
      << " eV; total variation " << sel.total_variation << " vs " << sel.alternative_variation << "\n";
  io::OutputSet out;
  out.add("nk.csv", io::nk_csv(sel, nk));
  out.add("branches.csv", io::candidates_csv(sel.candidates));
  return out;
}

io::OutputSet lorentz_model(const Config& c, std::ostream& log) {
  const auto p = lorentz(c);
  const auto eps = medium::lorentz_epsilon(p, energy_grid(c));
  std::string csv = "energy_eV,eps_re,eps_im,n,kappa\n";
  for (std::size_t i = 0; i < eps.energies.size(); ++i) {
    const cplx n = medium::refractive_index(eps.epsilon[i]);
    csv += io::fmt(eps.energies[i]) + "," + io::fmt(eps.epsilon[i].real()) + "," + io::fmt(eps.epsilon[i].imag()) +
           "," + io::fmt(n.real()) + "," + io::fmt(n.imag()) + "\n";
  }
  const auto eq = medium::lorentz_equivalent(material(c));
  json j = {{"configured",
             {{"eps_background", p.eps_background},
              {"oscillator_strength", p.oscillator_strength},
              {"resonance_ev", p.resonance},
              {"damping_ev", p.damping}}},
            {"two_level_equivalent",
             {{"eps_background", eq.eps_background},
              {"oscillator_strength", eq.oscillator_strength},
              {"resonance_ev", eq.resonance},
              {"damping_ev", eq.damping}}}};
  log << "lorentz: two-level material maps to f0 = " << eq.oscillator_strength << ", damping "
      << eq.damping * 1e3 << " meV\n";
  io::OutputSet out;
  out.add("lorentz.csv", std::move(csv));
  out.add("lorentz_params.json", j.dump(2) + "\n");
  return out;
}

}  // namespace lsep::cli
