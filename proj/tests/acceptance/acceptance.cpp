// One PASS/FAIL line per primary acceptance criterion, with the measured
// numbers next to the tolerance. INFO lines add context and never decide.

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "lsep/aggregate.hpp"
#include "lsep/bloch.hpp"
#include "lsep/effective_medium.hpp"
#include "lsep/film.hpp"
#include "lsep/mie.hpp"
#include "lsep/units.hpp"

using namespace lsep;
using cplx = std::complex<double>;

namespace {

int failures = 0;

void report(int id, bool ok, const std::string& what) {
  std::printf("%s criterion %d: %s\n", ok ? "PASS" : "FAIL", id, what.c_str());
  if (!ok) ++failures;
}

template <class... A>
std::string format(const char* f, A... a) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, a...);
  return buf;
}

template <class... A>
void info(const char* f, A... a) {
  std::printf("INFO  %s\n", format(f, a...).c_str());
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  return v;
}

std::size_t argmax(const std::vector<double>& v) {
  return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

medium::MaterialParams film_params() {
  medium::MaterialParams m;
  m.number_density = 1.47e25;
  m.two_level.dipole = 48.0;
  return m;
}

void criterion1() {
  const auto t0 = std::chrono::steady_clock::now();
  const cplx eps = medium::epsilon_steady(medium::MaterialParams{}, 2.16);
  const double dt = seconds_since(t0);
  const cplx ref(-2.251, 1.728);
  const double dre = std::abs(eps.real() - ref.real()) / std::abs(ref.real());
  const double dim = std::abs(eps.imag() - ref.imag()) / std::abs(ref.imag());
  report(1, dre <= 0.10 && dim <= 0.10 && dt < 0.1,
         format("eps(2.16 eV) = %.4f %+.4fi vs -2.251 +1.728i: re off %.1f%%, im off %.1f%% (<= 10%%), %.2g s",
                eps.real(), eps.imag(), 100 * dre, 100 * dim, dt));
}

void criterion2() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto eps = medium::epsilon_steady(medium::MaterialParams{}, linspace(1.9, 2.4, 501));
  const auto q = mie::qabs_spectrum(eps, 50e-9, 1.0);
  const double dt = seconds_since(t0);
  const std::size_t p = argmax(q.q_abs), k = argmax(q.kappa_normalized);
  const bool ok = std::abs(q.energies[p] - 2.16) <= 0.01 && q.q_abs[p] > 1.0 &&
                  std::abs(q.energies[k] - 2.12) <= 0.01 && dt < 10.0;
  report(2, ok,
         format("100 nm sphere: Q_abs peak %.3f at %.3f eV (2.16 +- 0.01, > 1); kappa peak at %.3f eV "
                "(2.12 +- 0.01); 501 points in %.3f s",
                q.q_abs[p], q.energies[p], q.energies[k], dt));
}

void criterion3() {
  auto b = medium::MaterialParams{};
  const auto e = linspace(1.8, 2.4, 601);
  const auto ea = medium::epsilon_steady(film_params(), e);
  const auto eb = medium::epsilon_steady(b, e);
  double worst = 0.0, worst_e = 0.0, worst_im = 0.0, diff = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < e.size(); ++i) {
    const double d = std::abs(ea.epsilon[i] - eb.epsilon[i]);
    diff = std::max(diff, d);
    scale = std::max(scale, std::abs(eb.epsilon[i]));
    if (d / std::abs(eb.epsilon[i]) > worst) worst = d / std::abs(eb.epsilon[i]), worst_e = e[i];
    worst_im = std::max(worst_im, std::abs(ea.epsilon[i].imag() - eb.epsilon[i].imag()) / eb.epsilon[i].imag());
  }
  report(3, diff / scale <= 0.01,
         format("(1.47e25, 2D, 48 D) vs (3.29e25, 3D, 32 D) over 1.8-2.4 eV: max |d eps| / max |eps| = %.3f%% "
                "(<= 1%%)",
                100 * diff / scale));
  info("criterion 3 pointwise: max |d eps|/|eps| = %.3f%% at %.3f eV, where Re eps crosses zero; Im eps within "
       "%.3f%% everywhere; N d^2 differs by %.3f%%",
       100 * worst, worst_e, 100 * worst_im, 100 * (1.47e25 * 48 * 48 / (3.29e25 * 32 * 32) - 1));
  auto a97 = film_params();
  a97.two_level.dipole = aggregate::orientational_average(97.0, 2);
  b.two_level.dipole = aggregate::orientational_average(97.0, 3);
  const auto xa = medium::epsilon_steady(a97, e), xb = medium::epsilon_steady(b, e);
  double w97 = 0.0;
  for (std::size_t i = 0; i < e.size(); ++i)
    w97 = std::max(w97, std::abs(xa.epsilon[i] - xb.epsilon[i]));
  info("criterion 3 with d = 97 D averaged (48.5 D vs 32.33 D): max |d eps| / max |eps| = %.3f%%", 100 * w97 / scale);
}

struct TransientRun {
  std::vector<double> times;  // s
  std::vector<mie::QSpectrum> q;
  std::vector<double> energies;
  double seconds = 0.0;
};

TransientRun transient(const std::vector<double>& energies) {
  TransientRun r;
  r.energies = energies;
  for (int k = 0; k <= 400; ++k) r.times.push_back(k * units::fs);
  const auto t0 = std::chrono::steady_clock::now();
  const auto slices =
      medium::epsilon_transient(medium::MaterialParams{}, units::field_from_power(1e-3, 1.5e-3), energies, r.times);
  r.q = mie::qabs_transient(slices, 50e-9, 1.0);
  r.seconds = seconds_since(t0);
  return r;
}

std::vector<double> trace(const TransientRun& r, std::size_t i) {
  std::vector<double> v;
  for (const auto& s : r.q) v.push_back(s.q_abs[i]);
  return v;
}

// Period of the strongest non-DC Fourier component, scanned finely in frequency.
double dominant_period_fs(const std::vector<double>& y, double dt_fs) {
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(y.size());
  const double span = dt_fs * static_cast<double>(y.size() - 1);
  double best = 0.0, best_f = 0.0;
  for (double f = 1.5 / span; f < 0.5 / dt_fs; f += 0.01 / span) {
    cplx s = 0.0;
    for (std::size_t k = 0; k < y.size(); ++k)
      s += (y[k] - mean) * std::exp(cplx(0.0, -2.0 * units::pi * f * dt_fs * static_cast<double>(k)));
    if (std::abs(s) > best) best = std::abs(s), best_f = f;
  }
  return 1.0 / best_f;
}

void criteria4and5() {
  const double w1 = medium::MaterialParams{}.two_level.transition_energy;
  const std::vector<double> deltas = {0.09, 0.045, 0.0, -0.045, -0.09};  // delta = hbar w1 - hbar w
  std::vector<double> energies;
  for (double d : deltas) energies.push_back(w1 - d);
  std::sort(energies.begin(), energies.end());
  const auto run = transient(energies);
  auto column = [&](double delta) {
    for (std::size_t i = 0; i < energies.size(); ++i)
      if (std::abs(energies[i] - (w1 - delta)) < 1e-12) return i;
    return std::size_t{0};
  };

  auto overshoot = [&](double delta, double& qmax, double& tmax, double& last) {
    const auto y = trace(run, column(delta));
    qmax = 0.0, tmax = 0.0;
    for (std::size_t k = 0; k <= 30; ++k)
      if (y[k] > qmax) qmax = y[k], tmax = run.times[k] / units::fs;
    last = y.back();
    return qmax > 1.0 && last < 1.0;
  };

  double settle_worst = 0.0, settle_e = 0.0;
  for (std::size_t i = 0; i < energies.size(); ++i) {
    const double qss = mie::efficiencies({50e-9, medium::epsilon_steady(medium::MaterialParams{}, energies[i]), 1.0,
                                          units::ev_to_wavelength_m(energies[i])})
                           .q_abs;
    for (std::size_t k = 300; k < run.times.size(); ++k) {
      const double rel = std::abs(run.q[k].q_abs[i] - qss) / qss;
      if (rel > settle_worst) settle_worst = rel, settle_e = energies[i];
    }
  }
  double qmax, tmax, last;
  const bool over = overshoot(0.09, qmax, tmax, last);
  const double per_detuning = run.seconds / static_cast<double>(energies.size());
  report(4, over && settle_worst <= 0.01 && per_detuning < 30.0,
         format("delta = hw1 - hw = +0.09 eV (%.2f eV photons): max Q_abs(0-30 fs) = %.3f at %.0f fs (needs > 1), "
                "Q_abs(400 fs) = %.3f (< 1); all five detunings within %.3f%% of steady state over 300-400 fs "
                "(worst at %.3f eV, <= 1%%); %.3g s per detuning",
                w1 - 0.09, qmax, tmax, last, 100 * settle_worst, settle_e, per_detuning));
  double qm2, tm2, last2;
  const bool mirrored = overshoot(-0.09, qm2, tm2, last2);
  info("criterion 4 mirrored, delta = -0.09 eV (%.2f eV photons): max Q_abs(0-30 fs) = %.3f at %.0f fs, "
       "Q_abs(400 fs) = %.3f, overshoot-and-settle %s",
       w1 + 0.09, qm2, tm2, last2, mirrored ? "holds" : "absent");

  const double expect = 2.0 * units::pi * units::hbar / (0.09 * units::e_charge) / units::fs;
  const double period = dominant_period_fs(trace(run, column(0.09)), 1.0);
  report(5, std::abs(period - expect) <= 0.10 * expect,
         format("delta = +0.09 eV: dominant Q_abs(t) period %.2f fs vs 2 pi hbar/delta = %.2f fs (within 10%%)", period,
                expect));
  info("criterion 5 mirrored, delta = -0.09 eV: dominant period %.2f fs",
       dominant_period_fs(trace(run, column(-0.09)), 1.0));
}

void criterion6() {
  auto captured = [](double energy, double& radius, std::size_t& count, std::size_t seeds) {
    mie::SphereScene s{50e-9, medium::epsilon_steady(medium::MaterialParams{}, energy), 1.0,
                       units::ev_to_wavelength_m(energy)};
    const auto c = mie::mie_coefficients(s);
    std::vector<mie::Vec3> seed;
    for (double y : linspace(-200e-9, 200e-9, seeds)) seed.push_back({0.0, y, -200e-9});
    const auto lines = mie::poynting_streamlines(s, c, seed);
    radius = mie::capture_radius(lines);
    count = mie::captured_count(lines);
  };
  double r216, r212;
  std::size_t n216, n212;
  captured(2.16, r216, n216, 41);
  captured(2.12, r212, n212, 41);
  report(6, std::abs(r216 * 1e9 - 130.0) <= 15.0 && n212 < n216,
         format("10 nm seed spacing, fixed 10 nm steps: capture radius at 2.16 eV = %.0f nm (130 +- 15); captured "
                "seeds %zu at 2.16 eV vs %zu at 2.12 eV (strictly fewer)",
                r216 * 1e9, n216, n212));
  captured(2.16, r216, n216, 401);
  const double qabs = mie::efficiencies({50e-9, medium::epsilon_steady(medium::MaterialParams{}, 2.16), 1.0,
                                         units::ev_to_wavelength_m(2.16)})
                          .q_abs;
  info("criterion 6 with 1 nm seed spacing: capture radius %.0f nm; radius of the absorption cross-section "
       "a sqrt(Q_abs) = %.0f nm",
       r216 * 1e9, 50.0 * std::sqrt(qabs));
}

void criterion7() {
  double worst_e = 0.0, worst_v = 0.0, worst_d = 0.0, worst_sum = 0.0;
  double ratio_lo = 1e9, ratio_hi = 0.0, ratio8_hi = 0.0;
  std::size_t ratio_hi_n = 0;
  for (std::size_t n = 1; n <= 64; ++n) {
    aggregate::AggregateChain c;
    c.n = n;
    c.monomer_dipole = 10.0;
    const auto h = aggregate::hamiltonian(c);
    const auto ni = static_cast<Eigen::Index>(n);
    Eigen::MatrixXd m(ni, ni);
    for (Eigen::Index r = 0; r < ni; ++r)
      for (Eigen::Index k = 0; k < ni; ++k) m(r, k) = h[static_cast<std::size_t>(r * ni + k)];
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(m);
    const auto ev = aggregate::eigenvalues(c);
    double sum = 0.0;
    for (std::size_t k = 1; k <= n; ++k) {
      const auto idx = static_cast<Eigen::Index>(k - 1);
      worst_e = std::max(worst_e, std::abs(ev[k - 1] - solver.eigenvalues()(idx)));
      const auto v = aggregate::eigenstate(c, k);
      double dot = 0.0, dense_dipole = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        dot += v[j] * solver.eigenvectors()(static_cast<Eigen::Index>(j), idx);
        dense_dipole += c.monomer_dipole * solver.eigenvectors()(static_cast<Eigen::Index>(j), idx);
      }
      worst_v = std::max(worst_v, std::abs(std::abs(dot) - 1.0));
      const double d = aggregate::mode_dipole(c, k);
      worst_d = std::max(worst_d, std::abs(d - std::abs(dense_dipole)) / c.monomer_dipole);
      sum += d * d;
    }
    const double expect = static_cast<double>(n) * c.monomer_dipole * c.monomer_dipole;
    worst_sum = std::max(worst_sum, std::abs(sum - expect) / expect);
    if (n >= 7) {
      const double r = aggregate::mode_dipole(c, 1) / aggregate::mode_dipole(c, 3);
      ratio_lo = std::min(ratio_lo, r);
      if (r > ratio_hi) ratio_hi = r, ratio_hi_n = n;
      if (n >= 8) ratio8_hi = std::max(ratio8_hi, r);
    }
  }
  const bool ok = worst_e <= 1e-10 && worst_v <= 1e-10 && worst_d <= 1e-10 && worst_sum <= 1e-10 &&
                  ratio_lo >= 2.9 && ratio_hi <= 3.3;
  report(7, ok,
         format("n <= 64 vs dense diagonalisation: eigenvalues %.1e eV, eigenstates %.1e, dipoles %.1e mu "
                "(<= 1e-10); sum rule %.1e (<= 1e-10); |d1|/|d3| over n >= 7 in [%.3f, %.3f], max at n = %zu "
                "(needs [2.9, 3.3])",
                worst_e, worst_v, worst_d, worst_sum, ratio_lo, ratio_hi, ratio_hi_n));
  info("criterion 7 ratio: n = 7 gives cot(pi/16)/cot(3pi/16) = %.4f analytically; n >= 8 stays in [%.3f, %.3f]",
       1.0 / std::tan(units::pi / 16) / (1.0 / std::tan(3 * units::pi / 16)), ratio_lo, ratio8_hi);
}

void criterion8() {
  bloch::TwoLevelParams p;
  bloch::DriveField d;
  d.amplitude = 1e5;
  d.photon_energy = p.transition_energy;
  d.envelope = bloch::Envelope::StepCosine;
  const double period = 2.0 * units::pi / units::ev_to_rad_per_s(d.photon_energy);
  const std::size_t per = 32;
  const double dt = period / per;
  std::vector<double> times;
  for (std::size_t k = 0; static_cast<double>(k) * dt <= 500e-15; ++k) times.push_back(static_cast<double>(k) * dt);
  const auto t0 = std::chrono::steady_clock::now();
  const auto lab = bloch::evolve_lab(p, d, bloch::DensityMatrix::ground(), 0.0, times.back(),
                                     numerics::OdeMethod::high_order(1e-14, 1e-10), times);
  const auto rwa = bloch::evolve_rwa(p, d, bloch::DensityMatrix::ground(), times);
  const double secs = seconds_since(t0);
  double inv = 0.0;
  for (const auto& s : lab.states) inv = std::max(inv, s.invariant_violation());
  for (const auto& s : rwa.states) inv = std::max(inv, s.invariant_violation());
  const auto a = bloch::cycle_average(bloch::to_rotating(lab, d.photon_energy), per);
  const auto b = bloch::cycle_average(rwa, per);
  double scale = 0.0;
  for (const auto& v : b.rho01) scale = std::max(scale, std::abs(v));
  double worst = 0.0, worst_t = 0.0, late = 0.0;
  for (std::size_t k = 0; k < a.rho01.size(); ++k) {
    const double rel = std::abs(a.rho01[k] - b.rho01[k]) / scale;
    if (rel > worst) worst = rel, worst_t = a.times[k];
    if (a.times[k] > 70e-15) late = std::max(late, rel);
  }
  report(8, worst <= 1e-3 && inv <= 1e-9,
         format("E0 = 1e5 V/m, 0-500 fs: max cycle-averaged coherence difference %.2e of peak at %.1f fs (<= 1e-3); "
                "invariant violation %.1e (<= 1e-9); %.2f s",
                worst, worst_t / units::fs, inv, secs));
  const double g = p.total_dephasing_rate();
  const double w = units::ev_to_rad_per_s(d.photon_energy), w1 = units::ev_to_rad_per_s(p.transition_energy);
  info("criterion 8 after the switch-on transient (70-500 fs): %.2e; expected transient size Gamma/(w1 + w) = %.2e",
       late, g / (w + w1));
}

void criterion9() {
  medium::LorentzParams lp;
  lp.oscillator_strength = 0.05;
  lp.damping = 0.1;
  std::vector<film::RTMeasurement> meas;
  std::vector<cplx> truth;
  for (double e : linspace(2.35, 1.9, 31)) {
    film::FilmStack s;
    s.film_index = medium::refractive_index(medium::lorentz_epsilon(lp, e));
    const double lam = units::ev_to_wavelength_m(e);
    const auto rt = film::rt_theoretical(s, lam);
    meas.push_back({lam, rt.reflectance, rt.transmittance});
    truth.push_back(s.film_index);
  }
  film::ExtractOptions opt;
  opt.thickness = {70e-9, 70e-9, 1};
  const auto cands = film::rescale_candidates(film::extract_nk(meas, opt), 70e-9);
  const auto sel = film::select_physical_branch(cands);
  double dn = 0.0, dk = 0.0;
  std::size_t gaps = 0;
  for (std::size_t i = 0; i < sel.wavelengths.size(); ++i) {
    // sel is ascending in wavelength, meas was built descending in energy.
    const cplx t = truth[i];
    dn = std::max(dn, std::abs(sel.n[i] - t.real()));
    dk = std::max(dk, std::abs(sel.kappa[i] - t.imag()));
    gaps += sel.interpolated[i] ? 1 : 0;
  }
  const double step = opt.grid.n_step;
  const bool round_trip = dn <= 2 * step && dk <= 2 * opt.grid.kappa_step && gaps == 0 && sel.n.size() == 31;

  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> uk(0.0, 3.0), ut(63e-9, 77e-9);
  std::vector<film::NkCandidate> set(5000);
  for (auto& c : set) {
    c.kappa = c.kappa_extracted = uk(rng);
    c.thickness_used = c.thickness_reference = ut(rng);
  }
  const auto direct = film::rescale_candidates(set, 70e-9);
  const auto chained = film::rescale_candidates(film::rescale_candidates(set, 63e-9), 70e-9);
  std::size_t mismatched = 0, identity_off = 0;
  for (std::size_t i = 0; i < set.size(); ++i) {
    mismatched += chained[i].kappa != direct[i].kappa;
    identity_off += film::thickness_rescale(set[i].kappa, set[i].thickness_used, set[i].thickness_used) != set[i].kappa;
  }

  const auto e = linspace(0.5, 6.0, 2201);
  medium::LorentzParams kp;
  std::vector<double> kappa;
  std::vector<cplx> exact;
  for (double x : e) {
    exact.push_back(medium::refractive_index(medium::lorentz_epsilon(kp, x)));
    kappa.push_back(exact.back().imag());
  }
  const auto closed = film::close_with_kk(e, kappa, std::sqrt(kp.eps_background));
  std::size_t centre = 0;
  for (std::size_t i = 0; i < e.size(); ++i)
    if (std::abs(e[i] - kp.resonance) < std::abs(e[centre] - kp.resonance)) centre = i;
  const double kk = std::abs(closed[centre].real() - exact[centre].real()) / exact[centre].real();

  report(9, round_trip && mismatched == 0 && identity_off == 0 && kk <= 0.02,
         format("70 nm round trip on 31 wavelengths: max |dn| %.2g, |dkappa| %.2g (<= 2 steps = %.3f), %zu gaps; "
                "chained vs direct rescale mismatches %zu of %zu, t'=t identity failures %zu; KK n at %.3f eV "
                "off %.2f%% (<= 2%%)",
                dn, dk, 2 * step, gaps, mismatched, set.size(), identity_off, e[centre], 100 * kk));
  std::size_t scalar_off = 0;
  for (const auto& c : set)
    scalar_off += film::thickness_rescale(film::thickness_rescale(c.kappa, c.thickness_used, 70e-9), 70e-9,
                                          c.thickness_used) != c.kappa;
  info("criterion 9 scalar back-and-forth kappa -> t_ref -> t: %zu of %zu differ from kappa by rounding (<= 2 ulp)",
       scalar_off, set.size());
}

void criterion10() {
  double lossless = 0.0;
  for (double m : {1.1, 1.33, 1.5, 2.0, 3.0})
    for (double x : {0.1, 0.5, 1.0, 3.0, 10.0, 30.0}) {
      mie::SphereScene s{50e-9, m * m, 1.0, 2.0 * units::pi * 50e-9 / x};
      lossless = std::max(lossless, std::abs(mie::efficiencies(s).q_abs));
    }
  double rayleigh = 0.0;
  for (cplx m : {cplx(1.5, 0.0), cplx(1.5, 0.1), cplx(2.0, 1.0)})
    for (double x : {0.01, 0.02, 0.05}) {
      mie::SphereScene s{50e-9, m * m, 1.0, 2.0 * units::pi * 50e-9 / x};
      const double ref = 8.0 / 3.0 * std::pow(x, 4) * std::norm((m * m - 1.0) / (m * m + 2.0));
      rayleigh = std::max(rayleigh, std::abs(mie::efficiencies(s).q_sca - ref) / ref);
    }
  mie::SphereScene matched{50e-9, 2.25, 2.25, 574e-9};
  const auto c = mie::mie_coefficients(matched);
  double coeff = 0.0;
  for (std::size_t n = 0; n < c.n_max; ++n) coeff = std::max({coeff, std::abs(c.a[n]), std::abs(c.b[n])});
  double enh = 0.0;
  for (double y : linspace(-240e-9, 240e-9, 25))
    for (double z : linspace(-240e-9, 240e-9, 25)) {
      const mie::Vec3 r{0.0, y, z == 0.0 && y == 0.0 ? 1e-10 : z};
      enh = std::max(enh, std::abs(mie::near_field(matched, c, r).enhancement - 1.0));
    }
  report(10, lossless <= 1e-10 && rayleigh <= 0.01 && coeff <= 1e-12 && enh <= 1e-5,
         format("lossless |Q_abs| max %.1e (<= 1e-10); Rayleigh Q_sca off %.3f%% for x <= 0.05 (<= 1%%); "
                "index-matched |a_n|, |b_n| max %.1e, |enhancement - 1| max %.1e (<= 1e-5)",
                lossless, 100 * rayleigh, coeff, enh));
}

}  // namespace

int main() {
  criterion1();
  criterion2();
  criterion3();
  criteria4and5();
  criterion6();
  criterion7();
  criterion8();
  criterion9();
  criterion10();
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
