#include "lsep/bloch.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "lsep/errors.hpp"
#include "lsep/units.hpp"

namespace lsep::bloch {

using numerics::ComplexMatrix;
using numerics::CVector;

double TwoLevelParams::total_dephasing_rate() const {
  return 0.5 * decay_rate + units::ev_to_rad_per_s(pure_dephasing);
}

double TwoLevelParams::total_dephasing_ev() const { return units::rad_per_s_to_ev(total_dephasing_rate()); }

void TwoLevelParams::validate() const {
  if (!(decay_rate >= 0.0) || !std::isfinite(decay_rate)) throw ConfigError("decay_rate must be >= 0");
  if (!(pure_dephasing >= 0.0) || !std::isfinite(pure_dephasing)) throw ConfigError("pure_dephasing must be >= 0");
  if (!(dipole >= 0.0) || !std::isfinite(dipole)) throw ConfigError("dipole must be >= 0");
  if (!(transition_energy > 0.0) || !std::isfinite(transition_energy))
    throw ConfigError("transition_energy must be > 0");
}

void DriveField::validate() const {
  if (!(amplitude >= 0.0) || !std::isfinite(amplitude)) throw ConfigError("amplitude must be >= 0");
  if (!(photon_energy > 0.0) || !std::isfinite(photon_energy)) throw ConfigError("photon_energy must be > 0");
  if (!std::isfinite(turn_on)) throw ConfigError("turn_on must be finite");
}

double detuning_ev(const TwoLevelParams& p, const DriveField& d) { return p.transition_energy - d.photon_energy; }

double detuning_rate(const TwoLevelParams& p, const DriveField& d) {
  return units::ev_to_rad_per_s(detuning_ev(p, d));
}

DensityMatrix DensityMatrix::from_vector(std::span<const cplx> v) {
  if (v.size() != 4) throw std::invalid_argument("density matrix needs 4 components");
  return {v[0], v[1], v[2], v[3]};
}

double DensityMatrix::min_eigenvalue() const {
  const double a = rho00.real();
  const double b = rho11.real();
  const double off = std::abs(0.5 * (rho01 + std::conj(rho10)));
  return 0.5 * (a + b) - std::sqrt(0.25 * (a - b) * (a - b) + off * off);
}

double DensityMatrix::invariant_violation() const {
  double v = std::abs(trace() - 1.0);
  v = std::max(v, std::abs(rho10 - std::conj(rho01)));
  v = std::max(v, std::abs(rho00.imag()));
  v = std::max(v, std::abs(rho11.imag()));
  v = std::max(v, -min_eigenvalue());
  return v;
}

double distance(const DensityMatrix& a, const DensityMatrix& b) {
  const auto x = a.as_vector();
  const auto y = b.as_vector();
  double s = 0.0;
  for (std::size_t i = 0; i < 4; ++i) s += std::norm(x[i] - y[i]);
  return std::sqrt(s);
}

namespace {

double rabi_rate(const TwoLevelParams& p, const DriveField& d) {
  return units::debye_to_cm(p.dipole) * d.amplitude / units::hbar;
}

ComplexMatrix generator(const TwoLevelParams& p, double detuning, double rabi) {
  const cplx i(0.0, 1.0);
  const double g = p.decay_rate;
  const double big_gamma = p.total_dephasing_rate();
  const cplx h = 0.5 * i * rabi;
  return ComplexMatrix{
      {0.0, h, -h, g},
      {h, -(big_gamma + i * detuning), 0.0, -h},
      {-h, 0.0, -(big_gamma - i * detuning), h},
      {0.0, -h, h, -g},
  };
}

// exp(L t) applied to x, through an eigen-decomposition when the generator
// is diagonalisable and a direct exponential otherwise.
class Propagator {
 public:
  explicit Propagator(const ComplexMatrix& l) : l_(l) {
    try {
      auto e = numerics::eig(l);
      values_ = std::move(e.values);
      vectors_ = std::move(e.vectors);
      inverse_ = numerics::inverse(vectors_);
      diagonal_ = true;
    } catch (const DefectiveMatrix&) {
      diagonal_ = false;
    } catch (const SingularMatrix&) {
      diagonal_ = false;
    }
  }

  CVector apply(std::span<const cplx> x, double t) const {
    if (t == 0.0) return CVector(x.begin(), x.end());
    if (!diagonal_) {
      ComplexMatrix lt(l_.rows(), l_.cols());
      for (std::size_t r = 0; r < l_.rows(); ++r)
        for (std::size_t c = 0; c < l_.cols(); ++c) lt(r, c) = l_(r, c) * t;
      return numerics::expm(lt) * x;
    }
    CVector coeff = inverse_ * x;
    for (std::size_t k = 0; k < coeff.size(); ++k) coeff[k] *= std::exp(values_[k] * t);
    return vectors_ * coeff;
  }

 private:
  ComplexMatrix l_;
  CVector values_;
  ComplexMatrix vectors_;
  ComplexMatrix inverse_;
  bool diagonal_ = false;
};

}  // namespace

ComplexMatrix liouvillian_rwa(const TwoLevelParams& p, const DriveField& d) {
  return generator(p, detuning_rate(p, d), rabi_rate(p, d));
}

DensityMatrix steady_state(const TwoLevelParams& p, const DriveField& d) {
  p.validate();
  d.validate();
  if (p.decay_rate == 0.0) throw NoUniqueSteadyState("steady state is not unique without population decay");
  ComplexMatrix l = liouvillian_rwa(p, d);
  // The population rows are linearly dependent; swap one for the trace.
  for (std::size_t c = 0; c < 4; ++c) l(0, c) = (c == 0 || c == 3) ? 1.0 : 0.0;
  // Scale so the trace row is commensurate with rates of order 1e13.
  const double s = std::max({p.decay_rate, p.total_dephasing_rate(), std::abs(detuning_rate(p, d)),
                             rabi_rate(p, d), 1.0});
  for (std::size_t r = 1; r < 4; ++r)
    for (std::size_t c = 0; c < 4; ++c) l(r, c) /= s;
  const CVector b = {1.0, 0.0, 0.0, 0.0};
  const CVector x = numerics::solve_linear(l, b);
  DensityMatrix rho = DensityMatrix::from_vector(x);
  // Clean the roundoff-level asymmetry the pivoting leaves behind.
  rho.rho00 = rho.rho00.real();
  rho.rho11 = rho.rho11.real();
  const cplx c = 0.5 * (rho.rho01 + std::conj(rho.rho10));
  rho.rho01 = c;
  rho.rho10 = std::conj(c);
  return rho;
}

BlochTrajectory evolve_rwa(const TwoLevelParams& p, const DriveField& d, const DensityMatrix& rho0,
                           std::span<const double> sample_times) {
  p.validate();
  d.validate();
  for (std::size_t i = 1; i < sample_times.size(); ++i)
    if (!(sample_times[i] > sample_times[i - 1]))
      throw std::invalid_argument("evolve_rwa: sample times must be strictly increasing");

  const Propagator driven(liouvillian_rwa(p, d));
  const bool stepped = d.envelope == Envelope::StepCosine && d.turn_on > 0.0;
  DriveField dark = d;
  dark.amplitude = 0.0;
  const Propagator free(liouvillian_rwa(p, dark));

  const auto x0 = rho0.as_vector();
  CVector x_on(x0.begin(), x0.end());
  if (stepped) x_on = free.apply(x0, d.turn_on);

  BlochTrajectory out;
  out.frame = Frame::Rotating;
  out.times.assign(sample_times.begin(), sample_times.end());
  out.states.reserve(sample_times.size());
  for (double t : sample_times) {
    CVector x;
    if (stepped && t < d.turn_on) {
      x = free.apply(x0, t);
    } else {
      x = driven.apply(x_on, stepped ? t - d.turn_on : t);
    }
    out.states.push_back(DensityMatrix::from_vector(x));
  }
  return out;
}

namespace {

// Packed as (Re, Im) pairs in the state-vector order.
void lab_rhs(const TwoLevelParams& p, const DriveField& d, double t, std::span<const double> y,
             std::span<double> dy) {
  const cplx i(0.0, 1.0);
  const cplx p0(y[0], y[1]);
  const cplx s(y[2], y[3]);
  const cplx sc(y[4], y[5]);
  const cplx p1(y[6], y[7]);
  const double w1 = units::ev_to_rad_per_s(p.transition_energy);
  const double w = units::ev_to_rad_per_s(d.photon_energy);
  const double big_gamma = p.total_dephasing_rate();
  const double rabi = d.on_at(t) ? rabi_rate(p, d) * std::cos(w * t) : 0.0;

  const cplx ds = -(big_gamma + i * w1) * s + i * rabi * (p0 - p1);
  const cplx dsc = -(big_gamma - i * w1) * sc - i * rabi * (p0 - p1);
  const cplx dp1 = i * rabi * (sc - s) - p.decay_rate * p1;
  const cplx dp0 = -dp1;
  dy[0] = dp0.real();
  dy[1] = dp0.imag();
  dy[2] = ds.real();
  dy[3] = ds.imag();
  dy[4] = dsc.real();
  dy[5] = dsc.imag();
  dy[6] = dp1.real();
  dy[7] = dp1.imag();
}

}  // namespace

BlochTrajectory evolve_lab(const TwoLevelParams& p, const DriveField& d, const DensityMatrix& rho0, double t0,
                           double t1, const numerics::OdeMethod& method, std::span<const double> sample_times) {
  p.validate();
  d.validate();
  if (!(t1 > t0)) throw std::invalid_argument("evolve_lab: requires t1 > t0");
  for (std::size_t i = 0; i < sample_times.size(); ++i) {
    if (sample_times[i] < t0 || sample_times[i] > t1)
      throw std::invalid_argument("evolve_lab: sample time outside [t0, t1]");
    if (i > 0 && !(sample_times[i] > sample_times[i - 1]))
      throw std::invalid_argument("evolve_lab: sample times must be strictly increasing");
  }
  auto f = [&](double t, std::span<const double> y, std::span<double> dy) { lab_rhs(p, d, t, y, dy); };

  std::vector<double> y(8);
  const auto v = rho0.as_vector();
  for (std::size_t k = 0; k < 4; ++k) {
    y[2 * k] = v[k].real();
    y[2 * k + 1] = v[k].imag();
  }

  // Integrate across the switch-on in two pieces so no step straddles it.
  std::vector<double> breaks = {t0};
  if (d.envelope == Envelope::StepCosine && d.turn_on > t0 && d.turn_on < t1) breaks.push_back(d.turn_on);
  breaks.push_back(t1);

  BlochTrajectory out;
  out.frame = Frame::Lab;
  std::size_t next = 0;
  for (std::size_t seg = 0; seg + 1 < breaks.size(); ++seg) {
    const double a = breaks[seg];
    const double b = breaks[seg + 1];
    std::vector<double> ts;
    while (next < sample_times.size() && sample_times[next] <= b) {
      if (sample_times[next] >= a) ts.push_back(sample_times[next]);
      ++next;
    }
    if (ts.empty() || ts.back() != b) ts.push_back(b);
    const auto tr = numerics::integrate(f, y, a, b, method, ts);
    out.step_stats.accepted += tr.step_stats.accepted;
    out.step_stats.rejected += tr.step_stats.rejected;
    out.step_stats.evaluations += tr.step_stats.evaluations;
    for (std::size_t k = 0; k < tr.times.size(); ++k) {
      const bool requested = std::binary_search(sample_times.begin(), sample_times.end(), tr.times[k]);
      const bool duplicate = !out.times.empty() && out.times.back() == tr.times[k];
      if (!requested || duplicate) continue;
      const auto& s = tr.states[k];
      out.times.push_back(tr.times[k]);
      out.states.push_back({cplx(s[0], s[1]), cplx(s[2], s[3]), cplx(s[4], s[5]), cplx(s[6], s[7])});
    }
    y = tr.states.back();
  }
  return out;
}

DensityMatrix to_rotating(const DensityMatrix& lab, double t, double photon_energy_ev) {
  const cplx phase = std::polar(1.0, units::ev_to_rad_per_s(photon_energy_ev) * t);
  return {lab.rho00, lab.rho01 * phase, lab.rho10 * std::conj(phase), lab.rho11};
}

DensityMatrix to_lab(const DensityMatrix& rotating, double t, double photon_energy_ev) {
  const cplx phase = std::polar(1.0, -units::ev_to_rad_per_s(photon_energy_ev) * t);
  return {rotating.rho00, rotating.rho01 * phase, rotating.rho10 * std::conj(phase), rotating.rho11};
}

BlochTrajectory to_rotating(const BlochTrajectory& lab, double photon_energy_ev) {
  if (lab.frame == Frame::Rotating) return lab;
  BlochTrajectory out = lab;
  out.frame = Frame::Rotating;
  for (std::size_t k = 0; k < out.times.size(); ++k)
    out.states[k] = to_rotating(lab.states[k], lab.times[k], photon_energy_ev);
  return out;
}

CoherenceEnvelope cycle_average(const BlochTrajectory& rotating, std::size_t window) {
  if (rotating.frame != Frame::Rotating) throw std::invalid_argument("cycle_average: needs a rotating-frame trajectory");
  if (window == 0) throw std::invalid_argument("cycle_average: window must be positive");
  CoherenceEnvelope env;
  const std::size_t n = rotating.times.size();
  if (n < window) return env;
  cplx sum = 0.0;
  double tsum = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    sum += rotating.states[k].rho01;
    tsum += rotating.times[k];
    if (k >= window) {
      sum -= rotating.states[k - window].rho01;
      tsum -= rotating.times[k - window];
    }
    if (k + 1 >= window) {
      env.times.push_back(tsum / static_cast<double>(window));
      env.rho01.push_back(sum / static_cast<double>(window));
    }
  }
  return env;
}

RabiFrequencies rabi_frequencies(const TwoLevelParams& p, const DriveField& d) {
  RabiFrequencies r;
  r.omega_rabi = rabi_rate(p, d);
  r.omega_rabi_general = std::hypot(r.omega_rabi, detuning_rate(p, d));
  return r;
}

cplx linear_coherence_per_field(const TwoLevelParams& p, double photon_energy_ev) {
  const double delta = units::ev_to_rad_per_s(p.transition_energy - photon_energy_ev);
  const double g = p.total_dephasing_rate();
  const double pref = units::debye_to_cm(p.dipole) / (2.0 * units::hbar);
  return pref * cplx(delta, g) / (delta * delta + g * g);
}

}  // namespace lsep::bloch
