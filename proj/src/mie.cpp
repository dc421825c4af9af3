#include "lsep/mie.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "lsep/errors.hpp"
#include "lsep/units.hpp"

namespace lsep::mie {

void SphereScene::validate() const {
  if (!(radius > 0.0) || !std::isfinite(radius)) throw ConfigError("radius must be > 0");
  if (!(wavelength_vacuum > 0.0) || !std::isfinite(wavelength_vacuum)) throw ConfigError("wavelength must be > 0");
  if (!(host_epsilon >= 1.0) || !std::isfinite(host_epsilon)) throw ConfigError("host_epsilon must be >= 1");
  if (!std::isfinite(sphere_epsilon.real()) || !std::isfinite(sphere_epsilon.imag()))
    throw ConfigError("sphere_epsilon must be finite");
  // Im eps < 0 (transient gain) is allowed: the coefficients stay analytic and Q_abs goes negative.
}

double SphereScene::host_index() const { return std::sqrt(host_epsilon); }
double SphereScene::wavenumber() const { return 2.0 * units::pi * host_index() / wavelength_vacuum; }
double SphereScene::size_parameter() const { return wavenumber() * radius; }
cplx SphereScene::relative_index() const { return medium::refractive_index(sphere_epsilon) / host_index(); }

std::size_t default_n_max(double x) {
  return static_cast<std::size_t>(std::ceil(x + 4.0 * std::cbrt(x) + 2.0));
}

namespace {

void require_finite(cplx v, const char* what, std::size_t n) {
  if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
    throw RecurrenceUnstable(std::string(what) + " recurrence not finite at order " + std::to_string(n));
}

// j_0..j_nmax at complex z. Ratios j_n / j_{n-1} come from a downward
// recurrence (stable for every z); the sequence is then anchored on j_0 or
// j_1, whichever is better conditioned.
std::vector<cplx> spherical_j(cplx z, std::size_t nmax) {
  std::vector<cplx> j(nmax + 1);
  const double az = std::abs(z);
  if (az < 1e-8) {
    // Leading term of the power series.
    cplx term = 1.0;
    for (std::size_t n = 0; n <= nmax; ++n) {
      j[n] = term;
      term *= z / static_cast<double>(2 * n + 3);
    }
    return j;
  }
  const std::size_t start = std::max<std::size_t>(nmax, static_cast<std::size_t>(az)) + 20 +
                            static_cast<std::size_t>(std::sqrt(40.0 * std::max<double>(nmax, az)));
  std::vector<cplx> ratio(start + 2, 0.0);
  for (std::size_t n = start; n >= 1; --n) {
    ratio[n] = z / (static_cast<double>(2 * n + 1) - z * ratio[n + 1]);
    require_finite(ratio[n], "spherical Bessel ratio", n);
  }
  const cplx s = std::sin(z);
  const cplx c = std::cos(z);
  const cplx j0 = s / z;
  const cplx j1 = s / (z * z) - c / z;
  if (std::abs(j0) >= std::abs(j1) || nmax == 0) {
    j[0] = j0;
    for (std::size_t n = 1; n <= nmax; ++n) j[n] = ratio[n] * j[n - 1];
  } else {
    j[0] = j1 / ratio[1];
    j[1] = j1;
    for (std::size_t n = 2; n <= nmax; ++n) j[n] = ratio[n] * j[n - 1];
  }
  for (std::size_t n = 0; n <= nmax; ++n) require_finite(j[n], "spherical Bessel", n);
  return j;
}

// y_0..y_nmax at real x by upward recurrence (stable for the growing solution).
std::vector<double> spherical_y(double x, std::size_t nmax) {
  std::vector<double> y(nmax + 1);
  y[0] = -std::cos(x) / x;
  if (nmax >= 1) y[1] = -std::cos(x) / (x * x) - std::sin(x) / x;
  for (std::size_t n = 2; n <= nmax; ++n) y[n] = static_cast<double>(2 * n - 1) / x * y[n - 1] - y[n - 2];
  return y;
}

}  // namespace

MieCoefficients mie_coefficients(const SphereScene& scene, std::size_t n_max) {
  scene.validate();
  const double x = scene.size_parameter();
  if (!(x > 0.0) || x > kMaxSizeParameter)
    throw SizeParameterOutOfRange("size parameter " + std::to_string(x) + " outside (0, 100]");
  const cplx m = scene.relative_index();
  const cplx mx = m * x;
  const std::size_t nmax = n_max > 0 ? n_max : default_n_max(x);

  const auto jx = spherical_j(x, nmax);
  const auto yx = spherical_y(x, nmax);
  const auto jm = spherical_j(mx, nmax);

  // Logarithmic derivative of psi_n(mx), downward from well above nmax.
  const std::size_t start = std::max<std::size_t>(nmax, static_cast<std::size_t>(std::abs(mx))) + 16;
  std::vector<cplx> dlog(start + 1, 0.0);
  for (std::size_t n = start; n >= 1; --n) {
    const cplx nz = static_cast<double>(n) / mx;
    dlog[n - 1] = nz - 1.0 / (dlog[n] + nz);
    require_finite(dlog[n - 1], "log-derivative", n - 1);
  }

  MieCoefficients out;
  out.n_max = nmax;
  out.a.resize(nmax);
  out.b.resize(nmax);
  out.c.resize(nmax);
  out.d.resize(nmax);
  for (std::size_t n = 1; n <= nmax; ++n) {
    const double nd = static_cast<double>(n);
    const double psi = x * jx[n].real();
    const double psi1 = x * jx[n - 1].real();
    const cplx xi = x * cplx(jx[n].real(), yx[n]);
    const cplx xi1 = x * cplx(jx[n - 1].real(), yx[n - 1]);
    const double dpsi = psi1 - nd * psi / x;
    const cplx dxi = xi1 - nd * xi / x;
    const cplx dn = dlog[n];

    const cplx ta = dn / m + nd / x;
    const cplx tb = m * dn + nd / x;
    out.a[n - 1] = (ta * psi - psi1) / (ta * xi - xi1);
    out.b[n - 1] = (tb * psi - psi1) / (tb * xi - xi1);

    const cplx wronskian = psi * dxi - xi * dpsi;
    const cplx psim = mx * jm[n];
    out.c[n - 1] = m * wronskian / (psim * (dxi - m * dn * xi));
    out.d[n - 1] = m * wronskian / (psim * (m * dxi - dn * xi));
    require_finite(out.a[n - 1], "Mie a", n);
    require_finite(out.b[n - 1], "Mie b", n);
    require_finite(out.c[n - 1], "Mie c", n);
    require_finite(out.d[n - 1], "Mie d", n);
  }
  return out;
}

Efficiencies efficiencies(const SphereScene& scene, const MieCoefficients& coeffs) {
  const double x = scene.size_parameter();
  double ext = 0.0;
  double sca = 0.0;
  for (std::size_t n = 1; n <= coeffs.n_max; ++n) {
    const double w = static_cast<double>(2 * n + 1);
    const cplx a = coeffs.a[n - 1];
    const cplx b = coeffs.b[n - 1];
    ext += w * (a + b).real();
    sca += w * (std::norm(a) + std::norm(b));
  }
  Efficiencies q;
  q.q_ext = 2.0 / (x * x) * ext;
  q.q_sca = 2.0 / (x * x) * sca;
  q.q_abs = q.q_ext - q.q_sca;
  return q;
}

Efficiencies efficiencies(const SphereScene& scene) { return efficiencies(scene, mie_coefficients(scene)); }

QSpectrum qabs_spectrum(const medium::PermittivitySpectrum& eps, double radius, double host_epsilon) {
  eps.validate();
  QSpectrum q;
  q.energies = eps.energies;
  q.time = eps.time;
  double kmax = 0.0;
  for (std::size_t i = 0; i < eps.energies.size(); ++i) {
    SphereScene s;
    s.radius = radius;
    s.sphere_epsilon = eps.epsilon[i];
    s.host_epsilon = host_epsilon;
    s.wavelength_vacuum = units::ev_to_wavelength_m(eps.energies[i]);
    const auto e = efficiencies(s);
    q.q_ext.push_back(e.q_ext);
    q.q_sca.push_back(e.q_sca);
    q.q_abs.push_back(e.q_abs);
    const double k = medium::refractive_index(eps.epsilon[i]).imag();
    q.kappa_normalized.push_back(k);
    kmax = std::max(kmax, k);
  }
  if (kmax > 0.0)
    for (auto& k : q.kappa_normalized) k /= kmax;
  return q;
}

std::vector<QSpectrum> qabs_transient(std::span<const medium::PermittivitySpectrum> slices, double radius,
                                      double host_epsilon) {
  std::vector<QSpectrum> out;
  out.reserve(slices.size());
  for (const auto& s : slices) out.push_back(qabs_spectrum(s, radius, host_epsilon));
  return out;
}

namespace {

struct Radial {
  std::vector<cplx> z;   // z_n(rho), n = 1..N at index n - 1
  std::vector<cplx> dz;  // (rho z_n)' / rho
};

Radial radial_from(const std::vector<cplx>& zn, cplx rho, std::size_t nmax) {
  Radial r;
  r.z.resize(nmax);
  r.dz.resize(nmax);
  for (std::size_t n = 1; n <= nmax; ++n) {
    r.z[n - 1] = zn[n];
    r.dz[n - 1] = zn[n - 1] - static_cast<double>(n) * zn[n] / rho;
  }
  return r;
}

// Sums sum_n E_n (p_n M_o1n + q_n N_e1n) and sum_n E_n (r_n M_e1n + s_n N_o1n)
// in spherical components, for a given radial function.
struct Harmonics {
  std::vector<double> pi, tau;
  double cos_phi = 1.0, sin_phi = 0.0, sin_theta = 0.0;
};

Harmonics angular(double theta, double phi, std::size_t nmax) {
  Harmonics h;
  h.pi.assign(nmax + 1, 0.0);
  h.tau.assign(nmax + 1, 0.0);
  const double mu = std::cos(theta);
  h.sin_theta = std::sin(theta);
  h.cos_phi = std::cos(phi);
  h.sin_phi = std::sin(phi);
  if (nmax >= 1) h.pi[1] = 1.0;
  for (std::size_t n = 2; n <= nmax; ++n) {
    const double nd = static_cast<double>(n);
    h.pi[n] = (2.0 * nd - 1.0) / (nd - 1.0) * mu * h.pi[n - 1] - nd / (nd - 1.0) * h.pi[n - 2];
  }
  for (std::size_t n = 1; n <= nmax; ++n) {
    const double nd = static_cast<double>(n);
    h.tau[n] = nd * mu * h.pi[n] - (nd + 1.0) * h.pi[n - 1];
  }
  return h;
}

// Odd/even, magnetic/electric vector spherical harmonics with m = 1.
CVec3 m_o(const Harmonics& h, std::size_t n, cplx z) {
  return {0.0, h.cos_phi * h.pi[n] * z, -h.sin_phi * h.tau[n] * z};
}
CVec3 m_e(const Harmonics& h, std::size_t n, cplx z) {
  return {0.0, -h.sin_phi * h.pi[n] * z, -h.cos_phi * h.tau[n] * z};
}
CVec3 n_o(const Harmonics& h, std::size_t n, cplx z, cplx dz, cplx rho) {
  const double nn = static_cast<double>(n * (n + 1));
  return {h.sin_phi * nn * h.sin_theta * h.pi[n] * z / rho, h.sin_phi * h.tau[n] * dz, h.cos_phi * h.pi[n] * dz};
}
CVec3 n_e(const Harmonics& h, std::size_t n, cplx z, cplx dz, cplx rho) {
  const double nn = static_cast<double>(n * (n + 1));
  return {h.cos_phi * nn * h.sin_theta * h.pi[n] * z / rho, h.cos_phi * h.tau[n] * dz, -h.sin_phi * h.pi[n] * dz};
}

void accumulate(CVec3& acc, cplx w, const CVec3& v) {
  for (std::size_t i = 0; i < 3; ++i) acc[i] += w * v[i];
}

}  // namespace

FieldSample near_field(const SphereScene& scene, const MieCoefficients& coeffs, const Vec3& point, double e0) {
  const double r = std::sqrt(point[0] * point[0] + point[1] * point[1] + point[2] * point[2]);
  if (!(r > 0.0)) throw std::invalid_argument("near_field: point must not be the origin");
  if (r > 10.0 * scene.radius * (1.0 + 1e-12))
    throw EvaluationTooFarOut("near_field: |r| = " + std::to_string(r) + " m exceeds 10 sphere radii");

  const double theta = std::acos(std::clamp(point[2] / r, -1.0, 1.0));
  const double phi = std::atan2(point[1], point[0]);
  const std::size_t nmax = coeffs.n_max;
  const Harmonics h = angular(theta, phi, nmax);
  const double k = scene.wavenumber();
  const double nh = scene.host_index();
  const cplx i(0.0, 1.0);

  CVec3 e{};
  CVec3 hf{};
  cplx en_phase = 1.0;
  if (r < scene.radius) {
    const cplx m = scene.relative_index();
    const cplx rho = m * k * r;
    const Radial rad = radial_from(spherical_j(rho, nmax), rho, nmax);
    CVec3 hsum{};
    for (std::size_t n = 1; n <= nmax; ++n) {
      en_phase *= i;
      const cplx en = e0 * en_phase * static_cast<double>(2 * n + 1) / static_cast<double>(n * (n + 1));
      const cplx z = rad.z[n - 1], dz = rad.dz[n - 1];
      accumulate(e, en * coeffs.c[n - 1], m_o(h, n, z));
      accumulate(e, -i * en * coeffs.d[n - 1], n_e(h, n, z, dz, rho));
      accumulate(hsum, en * coeffs.d[n - 1], m_e(h, n, z));
      accumulate(hsum, i * en * coeffs.c[n - 1], n_o(h, n, z, dz, rho));
    }
    const cplx hpref = -m * nh / units::z0;
    for (std::size_t c = 0; c < 3; ++c) hf[c] = hpref * hsum[c];
  } else {
    const double rho = k * r;
    const auto jn = spherical_j(rho, nmax);
    const auto yn = spherical_y(rho, nmax);
    std::vector<cplx> hn(nmax + 1);
    for (std::size_t n = 0; n <= nmax; ++n) hn[n] = cplx(jn[n].real(), yn[n]);
    const Radial out = radial_from(hn, rho, nmax);
    CVec3 hsum{};
    for (std::size_t n = 1; n <= nmax; ++n) {
      en_phase *= i;
      const cplx en = e0 * en_phase * static_cast<double>(2 * n + 1) / static_cast<double>(n * (n + 1));
      const cplx a = coeffs.a[n - 1], b = coeffs.b[n - 1];
      const cplx zs = out.z[n - 1], dzs = out.dz[n - 1];
      accumulate(e, i * en * a, n_e(h, n, zs, dzs, rho));
      accumulate(e, -en * b, m_o(h, n, zs));
      accumulate(hsum, i * en * b, n_o(h, n, zs, dzs, rho));
      accumulate(hsum, en * a, m_e(h, n, zs));
    }
    const double hpref = nh / units::z0;
    for (std::size_t c = 0; c < 3; ++c) hf[c] = hpref * hsum[c];
  }

  // Spherical (r, theta, phi) to Cartesian. Outside, the incident plane wave
  // is added in closed form; its partial-wave series converges slowly at kr >> x.
  const double st = h.sin_theta, ct = std::cos(theta);
  const double cp = h.cos_phi, sp = h.sin_phi;
  const std::array<Vec3, 3> basis = {Vec3{st * cp, st * sp, ct}, Vec3{ct * cp, ct * sp, -st}, Vec3{-sp, cp, 0.0}};
  FieldSample s;
  s.position = point;
  for (std::size_t c = 0; c < 3; ++c) {
    for (std::size_t b = 0; b < 3; ++b) {
      s.e[c] += e[b] * basis[b][c];
      s.h[c] += hf[b] * basis[b][c];
    }
  }
  if (r >= scene.radius) {
    const cplx wave = e0 * std::exp(cplx(0.0, k * point[2]));
    s.e[0] += wave;
    s.h[1] += nh / units::z0 * wave;
  }
  double norm = 0.0;
  for (const auto& v : s.e) norm += std::norm(v);
  s.enhancement = e0 > 0.0 ? std::sqrt(norm) / e0 : 0.0;
  return s;
}

Vec3 poynting(const FieldSample& s) {
  const auto& e = s.e;
  const CVec3 hc = {std::conj(s.h[0]), std::conj(s.h[1]), std::conj(s.h[2])};
  return {0.5 * (e[1] * hc[2] - e[2] * hc[1]).real(), 0.5 * (e[2] * hc[0] - e[0] * hc[2]).real(),
          0.5 * (e[0] * hc[1] - e[1] * hc[0]).real()};
}

namespace {

double length(const Vec3& v) { return std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]); }

Vec3 direction(const SphereScene& scene, const MieCoefficients& coeffs, const Vec3& p) {
  const Vec3 s = poynting(near_field(scene, coeffs, p, 1.0));
  const double n = length(s);
  // Incident intensity for unit field is n_h / (2 Z0); anything far below is zero flux.
  const double ref = scene.host_index() / (2.0 * units::z0);
  if (!(n > 1e-14 * ref))
    throw ZeroPoyntingVector("Poynting vector vanishes at (" + std::to_string(p[0]) + ", " + std::to_string(p[1]) +
                             ", " + std::to_string(p[2]) + ")");
  return {s[0] / n, s[1] / n, s[2] / n};
}

Vec3 advance(const Vec3& p, const Vec3& dir, double h) {
  return {p[0] + h * dir[0], p[1] + h * dir[1], p[2] + h * dir[2]};
}

}  // namespace

std::vector<Streamline> poynting_streamlines(const SphereScene& scene, const MieCoefficients& coeffs,
                                             std::span<const Vec3> seeds, const StreamlineOptions& options) {
  if (!(options.step > 0.0)) throw ConfigError("streamline step must be > 0");
  if (options.mode == StreamlineMode::AdaptiveMidpoint && !(options.tolerance > 0.0))
    throw ConfigError("streamline tolerance must be > 0");
  const double limit = 10.0 * scene.radius * (1.0 - 1e-9);
  const double domain = options.domain_radius > 0.0 ? std::min(options.domain_radius, limit) : limit;

  std::vector<Streamline> lines;
  lines.reserve(seeds.size());
  for (const auto& seed : seeds) {
    Streamline line;
    line.seed = seed;
    line.points.push_back(seed);
    Vec3 p = seed;
    if (length(p) < scene.radius) {
      line.terminated = Termination::EnteredSphereAndAbsorbed;
      lines.push_back(std::move(line));
      continue;
    }
    if (length(p) > domain) {
      line.terminated = Termination::LeftDomain;
      lines.push_back(std::move(line));
      continue;
    }
    line.terminated = Termination::MaxSteps;
    double h = options.step;
    for (std::size_t s = 0; s < options.max_steps; ++s) {
      if (options.mode == StreamlineMode::FixedEuler) {
        p = advance(p, direction(scene, coeffs, p), options.step);
      } else {
        const Vec3 k1 = direction(scene, coeffs, p);
        while (true) {
          const Vec3 mid = advance(p, k1, 0.5 * h);
          // Near the outer edge the midpoint may fall past the field's validity limit.
          const Vec3 k2 = length(mid) > 0.0 && length(mid) <= limit ? direction(scene, coeffs, mid) : k1;
          const double err = h * length(Vec3{k2[0] - k1[0], k2[1] - k1[1], k2[2] - k1[2]});
          if (err <= options.tolerance || h <= options.step / 1024.0) {
            p = advance(p, k2, h);
            if (err < 0.25 * options.tolerance) h = std::min(options.step, 2.0 * h);
            break;
          }
          h *= 0.5;
        }
      }
      line.points.push_back(p);
      const double r = length(p);
      if (r < scene.radius) {
        line.terminated = Termination::EnteredSphereAndAbsorbed;
        break;
      }
      if (r > domain) {
        line.terminated = Termination::LeftDomain;
        break;
      }
    }
    lines.push_back(std::move(line));
  }
  return lines;
}

double capture_radius(std::span<const Streamline> lines) {
  double best = 0.0;
  for (const auto& l : lines)
    if (l.terminated == Termination::EnteredSphereAndAbsorbed)
      best = std::max(best, std::hypot(l.seed[0], l.seed[1]));
  return best;
}

std::size_t captured_count(std::span<const Streamline> lines) {
  return static_cast<std::size_t>(std::count_if(lines.begin(), lines.end(), [](const Streamline& l) {
    return l.terminated == Termination::EnteredSphereAndAbsorbed;
  }));
}

Polarizability quasistatic_polarizability(cplx sphere_epsilon, double host_epsilon, double radius) {
  Polarizability p;
  const cplx denom = sphere_epsilon + 2.0 * host_epsilon;
  p.resonance_distance = std::abs(denom);
  p.divergent = p.resonance_distance <= 1e-12 * host_epsilon;
  const double vol = 4.0 * units::pi * radius * radius * radius;
  if (p.divergent) {
    p.alpha = cplx(std::numeric_limits<double>::infinity(), 0.0);
  } else {
    p.alpha = vol * (sphere_epsilon - host_epsilon) / denom;
  }
  return p;
}

}  // namespace lsep::mie
