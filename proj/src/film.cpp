#include "lsep/film.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "lsep/errors.hpp"
#include "lsep/numerics/kramers_kronig.hpp"
#include "lsep/numerics/nelder_mead.hpp"
#include "lsep/units.hpp"

namespace lsep::film {

namespace {

bool finite(double v) { return std::isfinite(v); }

std::string nm(double meters) { return std::to_string(meters * 1e9) + " nm"; }

}  // namespace

void FilmGeometry::validate() const {
  if (!(thickness > 0.0) || !finite(thickness)) throw ConfigError("thickness must be > 0");
  if (!(ambient_index > 0.0) || !finite(ambient_index)) throw ConfigError("ambient_index must be > 0");
  if (!(substrate_index > 0.0) || !finite(substrate_index)) throw ConfigError("substrate_index must be > 0");
}

void FilmStack::validate() const {
  geometry.validate();
  if (!finite(film_index.real()) || !finite(film_index.imag()) || film_index.imag() < 0.0)
    throw ConfigError("film_index must be finite with a non-negative imaginary part");
}

void RTMeasurement::validate() const {
  if (!(wavelength > 0.0) || !finite(wavelength)) throw ConfigError("wavelength must be > 0");
  if (!(reflectance >= 0.0 && reflectance <= 1.0)) throw ConfigError("R must lie in [0, 1]");
  if (!(transmittance >= 0.0 && transmittance <= 1.0)) throw ConfigError("T must lie in [0, 1]");
  if (reflectance + transmittance > 1.0 + kNoiseAllowance)
    throw ConfigError("R + T exceeds 1 + " + std::to_string(kNoiseAllowance) + " at " + nm(wavelength));
}

namespace {

struct Interfaces {
  cplx r1, r2, t1t2;
};

Interfaces interfaces(cplx nt, double n0, double ns) {
  return {(n0 - nt) / (n0 + nt), (nt - ns) / (nt + ns), 4.0 * n0 * nt / ((n0 + nt) * (nt + ns))};
}

// Airy sum given the one-pass film propagator e^{i beta}.
RT airy(const Interfaces& f, cplx prop, double n0, double ns) {
  const cplx prop2 = prop * prop;
  const cplx inv = 1.0 / (1.0 + f.r1 * f.r2 * prop2);
  const cplx r = (f.r1 + f.r2 * prop2) * inv;
  const cplx t = f.t1t2 * prop * inv;
  return {std::norm(r), ns / n0 * std::norm(t)};
}

}  // namespace

RT rt_theoretical(const FilmStack& stack, double wavelength) {
  stack.validate();
  if (!(wavelength > 0.0) || !finite(wavelength)) throw ConfigError("wavelength must be > 0");
  const auto& g = stack.geometry;
  const cplx beta = 2.0 * units::pi * stack.film_index * g.thickness / wavelength;
  return airy(interfaces(stack.film_index, g.ambient_index, g.substrate_index), std::exp(cplx(0.0, 1.0) * beta),
              g.ambient_index, g.substrate_index);
}

double residual(double n, double kappa, const FilmGeometry& geometry, const RTMeasurement& meas) {
  FilmStack stack{geometry, cplx(n, kappa)};
  const RT rt = rt_theoretical(stack, meas.wavelength);
  return std::abs(rt.transmittance - meas.transmittance) + std::abs(rt.reflectance - meas.reflectance);
}

void NkGrid::validate() const {
  if (!(n_step > 0.0) || !finite(n_step)) throw ConfigError("grid.n_step must be > 0");
  if (!(kappa_step > 0.0) || !finite(kappa_step)) throw ConfigError("grid.kappa_step must be > 0");
  if (!(n_min > 0.0) || !(n_max > n_min) || !finite(n_max)) throw ConfigError("grid.n range must satisfy 0 < n_min < n_max");
  if (!(kappa_min >= 0.0) || !(kappa_max > kappa_min) || !finite(kappa_max))
    throw ConfigError("grid.kappa range must satisfy 0 <= kappa_min < kappa_max");
}

std::size_t NkGrid::n_count() const {
  return static_cast<std::size_t>(std::floor((n_max - n_min) / n_step + 1e-9)) + 1;
}

std::size_t NkGrid::kappa_count() const {
  return static_cast<std::size_t>(std::floor((kappa_max - kappa_min) / kappa_step + 1e-9)) + 1;
}

void ThicknessRange::validate() const {
  if (!(min > 0.0) || !(max < 1e-6) || !(max >= min)) throw ConfigError("thickness range must satisfy 0 < min <= max < 1 um");
  if (samples == 0) throw ConfigError("thickness.samples must be >= 1");
  if (samples == 1 && max != min) throw ConfigError("thickness.samples = 1 requires min = max");
}

std::vector<double> ThicknessRange::values() const {
  std::vector<double> t(samples);
  for (std::size_t i = 0; i < samples; ++i)
    t[i] = samples == 1 ? min : min + (max - min) * static_cast<double>(i) / static_cast<double>(samples - 1);
  return t;
}

namespace {

// Interface factors over the whole grid; they depend on the index only.
struct GridTables {
  std::size_t nn = 0, nk = 0;
  std::vector<double> n, kappa;
  std::vector<Interfaces> faces;  // index i * nk + j
};

GridTables tabulate(const NkGrid& grid, double n0, double ns) {
  GridTables g;
  g.nn = grid.n_count();
  g.nk = grid.kappa_count();
  for (std::size_t i = 0; i < g.nn; ++i) g.n.push_back(grid.n_min + grid.n_step * static_cast<double>(i));
  for (std::size_t j = 0; j < g.nk; ++j) g.kappa.push_back(grid.kappa_min + grid.kappa_step * static_cast<double>(j));
  g.faces.reserve(g.nn * g.nk);
  for (double n : g.n)
    for (double k : g.kappa) g.faces.push_back(interfaces(cplx(n, k), n0, ns));
  return g;
}

struct GridPoint {
  double value;
  std::size_t i, j;
};

std::vector<NkCandidate> minima_at(const GridTables& g, const NkGrid& grid, const FilmGeometry& geom,
                                   const RTMeasurement& meas, std::size_t keep) {
  const double n0 = geom.ambient_index, ns = geom.substrate_index;
  const double phase = 2.0 * units::pi * geom.thickness / meas.wavelength;
  // e^{i beta} separates into an n factor and a kappa factor.
  std::vector<cplx> pn(g.nn);
  std::vector<double> pk(g.nk);
  for (std::size_t i = 0; i < g.nn; ++i) pn[i] = std::exp(cplx(0.0, phase * g.n[i]));
  for (std::size_t j = 0; j < g.nk; ++j) pk[j] = std::exp(-phase * g.kappa[j]);

  std::vector<double> f(g.nn * g.nk);
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (std::size_t i = 0; i < g.nn; ++i) {
    for (std::size_t j = 0; j < g.nk; ++j) {
      const std::size_t idx = i * g.nk + j;
      const RT rt = airy(g.faces[idx], pn[i] * pk[j], n0, ns);
      const double v = std::abs(rt.transmittance - meas.transmittance) + std::abs(rt.reflectance - meas.reflectance);
      f[idx] = v;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  if (!(hi - lo > 1e-12))
    throw NoMinimumFound("residual is flat over the (n, kappa) grid at " + nm(meas.wavelength) + ", thickness " +
                         nm(geom.thickness));

  std::vector<GridPoint> local;
  for (std::size_t i = 0; i < g.nn; ++i) {
    for (std::size_t j = 0; j < g.nk; ++j) {
      const double v = f[i * g.nk + j];
      bool is_min = true;
      for (int di = -1; di <= 1 && is_min; ++di) {
        for (int dj = -1; dj <= 1; ++dj) {
          if (di == 0 && dj == 0) continue;
          const auto ii = static_cast<std::ptrdiff_t>(i) + di;
          const auto jj = static_cast<std::ptrdiff_t>(j) + dj;
          if (ii < 0 || jj < 0 || ii >= static_cast<std::ptrdiff_t>(g.nn) || jj >= static_cast<std::ptrdiff_t>(g.nk))
            continue;
          if (f[static_cast<std::size_t>(ii) * g.nk + static_cast<std::size_t>(jj)] < v) {
            is_min = false;
            break;
          }
        }
      }
      if (is_min) local.push_back({v, i, j});
    }
  }
  std::sort(local.begin(), local.end(), [](const GridPoint& a, const GridPoint& b) {
    return a.value < b.value || (a.value == b.value && (a.i < b.i || (a.i == b.i && a.j < b.j)));
  });

  const auto objective = [&](std::span<const double> x) { return residual(x[0], x[1], geom, meas); };
  const std::vector<double> steps = {grid.n_step, grid.kappa_step};
  const std::vector<double> lower = {grid.n_min, grid.kappa_min};
  const std::vector<double> upper = {grid.n_max, grid.kappa_max};
  numerics::NelderMeadOptions nm_opts;
  nm_opts.rel_tol = 1e-10;
  nm_opts.x_tol = 1e-10;
  nm_opts.max_evaluations = 800;

  std::vector<NkCandidate> out;
  const std::size_t attempts = std::min(local.size(), 12 * keep);
  for (std::size_t a = 0; a < attempts && out.size() < keep; ++a) {
    const std::vector<double> x0 = {g.n[local[a].i], g.kappa[local[a].j]};
    const auto res = numerics::nelder_mead(objective, x0, steps, lower, upper, nm_opts);
    const double value = std::min(res.value, local[a].value);
    const double n = res.value <= local[a].value ? res.x[0] : x0[0];
    const double k = res.value <= local[a].value ? res.x[1] : x0[1];
    const bool duplicate = std::any_of(out.begin(), out.end(), [&](const NkCandidate& c) {
      return std::abs(c.n - n) <= 2.0 * grid.n_step && std::abs(c.kappa - k) <= 2.0 * grid.kappa_step;
    });
    if (duplicate) continue;
    NkCandidate c;
    c.wavelength = meas.wavelength;
    c.n = n;
    c.kappa = k;
    c.residual = value;
    c.thickness_used = geom.thickness;
    c.kappa_extracted = k;
    c.thickness_reference = geom.thickness;
    out.push_back(c);
  }
  std::sort(out.begin(), out.end(), [](const NkCandidate& a, const NkCandidate& b) { return a.residual < b.residual; });
  for (std::size_t r = 0; r < out.size(); ++r) out[r].rank = r;
  return out;
}

}  // namespace

std::vector<NkCandidate> extract_nk(std::span<const RTMeasurement> measurements, const ExtractOptions& options) {
  if (measurements.empty()) throw ConfigError("measurements must not be empty");
  for (const auto& m : measurements) m.validate();
  options.grid.validate();
  options.thickness.validate();
  if (options.minima_kept == 0) throw ConfigError("minima_kept must be >= 1");
  FilmGeometry geom;
  geom.ambient_index = options.ambient_index;
  geom.substrate_index = options.substrate_index;
  geom.validate();

  const GridTables tables = tabulate(options.grid, options.ambient_index, options.substrate_index);
  std::vector<NkCandidate> out;
  for (const auto& m : measurements) {
    for (double t : options.thickness.values()) {
      geom.thickness = t;
      auto found = minima_at(tables, options.grid, geom, m, options.minima_kept);
      out.insert(out.end(), found.begin(), found.end());
    }
  }
  return out;
}

double thickness_rescale(double kappa, double t_used, double t_reference) {
  if (!(t_used > 0.0) || !(t_reference > 0.0)) throw ConfigError("thicknesses must be > 0");
  // Ratio first, so equal thicknesses give kappa back exactly.
  return kappa * (t_used / t_reference);
}

std::vector<NkCandidate> rescale_candidates(std::span<const NkCandidate> candidates, double t_reference) {
  std::vector<NkCandidate> out(candidates.begin(), candidates.end());
  for (auto& c : out) {
    c.kappa = thickness_rescale(c.kappa_extracted, c.thickness_used, t_reference);
    c.thickness_reference = t_reference;
  }
  return out;
}

namespace {

double distance(const NkCandidate& a, const NkCandidate& b) { return std::abs(a.n - b.n) + std::abs(a.kappa - b.kappa); }

// Minimum total-variation path through one state per wavelength (wavelengths
// without states are skipped). States are ordered by kappa, so strict
// comparisons settle ties on the lower kappa.
std::vector<std::size_t> min_variation_path(const std::vector<std::vector<NkCandidate*>>& states, double& tv) {
  std::vector<std::size_t> choice(states.size(), 0);
  std::vector<std::vector<double>> cost(states.size());
  std::vector<std::vector<std::size_t>> back(states.size());
  std::ptrdiff_t prev = -1;
  for (std::size_t k = 0; k < states.size(); ++k) {
    const auto& s = states[k];
    if (s.empty()) continue;
    cost[k].assign(s.size(), 0.0);
    back[k].assign(s.size(), 0);
    if (prev >= 0) {
      const auto& ps = states[static_cast<std::size_t>(prev)];
      const auto& pc = cost[static_cast<std::size_t>(prev)];
      for (std::size_t b = 0; b < s.size(); ++b) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t a = 0; a < ps.size(); ++a) {
          const double v = pc[a] + distance(*ps[a], *s[b]);
          if (v < best) {
            best = v;
            back[k][b] = a;
          }
        }
        cost[k][b] = best;
      }
    }
    prev = static_cast<std::ptrdiff_t>(k);
  }
  tv = 0.0;
  if (prev < 0) return choice;
  const auto last = static_cast<std::size_t>(prev);
  std::size_t b = 0;
  for (std::size_t i = 1; i < cost[last].size(); ++i)
    if (cost[last][i] < cost[last][b]) b = i;
  tv = cost[last][b];
  for (std::ptrdiff_t k = prev; k >= 0; --k) {
    const auto uk = static_cast<std::size_t>(k);
    if (states[uk].empty()) continue;
    choice[uk] = b;
    b = back[uk][b];
  }
  return choice;
}

// Single-link cluster of `states` containing `seed`.
std::vector<bool> cluster_of(const std::vector<NkCandidate*>& states, std::size_t seed, double tol) {
  std::vector<bool> in(states.size(), false);
  in[seed] = true;
  bool grew = true;
  while (grew) {
    grew = false;
    for (std::size_t a = 0; a < states.size(); ++a) {
      if (in[a]) continue;
      for (std::size_t b = 0; b < states.size(); ++b) {
        if (in[b] && distance(*states[a], *states[b]) <= tol) {
          in[a] = true;
          grew = true;
          break;
        }
      }
    }
  }
  return in;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 == 1 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

}  // namespace

BranchSelection select_physical_branch(std::span<const NkCandidate> candidates, const BranchOptions& options) {
  if (candidates.empty()) throw ConfigError("candidates must not be empty");
  if (!(options.cluster_tolerance >= 0.0)) throw ConfigError("cluster_tolerance must be >= 0");
  if (!(options.ambiguity_threshold >= 0.0)) throw ConfigError("ambiguity_threshold must be >= 0");

  BranchSelection sel;
  sel.candidates.assign(candidates.begin(), candidates.end());
  std::stable_sort(sel.candidates.begin(), sel.candidates.end(),
                   [](const NkCandidate& a, const NkCandidate& b) { return a.wavelength < b.wavelength; });

  // Group by wavelength.
  std::vector<std::pair<std::size_t, std::size_t>> groups;
  for (std::size_t i = 0; i < sel.candidates.size();) {
    std::size_t j = i;
    while (j < sel.candidates.size() && sel.candidates[j].wavelength == sel.candidates[i].wavelength) ++j;
    groups.emplace_back(i, j);
    i = j;
  }
  const std::size_t nw = groups.size();
  std::vector<std::vector<NkCandidate*>> states(nw);
  for (std::size_t k = 0; k < nw; ++k) {
    for (std::size_t i = groups[k].first; i < groups[k].second; ++i)
      if (sel.candidates[i].residual <= options.max_residual) states[k].push_back(&sel.candidates[i]);
    std::stable_sort(states[k].begin(), states[k].end(), [](const NkCandidate* a, const NkCandidate* b) {
      return a->kappa < b->kappa || (a->kappa == b->kappa && a->n < b->n);
    });
  }
  if (std::all_of(states.begin(), states.end(), [](const auto& s) { return s.empty(); }))
    throw NoMinimumFound("no candidate within the residual limit at any wavelength");

  const auto path = min_variation_path(states, sel.total_variation);

  std::vector<std::vector<bool>> physical(nw);
  std::vector<std::vector<NkCandidate*>> others(nw);
  bool any_alternative = false;
  for (std::size_t k = 0; k < nw; ++k) {
    if (states[k].empty()) continue;
    physical[k] = cluster_of(states[k], path[k], options.cluster_tolerance);
    for (std::size_t s = 0; s < states[k].size(); ++s)
      if (!physical[k][s]) others[k].push_back(states[k][s]);
    if (others[k].empty()) {
      others[k] = states[k];
    } else {
      any_alternative = true;
    }
  }
  sel.alternative_variation = sel.total_variation;
  if (any_alternative) {
    min_variation_path(others, sel.alternative_variation);
    const double margin = sel.alternative_variation - sel.total_variation;
    if (margin < options.ambiguity_threshold * sel.alternative_variation)
      throw BranchAmbiguous("best branch total variation " + std::to_string(sel.total_variation) +
                            " is within " + std::to_string(options.ambiguity_threshold * 100.0) +
                            "% of the alternative " + std::to_string(sel.alternative_variation));
  }

  for (auto& c : sel.candidates) c.branch = c.residual <= options.max_residual ? Branch::Spurious : Branch::Unresolved;
  sel.wavelengths.resize(nw);
  sel.n.assign(nw, 0.0);
  sel.kappa.assign(nw, 0.0);
  sel.residual.assign(nw, std::numeric_limits<double>::quiet_NaN());
  sel.interpolated.assign(nw, false);
  for (std::size_t k = 0; k < nw; ++k) {
    sel.wavelengths[k] = sel.candidates[groups[k].first].wavelength;
    if (states[k].empty()) {
      sel.interpolated[k] = true;
      for (std::size_t i = groups[k].first; i < groups[k].second; ++i)
        sel.residual[k] = std::isnan(sel.residual[k]) ? sel.candidates[i].residual
                                                      : std::min(sel.residual[k], sel.candidates[i].residual);
      continue;
    }
    std::vector<double> ns, ks;
    for (std::size_t s = 0; s < states[k].size(); ++s) {
      if (!physical[k][s]) continue;
      NkCandidate* c = states[k][s];
      c->branch = Branch::Physical;
      ns.push_back(c->n);
      ks.push_back(c->kappa);
    }
    sel.n[k] = median(ns);
    sel.kappa[k] = median(ks);
    sel.residual[k] = states[k][path[k]]->residual;
  }

  // Fill gaps linearly in wavelength; hold the nearest value past either end.
  std::vector<std::size_t> good;
  for (std::size_t k = 0; k < nw; ++k)
    if (!sel.interpolated[k]) good.push_back(k);
  for (std::size_t k = 0; k < nw; ++k) {
    if (!sel.interpolated[k]) continue;
    const auto hi = std::upper_bound(good.begin(), good.end(), k);
    if (hi == good.begin()) {
      sel.n[k] = sel.n[good.front()];
      sel.kappa[k] = sel.kappa[good.front()];
    } else if (hi == good.end()) {
      sel.n[k] = sel.n[good.back()];
      sel.kappa[k] = sel.kappa[good.back()];
    } else {
      const std::size_t a = *(hi - 1), b = *hi;
      const double w = (sel.wavelengths[k] - sel.wavelengths[a]) / (sel.wavelengths[b] - sel.wavelengths[a]);
      sel.n[k] = (1.0 - w) * sel.n[a] + w * sel.n[b];
      sel.kappa[k] = (1.0 - w) * sel.kappa[a] + w * sel.kappa[b];
    }
  }
  return sel;
}

std::vector<cplx> close_with_kk(std::span<const double> energies_ev, std::span<const double> kappa,
                                double n_asymptote) {
  if (energies_ev.size() != kappa.size()) throw ConfigError("energies and kappa must have equal length");
  const std::vector<double> n = numerics::kramers_kronig_real(energies_ev, kappa, n_asymptote);
  std::vector<cplx> out(n.size());
  for (std::size_t i = 0; i < n.size(); ++i) out[i] = cplx(n[i], kappa[i]);
  return out;
}

}  // namespace lsep::film
