#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include "lsep/errors.hpp"
#include "lsep/numerics/complex_matrix.hpp"
#include "lsep/numerics/kramers_kronig.hpp"
#include "lsep/numerics/nelder_mead.hpp"
#include "lsep/numerics/ode.hpp"

using namespace lsep;
using namespace lsep::numerics;

namespace {

ComplexMatrix random_matrix(std::mt19937_64& rng, std::size_t n, double diag_boost) {
  std::normal_distribution<double> g(0.0, 1.0);
  ComplexMatrix a(n, n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) a(r, c) = cplx(g(rng), g(rng));
  for (std::size_t r = 0; r < n; ++r) a(r, r) += diag_boost;
  return a;
}

CVector random_vector(std::mt19937_64& rng, std::size_t n) {
  std::normal_distribution<double> g(0.0, 1.0);
  CVector v(n);
  for (auto& x : v) x = cplx(g(rng), g(rng));
  return v;
}

CVector sub(const CVector& a, const CVector& b) {
  CVector d(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
  return d;
}

}  // namespace

TEST_CASE("solve_linear on identity and diagonal systems") {
  const CVector b = {cplx(1, 2), cplx(-3, 0.5), cplx(0, 0), cplx(7, -1)};
  const CVector x = solve_linear(ComplexMatrix::identity(4), b);
  for (std::size_t i = 0; i < 4; ++i) CHECK(std::abs(x[i] - b[i]) == doctest::Approx(0.0));

  const cplx i1(0, 1);
  const CVector d = {2.0, 2.0 * i1, -1.0, 1.0};
  const CVector y = solve_linear(ComplexMatrix::diagonal(d), d);
  for (const auto& v : y) CHECK(std::abs(v - 1.0) < 1e-15);
}

TEST_CASE("solve_linear recovers a chosen solution") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 1000; ++trial) {
    const ComplexMatrix a = random_matrix(rng, 4, 4.0);
    const CVector xs = random_vector(rng, 4);
    const CVector b = a * xs;
    const CVector x = solve_linear(a, b);
    CHECK(norm2(sub(x, xs)) <= 1e-10 * norm2(xs));
    CHECK(norm2(sub(a * x, b)) <= 1e-10 * norm2(b));
  }
}

TEST_CASE("solve_linear reports singular systems") {
  ComplexMatrix a = {{1.0, 2.0}, {2.0, 4.0}};
  const CVector b = {1.0, 1.0};
  CHECK_THROWS_AS(solve_linear(a, b), SingularMatrix);
}

TEST_CASE("eig of diagonal and symmetric coupling matrices") {
  const CVector d = {1.0, 2.0, 3.0, 4.0};
  const auto e = eig(ComplexMatrix::diagonal(d));
  std::vector<double> vals;
  for (const auto& v : e.values) vals.push_back(v.real());
  std::sort(vals.begin(), vals.end());
  for (int i = 0; i < 4; ++i) CHECK(vals[static_cast<std::size_t>(i)] == doctest::Approx(i + 1.0));
  for (std::size_t k = 0; k < 4; ++k) {
    const CVector v = e.vectors.column(k);
    int nonzero = 0;
    for (const auto& x : v) nonzero += std::abs(x) > 1e-12 ? 1 : 0;
    CHECK(nonzero == 1);
    CHECK(norm2(v) == doctest::Approx(1.0));
  }

  const double j = 0.37;
  const auto e2 = eig(ComplexMatrix{{0.0, j}, {j, 0.0}});
  const double lo = std::min(e2.values[0].real(), e2.values[1].real());
  const double hi = std::max(e2.values[0].real(), e2.values[1].real());
  CHECK(lo == doctest::Approx(-j));
  CHECK(hi == doctest::Approx(j));
}

TEST_CASE("eig residual and reconstruction on random matrices") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 500; ++trial) {
    const ComplexMatrix a = random_matrix(rng, 4, 0.0);
    const auto e = eig(a);
    const double an = a.norm();
    for (std::size_t k = 0; k < 4; ++k) {
      const CVector v = e.vectors.column(k);
      CVector av = a * v;
      for (std::size_t i = 0; i < 4; ++i) av[i] -= e.values[k] * v[i];
      CHECK(norm2(av) <= 1e-9 * an);
      CHECK(norm2(v) == doctest::Approx(1.0).epsilon(1e-12));
    }
    const ComplexMatrix rec = e.vectors * ComplexMatrix::diagonal(e.values) * inverse(e.vectors);
    CHECK((rec - a).norm() <= 1e-8 * an);
  }
}

TEST_CASE("eig flags a defective matrix") {
  ComplexMatrix j = {{1.0, 1.0}, {0.0, 1.0}};
  CHECK_THROWS_AS(eig(j), DefectiveMatrix);
}

TEST_CASE("integrate trivial problems") {
  const std::vector<double> y0 = {0.3, -1.2};
  const std::vector<double> ts = {0.0, 0.5, 1.0};
  for (auto method : {OdeMethod::fehlberg45(1e-12, 1e-10), OdeMethod::high_order(1e-12, 1e-10)}) {
    auto zero = [](double, std::span<const double>, std::span<double> dy) { std::fill(dy.begin(), dy.end(), 0.0); };
    const auto tr = integrate(zero, y0, 0.0, 1.0, method, ts);
    REQUIRE(tr.states.size() == 3);
    for (const auto& s : tr.states) {
      CHECK(s[0] == 0.3);
      CHECK(s[1] == -1.2);
    }

    auto decay = [](double, std::span<const double> y, std::span<double> dy) { dy[0] = -y[0]; };
    const std::vector<double> one = {1.0};
    const std::vector<double> end = {1.0};
    OdeMethod m = method;
    m.abs_tol = 1e-10;
    m.rel_tol = 1e-12;
    const auto td = integrate(decay, one, 0.0, 1.0, m, end);
    CHECK(std::abs(td.states.back()[0] - std::exp(-1.0)) <= m.abs_tol);
    CHECK(td.times.back() == 1.0);
  }
}

namespace {

// Undamped resonant two-level amplitudes, (Re c0, Im c0, Re c1, Im c1),
// with c0' = -i W/2 c1 and c1' = -i W/2 c0. Population of |1> is sin^2(W t / 2).
constexpr double kRabi = 2.0;

void rabi_rhs(double, std::span<const double> y, std::span<double> dy) {
  const double h = 0.5 * kRabi;
  dy[0] = h * y[3];
  dy[1] = -h * y[2];
  dy[2] = h * y[1];
  dy[3] = -h * y[0];
}

double rabi_error(const OdeMethod& m, std::size_t* accepted) {
  std::vector<double> ts;
  for (int i = 1; i <= 4; ++i) ts.push_back(5.0 * i);
  const std::vector<double> y0 = {1.0, 0.0, 0.0, 0.0};
  const auto tr = integrate(rabi_rhs, y0, 0.0, 20.0, m, ts);
  double err = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const auto& s = tr.states[i];
    const double p1 = s[2] * s[2] + s[3] * s[3];
    const double exact = std::pow(std::sin(0.5 * kRabi * ts[i]), 2);
    err = std::max(err, std::abs(p1 - exact));
  }
  if (accepted) *accepted = tr.step_stats.accepted;
  return err;
}

}  // namespace

TEST_CASE("integrate reproduces resonant Rabi flopping") {
  CHECK(rabi_error(OdeMethod::fehlberg45(1e-10, 1e-10), nullptr) <= 1e-6);
  CHECK(rabi_error(OdeMethod::high_order(1e-10, 1e-10), nullptr) <= 1e-6);
}

TEST_CASE("tightening tolerances lowers the Rabi error") {
  for (auto name : {OdeMethodName::FehlbergRK45, OdeMethodName::HighOrderEmbedded}) {
    double prev = 1e300;
    for (double tol = 1e-5; tol >= 1e-11; tol *= 0.5) {
      OdeMethod m;
      m.name = name;
      m.abs_tol = tol;
      m.rel_tol = tol;
      const double e = rabi_error(m, nullptr);
      CHECK(e <= prev);
      prev = e;
    }
  }
}

TEST_CASE("the high-order pair needs fewer steps for the same accuracy") {
  std::size_t n45 = 0;
  std::size_t n853 = 0;
  const double e45 = rabi_error(OdeMethod::fehlberg45(1e-11, 1e-11), &n45);
  const double e853 = rabi_error(OdeMethod::high_order(1e-11, 1e-11), &n853);
  CHECK(e853 <= std::max(e45, 1e-9));
  CHECK(n853 < n45);
  CHECK(OdeMethod::high_order(1, 1).order_main() > OdeMethod::high_order(1, 1).order_embedded());
  CHECK(OdeMethod::fehlberg45(1, 1).order_main() > OdeMethod::fehlberg45(1, 1).order_embedded());
}

TEST_CASE("integrate aborts when the step collapses") {
  // y' = y^2 from y = 1 blows up at t = 1.
  auto blow = [](double, std::span<const double> y, std::span<double> dy) { dy[0] = y[0] * y[0]; };
  const std::vector<double> y0 = {1.0};
  const std::vector<double> ts = {2.0};
  CHECK_THROWS_AS(integrate(blow, y0, 0.0, 2.0, OdeMethod::high_order(1e-10, 1e-10), ts), NumericalError);

  OdeMethod few = OdeMethod::fehlberg45(1e-12, 1e-12);
  few.max_steps = 5;
  auto decay = [](double, std::span<const double> y, std::span<double> dy) { dy[0] = -y[0]; };
  const std::vector<double> one = {1.0};
  const std::vector<double> end = {50.0};
  CHECK_THROWS_AS(integrate(decay, one, 0.0, 50.0, few, end), MaxStepsExceeded);
}

namespace {

std::vector<double> linspace(double a, double b, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
  return v;
}

std::complex<double> lorentz_index(double w) {
  const double em = 1.52 * 1.52, f0 = 0.3, w0 = 2.11, g0 = 0.0461;
  const std::complex<double> eps = em + f0 * w0 * w0 / std::complex<double>(w0 * w0 - w * w, -w * g0);
  return std::sqrt(eps);
}

}  // namespace

TEST_CASE("kramers_kronig_real basics") {
  const auto w = linspace(1.5, 2.8, 64);
  const std::vector<double> zero(w.size(), 0.0);
  for (double v : kramers_kronig_real(w, zero, 1.7)) CHECK(v == 1.7);

  const std::vector<double> few(10, 0.0);
  const auto wf = linspace(1.0, 2.0, 10);
  CHECK_THROWS_AS(kramers_kronig_real(wf, few, 1.0), GridTooCoarse);
}

TEST_CASE("kramers_kronig_real recovers the Lorentz refractive index") {
  const auto w = linspace(1.5, 2.8, 1301);
  std::vector<double> k(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) k[i] = lorentz_index(w[i]).imag();
  const auto n = kramers_kronig_real(w, k, 1.52);
  // Band centre is the resonance.
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (std::abs(w[i] - 2.11) < 0.05) {
      const double exact = lorentz_index(w[i]).real();
      CHECK(std::abs(n[i] - exact) <= 0.02 * exact);
    }
  }
}

TEST_CASE("kramers_kronig_real on a narrow line is dispersive") {
  const auto w = linspace(1.0, 3.0, 801);
  std::vector<double> k(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) k[i] = 0.01 * 0.005 / (std::pow(w[i] - 2.0, 2) + 0.005 * 0.005);
  const auto n = kramers_kronig_real(w, k, 1.5);
  std::size_t below = 0, above = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (std::abs(w[i] - 1.97) < 1e-9) below = i;
    if (std::abs(w[i] - 2.03) < 1e-9) above = i;
  }
  CHECK(n[below] > 1.5);
  CHECK(n[above] < 1.5);
}

TEST_CASE("kramers_kronig_real is linear and handles uneven grids") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto w = linspace(1.0, 3.0, 101);
  std::vector<double> a(w.size()), b(w.size()), c(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    a[i] = u(rng);
    b[i] = u(rng);
    c[i] = 2.5 * a[i] - 0.7 * b[i];
  }
  const auto na = kramers_kronig_real(w, a, 0.0);
  const auto nb = kramers_kronig_real(w, b, 0.0);
  const auto nc = kramers_kronig_real(w, c, 0.0);
  for (std::size_t i = 0; i < w.size(); ++i) CHECK(std::abs(nc[i] - (2.5 * na[i] - 0.7 * nb[i])) < 1e-12);

  std::vector<double> wu;
  for (std::size_t i = 0; i < 400; ++i) {
    const double s = static_cast<double>(i) / 399.0;
    wu.push_back(1.5 + 1.3 * s * s);
  }
  std::vector<double> ku(wu.size());
  for (std::size_t i = 0; i < wu.size(); ++i) ku[i] = lorentz_index(wu[i]).imag();
  const auto nu = kramers_kronig_real(wu, ku, 1.52);
  for (std::size_t i = 0; i < wu.size(); ++i) {
    if (std::abs(wu[i] - 2.11) < 0.01) CHECK(std::abs(nu[i] - lorentz_index(wu[i]).real()) < 0.03 * 1.52);
  }
}

TEST_CASE("nelder_mead minimises a bounded quadratic") {
  auto f = [](std::span<const double> x) { return std::pow(x[0] - 1.5, 2) + 10.0 * std::pow(x[1] + 0.25, 2); };
  const std::vector<double> x0 = {0.0, 0.0};
  const std::vector<double> st = {0.5, 0.5};
  const auto r = nelder_mead(f, x0, st, {}, {});
  CHECK(r.converged);
  CHECK(r.x[0] == doctest::Approx(1.5).epsilon(1e-6));
  CHECK(r.x[1] == doctest::Approx(-0.25).epsilon(1e-6));

  const std::vector<double> lo = {0.0, 0.0};
  const std::vector<double> hi = {1.0, 1.0};
  const auto rb = nelder_mead(f, x0, st, lo, hi);
  CHECK(rb.x[0] == doctest::Approx(1.0));
  CHECK(rb.x[1] == doctest::Approx(0.0));
}
