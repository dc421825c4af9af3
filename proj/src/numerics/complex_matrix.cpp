#include "lsep/numerics/complex_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "lsep/errors.hpp"

namespace lsep::numerics {

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, cplx{0.0, 0.0}) {}

ComplexMatrix::ComplexMatrix(std::size_t rows, std::size_t cols, std::vector<cplx> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
  if (data_.size() != rows_ * cols_) {
    throw std::invalid_argument("ComplexMatrix: entry count does not match rows*cols");
  }
}

ComplexMatrix::ComplexMatrix(std::initializer_list<std::initializer_list<cplx>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw std::invalid_argument("ComplexMatrix: ragged initializer");
    data_.insert(data_.end(), r.begin(), r.end());
  }
}

ComplexMatrix ComplexMatrix::identity(std::size_t n) {
  ComplexMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::diagonal(std::span<const cplx> d) {
  ComplexMatrix m(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
  return m;
}

CVector ComplexMatrix::column(std::size_t c) const {
  CVector v(rows_);
  for (std::size_t r = 0; r < rows_; ++r) v[r] = (*this)(r, c);
  return v;
}

CVector ComplexMatrix::operator*(std::span<const cplx> x) const {
  if (x.size() != cols_) throw std::invalid_argument("ComplexMatrix: vector length mismatch");
  CVector y(rows_, cplx{});
  for (std::size_t r = 0; r < rows_; ++r) {
    cplx acc{};
    for (std::size_t c = 0; c < cols_; ++c) acc += (*this)(r, c) * x[c];
    y[r] = acc;
  }
  return y;
}

ComplexMatrix ComplexMatrix::operator*(const ComplexMatrix& other) const {
  if (cols_ != other.rows_) throw std::invalid_argument("ComplexMatrix: shape mismatch");
  ComplexMatrix out(rows_, other.cols_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t k = 0; k < cols_; ++k) {
      const cplx a = (*this)(r, k);
      for (std::size_t c = 0; c < other.cols_; ++c) out(r, c) += a * other(k, c);
    }
  return out;
}

ComplexMatrix ComplexMatrix::operator-(const ComplexMatrix& other) const {
  if (rows_ != other.rows_ || cols_ != other.cols_)
    throw std::invalid_argument("ComplexMatrix: shape mismatch");
  ComplexMatrix out(rows_, cols_);
  for (std::size_t i = 0; i < data_.size(); ++i) out.data_[i] = data_[i] - other.data_[i];
  return out;
}

ComplexMatrix ComplexMatrix::adjoint() const {
  ComplexMatrix out(cols_, rows_);
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) out(c, r) = std::conj((*this)(r, c));
  return out;
}

double ComplexMatrix::norm() const { return norm2(data_); }

bool ComplexMatrix::finite() const {
  return std::all_of(data_.begin(), data_.end(),
                     [](cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); });
}

double norm2(std::span<const cplx> v) {
  double s = 0.0;
  for (const cplx& z : v) s += std::norm(z);
  return std::sqrt(s);
}

CVector solve_linear(const ComplexMatrix& a, std::span<const cplx> b, double pivot_tol) {
  if (!a.square()) throw std::invalid_argument("solve_linear: matrix is not square");
  const std::size_t n = a.rows();
  if (b.size() != n) throw std::invalid_argument("solve_linear: rhs length mismatch");

  ComplexMatrix lu = a;
  CVector x(b.begin(), b.end());
  double scale = 0.0;
  for (cplx z : a.entries()) scale = std::max(scale, std::abs(z));
  if (scale == 0.0) throw SingularMatrix("solve_linear: zero matrix");
  const double threshold = pivot_tol * scale;

  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    double best = std::abs(lu(k, k));
    for (std::size_t r = k + 1; r < n; ++r) {
      if (std::abs(lu(r, k)) > best) {
        best = std::abs(lu(r, k));
        piv = r;
      }
    }
    if (best <= threshold) {
      throw SingularMatrix("solve_linear: pivot " + std::to_string(best) + " below threshold at column " +
                           std::to_string(k));
    }
    if (piv != k) {
      for (std::size_t c = 0; c < n; ++c) std::swap(lu(k, c), lu(piv, c));
      std::swap(x[k], x[piv]);
    }
    for (std::size_t r = k + 1; r < n; ++r) {
      const cplx f = lu(r, k) / lu(k, k);
      if (f == cplx{}) continue;
      for (std::size_t c = k; c < n; ++c) lu(r, c) -= f * lu(k, c);
      x[r] -= f * x[k];
    }
  }
  for (std::size_t k = n; k-- > 0;) {
    cplx acc = x[k];
    for (std::size_t c = k + 1; c < n; ++c) acc -= lu(k, c) * x[c];
    x[k] = acc / lu(k, k);
  }
  return x;
}

ComplexMatrix inverse(const ComplexMatrix& a) {
  const std::size_t n = a.rows();
  ComplexMatrix inv(n, n);
  for (std::size_t c = 0; c < n; ++c) {
    CVector e(n, cplx{});
    e[c] = 1.0;
    const CVector col = solve_linear(a, e);
    for (std::size_t r = 0; r < n; ++r) inv(r, c) = col[r];
  }
  return inv;
}

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Rotation [c s; -conj(s) c] (c real) that maps (f, g) onto (r, 0).
struct Givens {
  double c;
  cplx s;
};

Givens make_givens(cplx f, cplx g) {
  const double af = std::abs(f);
  const double ag = std::abs(g);
  if (ag == 0.0) return {1.0, cplx{}};
  if (af == 0.0) return {0.0, std::conj(g) / ag};
  const double nrm = std::hypot(af, ag);
  const cplx phase = f / af;
  return {af / nrm, phase * std::conj(g) / nrm};
}

// Rows (i, j) <- G * rows, restricted to columns [c0, c1).
void rotate_rows(ComplexMatrix& m, std::size_t i, std::size_t j, const Givens& g, std::size_t c0,
                 std::size_t c1) {
  for (std::size_t c = c0; c < c1; ++c) {
    const cplx x = m(i, c);
    const cplx y = m(j, c);
    m(i, c) = g.c * x + g.s * y;
    m(j, c) = -std::conj(g.s) * x + g.c * y;
  }
}

// Columns (i, j) <- columns * G^H, restricted to rows [r0, r1).
void rotate_cols(ComplexMatrix& m, std::size_t i, std::size_t j, const Givens& g, std::size_t r0,
                 std::size_t r1) {
  for (std::size_t r = r0; r < r1; ++r) {
    const cplx x = m(r, i);
    const cplx y = m(r, j);
    m(r, i) = g.c * x + std::conj(g.s) * y;
    m(r, j) = -g.s * x + g.c * y;
  }
}

void hessenberg(ComplexMatrix& h, ComplexMatrix& q) {
  const std::size_t n = h.rows();
  for (std::size_t k = 0; k + 2 < n; ++k) {
    CVector v(n - k - 1);
    for (std::size_t i = k + 1; i < n; ++i) v[i - k - 1] = h(i, k);
    const double alpha_abs = norm2(v);
    if (alpha_abs == 0.0) continue;
    const cplx phase = std::abs(v[0]) == 0.0 ? cplx{1.0, 0.0} : v[0] / std::abs(v[0]);
    v[0] += phase * alpha_abs;
    const double vn = norm2(v);
    if (vn == 0.0) continue;
    for (cplx& z : v) z /= vn;
    // H <- P H P with P = I - 2 v v^H acting on indices k+1..n-1.
    for (std::size_t c = 0; c < n; ++c) {
      cplx dot{};
      for (std::size_t i = 0; i < v.size(); ++i) dot += std::conj(v[i]) * h(k + 1 + i, c);
      for (std::size_t i = 0; i < v.size(); ++i) h(k + 1 + i, c) -= 2.0 * v[i] * dot;
    }
    for (std::size_t r = 0; r < n; ++r) {
      cplx dot{};
      for (std::size_t i = 0; i < v.size(); ++i) dot += h(r, k + 1 + i) * v[i];
      for (std::size_t i = 0; i < v.size(); ++i) h(r, k + 1 + i) -= 2.0 * dot * std::conj(v[i]);
    }
    for (std::size_t r = 0; r < n; ++r) {
      cplx dot{};
      for (std::size_t i = 0; i < v.size(); ++i) dot += q(r, k + 1 + i) * v[i];
      for (std::size_t i = 0; i < v.size(); ++i) q(r, k + 1 + i) -= 2.0 * dot * std::conj(v[i]);
    }
    for (std::size_t i = k + 2; i < n; ++i) h(i, k) = cplx{};
  }
}

cplx wilkinson_shift(const ComplexMatrix& h, std::size_t hi) {
  const cplx a = h(hi - 1, hi - 1);
  const cplx b = h(hi - 1, hi);
  const cplx c = h(hi, hi - 1);
  const cplx d = h(hi, hi);
  const cplx tr_half = 0.5 * (a + d);
  const cplx disc = std::sqrt(0.25 * (a - d) * (a - d) + b * c);
  const cplx l1 = tr_half + disc;
  const cplx l2 = tr_half - disc;
  return std::abs(l1 - d) < std::abs(l2 - d) ? l1 : l2;
}

}  // namespace

EigenDecomposition eig(const ComplexMatrix& a) {
  if (!a.square()) throw std::invalid_argument("eig: matrix is not square");
  if (!a.finite()) throw std::invalid_argument("eig: non-finite entries");
  const std::size_t n = a.rows();
  EigenDecomposition out;
  if (n == 0) return out;

  ComplexMatrix t = a;
  ComplexMatrix z = ComplexMatrix::identity(n);
  hessenberg(t, z);

  const double anorm = std::max(a.norm(), std::numeric_limits<double>::min());
  const int max_iter = 100 * static_cast<int>(n);
  int iter_total = 0;
  std::size_t hi = n - 1;
  int iter_since_deflation = 0;
  while (hi > 0) {
    // Deflate negligible subdiagonal entries.
    std::size_t lo = hi;
    while (lo > 0) {
      const double off = std::abs(t(lo, lo - 1));
      const double diag = std::abs(t(lo, lo)) + std::abs(t(lo - 1, lo - 1));
      if (off <= kEps * (diag > 0.0 ? diag : anorm)) {
        t(lo, lo - 1) = cplx{};
        break;
      }
      --lo;
    }
    if (lo == hi) {
      --hi;
      iter_since_deflation = 0;
      continue;
    }
    if (++iter_total > max_iter) throw NotConverged("eig: QR iteration did not converge");
    ++iter_since_deflation;

    cplx mu = wilkinson_shift(t, hi);
    if (iter_since_deflation % 11 == 10) {
      // Exceptional shift to break cycles.
      mu = t(hi, hi) + 0.75 * std::abs(t(hi, hi - 1));
    }

    std::vector<Givens> rots;
    rots.reserve(hi - lo);
    for (std::size_t k = lo; k <= hi; ++k) t(k, k) -= mu;
    for (std::size_t k = lo; k < hi; ++k) {
      const Givens g = make_givens(t(k, k), t(k + 1, k));
      rotate_rows(t, k, k + 1, g, k, n);
      t(k + 1, k) = cplx{};
      rots.push_back(g);
    }
    for (std::size_t k = lo; k < hi; ++k) {
      const Givens& g = rots[k - lo];
      rotate_cols(t, k, k + 1, g, 0, std::min(hi + 1, k + 3));
      rotate_cols(z, k, k + 1, g, 0, n);
    }
    for (std::size_t k = lo; k <= hi; ++k) t(k, k) += mu;
  }

  // Eigenvectors of the triangular factor, back-transformed through z.
  const double smin = std::max(kEps * anorm, std::numeric_limits<double>::min());
  out.values.resize(n);
  out.vectors = ComplexMatrix(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    out.values[k] = t(k, k);
    CVector x(n, cplx{});
    x[k] = 1.0;
    for (std::size_t i = k; i-- > 0;) {
      cplx acc{};
      for (std::size_t j = i + 1; j <= k; ++j) acc += t(i, j) * x[j];
      cplx denom = t(i, i) - t(k, k);
      if (std::abs(denom) < smin) denom = smin;
      x[i] = -acc / denom;
    }
    CVector v = z * x;
    const double vn = norm2(v);
    for (std::size_t r = 0; r < n; ++r) out.vectors(r, k) = v[r] / vn;
  }

  try {
    (void)solve_linear(out.vectors, out.vectors.column(0), 1e-10);
  } catch (const SingularMatrix&) {
    throw DefectiveMatrix("eig: eigenvector basis is rank-deficient");
  }
  return out;
}

ComplexMatrix expm(const ComplexMatrix& a) {
  if (!a.square()) throw std::invalid_argument("expm: matrix must be square");
  const std::size_t n = a.rows();
  double inf_norm = 0.0;
  for (std::size_t r = 0; r < n; ++r) {
    double row = 0.0;
    for (std::size_t c = 0; c < n; ++c) row += std::abs(a(r, c));
    inf_norm = std::max(inf_norm, row);
  }
  int squarings = 0;
  if (inf_norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(inf_norm / 0.5)));
  const double scale = std::ldexp(1.0, -squarings);
  ComplexMatrix x(n, n);
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c) x(r, c) = a(r, c) * scale;

  // Taylor series; with norm <= 1/2, 20 terms are well below roundoff.
  ComplexMatrix result = ComplexMatrix::identity(n);
  ComplexMatrix term = ComplexMatrix::identity(n);
  for (int k = 1; k <= 20; ++k) {
    term = term * x;
    const double inv_k = 1.0 / static_cast<double>(k);
    for (std::size_t r = 0; r < n; ++r)
      for (std::size_t c = 0; c < n; ++c) {
        term(r, c) *= inv_k;
        result(r, c) += term(r, c);
      }
  }
  for (int s = 0; s < squarings; ++s) result = result * result;
  return result;
}

}  // namespace lsep::numerics
