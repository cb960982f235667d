#pragma once

// Dense reference implementations, written from the operator definitions and kept
// independent of the library code paths they check.

#include <cmath>
#include <cstddef>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace oracle {

struct Mat {
  std::size_t rows = 0, cols = 0;
  std::vector<double> a;

  Mat() = default;
  Mat(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, 0.0) {}
  double& operator()(std::size_t i, std::size_t j) { return a[i * cols + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a[i * cols + j]; }

  std::vector<double> operator*(const std::vector<double>& x) const {
    if (x.size() != cols) throw std::invalid_argument("Mat * vector: size mismatch");
    std::vector<double> y(rows, 0.0);
    for (std::size_t i = 0; i < rows; ++i) {
      double s = 0.0;
      for (std::size_t j = 0; j < cols; ++j) s += (*this)(i, j) * x[j];
      y[i] = s;
    }
    return y;
  }
};

inline Mat operator*(const Mat& A, const Mat& B) {
  if (A.cols != B.rows) throw std::invalid_argument("Mat * Mat: size mismatch");
  Mat C(A.rows, B.cols);
  for (std::size_t i = 0; i < A.rows; ++i)
    for (std::size_t k = 0; k < A.cols; ++k) {
      const double v = A(i, k);
      if (v == 0.0) continue;
      for (std::size_t j = 0; j < B.cols; ++j) C(i, j) += v * B(k, j);
    }
  return C;
}

inline Mat transpose(const Mat& A) {
  Mat T(A.cols, A.rows);
  for (std::size_t i = 0; i < A.rows; ++i)
    for (std::size_t j = 0; j < A.cols; ++j) T(j, i) = A(i, j);
  return T;
}

inline Mat kron(const Mat& A, const Mat& B) {
  Mat K(A.rows * B.rows, A.cols * B.cols);
  for (std::size_t i = 0; i < A.rows; ++i)
    for (std::size_t j = 0; j < A.cols; ++j)
      for (std::size_t k = 0; k < B.rows; ++k)
        for (std::size_t l = 0; l < B.cols; ++l) K(i * B.rows + k, j * B.cols + l) = A(i, j) * B(k, l);
  return K;
}

inline Mat identity(std::size_t n) {
  Mat I(n, n);
  for (std::size_t i = 0; i < n; ++i) I(i, i) = 1.0;
  return I;
}

inline Mat vstack(const std::vector<Mat>& parts) {
  std::size_t r = 0;
  for (const Mat& p : parts) r += p.rows;
  Mat out(r, parts.front().cols);
  std::size_t off = 0;
  for (const Mat& p : parts) {
    for (std::size_t i = 0; i < p.rows; ++i)
      for (std::size_t j = 0; j < p.cols; ++j) out(off + i, j) = p(i, j);
    off += p.rows;
  }
  return out;
}

inline double max_abs_diff(const Mat& A, const Mat& B) {
  if (A.rows != B.rows || A.cols != B.cols) return INFINITY;
  double m = 0.0;
  for (std::size_t i = 0; i < A.a.size(); ++i) m = std::max(m, std::abs(A.a[i] - B.a[i]));
  return m;
}

/// Assembles the matrix of a linear map by feeding it every canonical basis vector.
inline Mat assemble(std::size_t in, std::size_t out,
                    const std::function<std::vector<double>(const std::vector<double>&)>& f) {
  Mat M(out, in);
  std::vector<double> e(in, 0.0);
  for (std::size_t j = 0; j < in; ++j) {
    e[j] = 1.0;
    const std::vector<double> col = f(e);
    if (col.size() != out) throw std::invalid_argument("assemble: wrong output size");
    for (std::size_t i = 0; i < out; ++i) M(i, j) = col[i];
    e[j] = 0.0;
  }
  return M;
}

// ---------------------------------------------------------------- Lanczos

inline double lanczos3(double t) {
  if (std::abs(t) < 1e-300) return 1.0;
  if (std::abs(t) >= 3.0) return 0.0;
  const double pt = std::numbers::pi * t;
  return (std::sin(pt) / pt) * (std::sin(pt / 3.0) / (pt / 3.0));
}

inline long long reflect(long long m, long long n) {
  while (m < 0 || m >= n) m = m < 0 ? -m - 1 : 2 * n - 1 - m;
  return m;
}

/// (f n) x n normalized Lanczos-3 interpolation matrix; output k sits at (k + 0.5)/f - 0.5.
inline Mat lanczos_up(std::size_t n, int f) {
  Mat U(n * static_cast<std::size_t>(f), n);
  for (std::size_t k = 0; k < U.rows; ++k) {
    const double t = (static_cast<double>(k) + 0.5) / f - 0.5;
    double total = 0.0;
    std::vector<double> row(n, 0.0);
    for (long long m = -12; m < static_cast<long long>(n) + 12; ++m) {
      const double d = t - static_cast<double>(m);
      if (std::abs(d) >= 3.0) continue;
      // integer offsets other than zero are exact zeros of the kernel
      const double w = (d == std::round(d)) ? (d == 0.0 ? 1.0 : 0.0) : lanczos3(d);
      row[static_cast<std::size_t>(reflect(m, static_cast<long long>(n)))] += w;
      total += w;
    }
    for (std::size_t i = 0; i < n; ++i) U(k, i) = row[i] / total;
  }
  return U;
}

/// Row-normalized transpose: the per-axis resize back to the coarse grid.
inline Mat row_normalized_transpose(const Mat& U) {
  Mat D = transpose(U);
  for (std::size_t i = 0; i < D.rows; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < D.cols; ++j) s += D(i, j);
    for (std::size_t j = 0; j < D.cols; ++j) D(i, j) /= s;
  }
  return D;
}

/// Phi as an M x N matrix: FPA pixel (i, j) reads band band_of(i, j) of Up x.
inline Mat sensing(const std::function<std::size_t(std::size_t, std::size_t)>& band_of, std::size_t n_rows,
                   std::size_t n_cols, std::size_t bands, int f) {
  const Mat Ur = lanczos_up(n_rows, f), Uc = lanczos_up(n_cols, f);
  const std::size_t m_rows = Ur.rows, m_cols = Uc.rows;
  Mat P(m_rows * m_cols, n_rows * n_cols * bands);
  for (std::size_t i = 0; i < m_rows; ++i)
    for (std::size_t j = 0; j < m_cols; ++j) {
      const std::size_t b = band_of(i, j);
      for (std::size_t k = 0; k < n_rows; ++k)
        for (std::size_t l = 0; l < n_cols; ++l)
          P(i * m_cols + j, (b * n_rows + k) * n_cols + l) = Ur(i, k) * Uc(j, l);
    }
  return P;
}

// ---------------------------------------------------------------- DCT / wavelets

/// Orthonormal DCT-II: C[k][n] = s_k cos(pi (2n + 1) k / (2N)).
inline Mat dct(std::size_t n) {
  Mat C(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    const double s = k == 0 ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n);
    for (std::size_t i = 0; i < n; ++i) {
      C(k, i) = s * std::cos(std::numbers::pi * (2.0 * i + 1.0) * k / (2.0 * n));
    }
  }
  return C;
}

/// Periodic a trous filtering: out[a] = scale * sum_k t_k in[(a + d (k - origin)) mod n].
inline Mat circulant(std::size_t n, const std::vector<double>& taps, int origin, std::size_t dilation,
                     double scale) {
  Mat H(n, n);
  const long long N = static_cast<long long>(n);
  for (long long a = 0; a < N; ++a)
    for (std::size_t k = 0; k < taps.size(); ++k) {
      long long idx = (a + static_cast<long long>(dilation) * (static_cast<long long>(k) - origin)) % N;
      if (idx < 0) idx += N;
      H(static_cast<std::size_t>(a), static_cast<std::size_t>(idx)) += scale * taps[k];
    }
  return H;
}

/// Undecimated 2-D wavelet analysis of one band as a (1 + 3 levels) r c x r c matrix.
/// Subbands: scaling (optionally DCT'd), then per level (lo rows, hi cols), (hi rows, lo cols), (hi, hi).
inline Mat udwt(std::size_t r, std::size_t c, const std::vector<double>& lo, const std::vector<double>& hi,
                int origin, int levels, bool dct_scaling) {
  const double s = 1.0 / std::sqrt(2.0);
  Mat approx = identity(r * c);
  std::vector<Mat> details;
  for (int lev = 1; lev <= levels; ++lev) {
    const std::size_t d = std::size_t{1} << (lev - 1);
    const Mat Lr = circulant(r, lo, origin, d, s), Hr = circulant(r, hi, origin, d, s);
    const Mat Lc = circulant(c, lo, origin, d, s), Hc = circulant(c, hi, origin, d, s);
    details.push_back(kron(Lr, Hc) * approx);
    details.push_back(kron(Hr, Lc) * approx);
    details.push_back(kron(Hr, Hc) * approx);
    approx = kron(Lr, Lc) * approx;
  }
  if (dct_scaling) approx = kron(dct(r), dct(c)) * approx;
  std::vector<Mat> all{approx};
  for (auto& m : details) all.push_back(std::move(m));
  return vstack(all);
}

/// Full analysis operator: spectral DCT (slowest index) tensor the per-band spatial frame.
inline Mat dictionary(std::size_t r, std::size_t c, std::size_t bands, const std::vector<double>& lo,
                      const std::vector<double>& hi, int origin, int levels = 3) {
  return kron(dct(bands), udwt(r, c, lo, hi, origin, levels, true));
}

/// Moore-Penrose pseudo-inverse of a full-column-rank matrix, (A^T A)^{-1} A^T, via
/// Gauss-Jordan elimination with partial pivoting.
inline Mat pinv(const Mat& A) {
  const Mat At = transpose(A);
  Mat G = At * A;
  Mat R = At;
  const std::size_t n = G.rows;
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t i = col + 1; i < n; ++i)
      if (std::abs(G(i, col)) > std::abs(G(piv, col))) piv = i;
    if (std::abs(G(piv, col)) < 1e-14) throw std::runtime_error("pinv: rank deficient");
    if (piv != col) {
      for (std::size_t j = 0; j < n; ++j) std::swap(G(col, j), G(piv, j));
      for (std::size_t j = 0; j < R.cols; ++j) std::swap(R(col, j), R(piv, j));
    }
    const double inv = 1.0 / G(col, col);
    for (std::size_t j = 0; j < n; ++j) G(col, j) *= inv;
    for (std::size_t j = 0; j < R.cols; ++j) R(col, j) *= inv;
    for (std::size_t i = 0; i < n; ++i) {
      if (i == col || G(i, col) == 0.0) continue;
      const double f = G(i, col);
      for (std::size_t j = 0; j < n; ++j) G(i, j) -= f * G(col, j);
      for (std::size_t j = 0; j < R.cols; ++j) R(i, j) -= f * R(col, j);
    }
  }
  return R;
}

// ---------------------------------------------------------------- statistics

struct Counts {
  std::size_t above_2_5 = 0, above_1 = 0;
};

/// Counts entries whose log-magnitude exceeds mean + 2.5 sd and mean + sd (population sd),
/// over the entries that are nonzero relative to the largest one.
inline Counts log_counts(const std::vector<double>& v, double rel_zero = 1e-12) {
  double mx = 0.0;
  for (double x : v) mx = std::max(mx, std::abs(x));
  std::vector<double> l;
  for (double x : v)
    if (std::abs(x) > rel_zero * mx) l.push_back(std::log(std::abs(x)));
  long double mean = 0.0L;
  for (double x : l) mean += x;
  mean /= l.size();
  long double var = 0.0L;
  for (double x : l) var += (x - mean) * (x - mean);
  const double sd = std::sqrt(static_cast<double>(var / l.size()));
  Counts c;
  for (double x : l) {
    if (x > static_cast<double>(mean) + 2.5 * sd) ++c.above_2_5;
    if (x > static_cast<double>(mean) + sd) ++c.above_1;
  }
  return c;
}

}  // namespace oracle
