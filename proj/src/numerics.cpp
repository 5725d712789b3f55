#include "aglercert/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace agler {

std::int64_t binomial(int n, int k) {
  if (n < 0 || k < 0 || k > n) throw NumericsError("binomial: invalid arguments");
  if (k > n - k) k = n - k;
  std::int64_t result = 1;
  for (int i = 1; i <= k; ++i) {
    // Exact at every step: result is divisible by i after the multiply.
    result = result * (n - k + i) / i;
  }
  return result;
}

ComplexMatrix ComplexMatrix::identity(int n) {
  ComplexMatrix m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

ComplexMatrix ComplexMatrix::adjoint() const {
  ComplexMatrix out(cols_, rows_);
  for (int r = 0; r < rows_; ++r)
    for (int c = 0; c < cols_; ++c) out(c, r) = std::conj((*this)(r, c));
  return out;
}

ComplexMatrix ComplexMatrix::operator*(const ComplexMatrix& rhs) const {
  if (cols_ != rhs.rows_) throw NumericsError("ComplexMatrix multiply: shape mismatch");
  ComplexMatrix out(rows_, rhs.cols_);
  for (int r = 0; r < rows_; ++r) {
    for (int k = 0; k < cols_; ++k) {
      const cplx v = (*this)(r, k);
      if (v == 0.0) continue;
      const cplx* rrow = rhs.row(k);
      cplx* orow = out.row(r);
      for (int c = 0; c < rhs.cols_; ++c) orow[c] += v * rrow[c];
    }
  }
  return out;
}

double ComplexMatrix::frobenius_norm() const {
  double s = 0.0;
  for (const cplx& v : a_) s += std::norm(v);
  return std::sqrt(s);
}

HermitianMatrix HermitianMatrix::identity(int n) {
  HermitianMatrix m(n);
  for (int i = 0; i < n; ++i) m.set(i, i, 1.0);
  return m;
}

void HermitianMatrix::set(int j, int k, cplx v) {
  if (j == k) v = cplx(v.real(), 0.0);
  a_[static_cast<std::size_t>(j) * n_ + k] = v;
  a_[static_cast<std::size_t>(k) * n_ + j] = std::conj(v);
}

double HermitianMatrix::frobenius_norm() const {
  double s = 0.0;
  for (const cplx& v : a_) s += std::norm(v);
  return std::sqrt(s);
}

double HermitianMatrix::off_diagonal_norm() const {
  double s = 0.0;
  for (int j = 0; j < n_; ++j)
    for (int k = 0; k < n_; ++k)
      if (j != k) s += std::norm((*this)(j, k));
  return std::sqrt(s);
}

bool HermitianMatrix::is_hermitian(double tol) const {
  for (int j = 0; j < n_; ++j)
    for (int k = j; k < n_; ++k)
      if (std::abs((*this)(j, k) - std::conj((*this)(k, j))) > tol) return false;
  return true;
}

ComplexMatrix HermitianMatrix::to_complex() const {
  ComplexMatrix out(n_, n_);
  for (int j = 0; j < n_; ++j)
    for (int k = 0; k < n_; ++k) out(j, k) = (*this)(j, k);
  return out;
}

namespace {

// One Jacobi rotation for the Hermitian pivot [[a, z], [conj(z), b]]:
// the unitary [[c, s*u], [-s*conj(u), c]] with u = z/|z| diagonalizes it to
// diag(a - t|z|, b + t|z|).
struct Rotation {
  int p = 0, q = 0;
  double c = 1.0, s = 0.0;
  cplx su{0.0, 0.0};  // s * u
  cplx cu{1.0, 0.0};  // c * u
  double new_pp = 0.0, new_qq = 0.0;
  bool active = false;
};

Rotation make_rotation(int p, int q, const cplx* mat, int n) {
  Rotation rot;
  rot.p = p;
  rot.q = q;
  const cplx z = mat[static_cast<std::size_t>(p) * n + q];
  const double az = std::abs(z);
  const double app = mat[static_cast<std::size_t>(p) * n + p].real();
  const double aqq = mat[static_cast<std::size_t>(q) * n + q].real();
  // Sub-normal pivots quantize |z| with O(1) relative error, which would make
  // u = z/|z| (and hence the rotation) non-unitary; treat them as zero.
  if (az < std::numeric_limits<double>::min()) {
    rot.new_pp = app;
    rot.new_qq = aqq;
    return rot;
  }
  const cplx u = z / az;
  const double tau = (aqq - app) / (2.0 * az);
  const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::hypot(1.0, tau));
  const double c = 1.0 / std::sqrt(1.0 + t * t);
  const double s = t * c;
  rot.c = c;
  rot.s = s;
  rot.su = s * u;
  rot.cu = c * u;
  rot.new_pp = app - t * az;
  rot.new_qq = aqq + t * az;
  rot.active = true;
  return rot;
}

// Left action (rows): row_p <- c*row_p - su*row_q ; row_q <- s*row_p + cu*row_q.
inline void rotate_rows(const Rotation& r, cplx* mat, int n) {
  cplx* rp = mat + static_cast<std::size_t>(r.p) * n;
  cplx* rq = mat + static_cast<std::size_t>(r.q) * n;
  const double c = r.c, s = r.s;
  const double sur = r.su.real(), sui = r.su.imag();
  const double cur = r.cu.real(), cui = r.cu.imag();
  for (int j = 0; j < n; ++j) {
    const double ar = rp[j].real(), ai = rp[j].imag();
    const double br = rq[j].real(), bi = rq[j].imag();
    rp[j] = cplx(c * ar - (sur * br - sui * bi), c * ai - (sur * bi + sui * br));
    rq[j] = cplx(s * ar + (cur * br - cui * bi), s * ai + (cur * bi + cui * br));
  }
}

// Right action (columns) restricted to one row k:
// m[k][p] <- c*m[k][p] - conj(su)*m[k][q] ; m[k][q] <- s*m[k][p] + conj(cu)*m[k][q].
inline void rotate_cols_in_row(const Rotation& r, cplx* row) {
  const double c = r.c, s = r.s;
  const double sur = r.su.real(), sui = r.su.imag();
  const double cur = r.cu.real(), cui = r.cu.imag();
  const double ar = row[r.p].real(), ai = row[r.p].imag();
  const double br = row[r.q].real(), bi = row[r.q].imag();
  row[r.p] = cplx(c * ar - (sur * br + sui * bi), c * ai - (sur * bi - sui * br));
  row[r.q] = cplx(s * ar + (cur * br + cui * bi), s * ai + (cur * bi - cui * br));
}

inline void fix_pivot(const Rotation& r, cplx* mat, int n) {
  mat[static_cast<std::size_t>(r.p) * n + r.p] = r.new_pp;
  mat[static_cast<std::size_t>(r.q) * n + r.q] = r.new_qq;
  mat[static_cast<std::size_t>(r.p) * n + r.q] = 0.0;
  mat[static_cast<std::size_t>(r.q) * n + r.p] = 0.0;
}

double off_diagonal_norm(const cplx* mat, int n) {
  double s = 0.0;
  for (int j = 0; j < n; ++j) {
    const cplx* row = mat + static_cast<std::size_t>(j) * n;
    for (int k = 0; k < n; ++k)
      if (k != j) s += std::norm(row[k]);
  }
  return std::sqrt(s);
}

EigenResult finish(std::vector<cplx>& work, std::vector<cplx>& w, int n, bool want_vectors) {
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::vector<double> diag(n);
  for (int j = 0; j < n; ++j) diag[j] = work[static_cast<std::size_t>(j) * n + j].real();
  std::sort(order.begin(), order.end(), [&](int a, int b) { return diag[a] < diag[b]; });

  EigenResult result;
  result.values.resize(n);
  for (int k = 0; k < n; ++k) result.values[k] = diag[order[k]];
  if (want_vectors) {
    // w holds the accumulated left factor W = Q^*; eigenvector k is the
    // conjugate of row order[k] of W, stored as column k.
    result.vectors = ComplexMatrix(n, n);
    for (int k = 0; k < n; ++k) {
      const cplx* wrow = w.data() + static_cast<std::size_t>(order[k]) * n;
      for (int i = 0; i < n; ++i) result.vectors(i, k) = std::conj(wrow[i]);
    }
  }
  return result;
}

EigenResult jacobi_round_robin(const HermitianMatrix& m, const EigenOptions& opts) {
  const int n = m.size();
  std::vector<cplx> work(m.row(0), m.row(0) + static_cast<std::size_t>(n) * n);
  std::vector<cplx> w;
  if (opts.want_vectors) {
    w.assign(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) w[static_cast<std::size_t>(i) * n + i] = 1.0;
  }

  const double norm = m.frobenius_norm();
  const double threshold = opts.tol * norm;
  if (n <= 1 || norm == 0.0) return finish(work, w, n, opts.want_vectors);

  // Round-robin tournament: m_pad-1 rounds of m_pad/2 pairwise-disjoint pairs
  // cover every index pair exactly once per sweep.
  const int m_pad = n + (n % 2);
  const int rounds = m_pad - 1;
  const int pairs_per_round = m_pad / 2;

  std::vector<Rotation> rots(pairs_per_round);
  double off = off_diagonal_norm(work.data(), n);
  for (int sweep = 0; sweep < opts.max_sweeps; ++sweep) {
    if (off <= threshold) return finish(work, w, n, opts.want_vectors);
    for (int round = 0; round < rounds; ++round) {
      // Pair the fixed seat with `round`; remaining seats pair (round+i, round-i).
      int active = 0;
      for (int i = 0; i < pairs_per_round; ++i) {
        int a, b;
        if (i == 0) {
          a = m_pad - 1;
          b = round;
        } else {
          a = (round + i) % (m_pad - 1);
          b = (round - i + (m_pad - 1)) % (m_pad - 1);
        }
        if (a >= n || b >= n) continue;  // padding seat when n is odd
        const int p = std::min(a, b), q = std::max(a, b);
        Rotation rot = make_rotation(p, q, work.data(), n);
        if (rot.active) rots[active++] = rot;
      }
      if (active == 0) continue;
      cplx* mat = work.data();
#pragma omp parallel if (opts.parallel)
      {
#pragma omp for schedule(static)
        for (int i = 0; i < active; ++i) rotate_rows(rots[i], mat, n);
#pragma omp for schedule(static)
        for (int k = 0; k < n; ++k) {
          cplx* row = mat + static_cast<std::size_t>(k) * n;
          for (int i = 0; i < active; ++i) rotate_cols_in_row(rots[i], row);
        }
        if (opts.want_vectors) {
          cplx* wd = w.data();
#pragma omp for schedule(static)
          for (int i = 0; i < active; ++i) rotate_rows(rots[i], wd, n);
        }
      }
      for (int i = 0; i < active; ++i) fix_pivot(rots[i], work.data(), n);
    }
    off = off_diagonal_norm(work.data(), n);
  }
  if (off <= threshold) return finish(work, w, n, opts.want_vectors);
  throw NumericsError("hermitian_eigen: no convergence after " + std::to_string(opts.max_sweeps) +
                      " sweeps; off-diagonal norm " + std::to_string(off));
}

}  // namespace

EigenResult hermitian_eigen(const HermitianMatrix& m, const EigenOptions& opts) {
  return jacobi_round_robin(m, opts);
}

EigenResult hermitian_eigen_serial(const HermitianMatrix& m, const EigenOptions& opts) {
  const int n = m.size();
  std::vector<cplx> work(m.row(0), m.row(0) + static_cast<std::size_t>(n) * n);
  std::vector<cplx> w;
  if (opts.want_vectors) {
    w.assign(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) w[static_cast<std::size_t>(i) * n + i] = 1.0;
  }
  const double norm = m.frobenius_norm();
  const double threshold = opts.tol * norm;
  if (n <= 1 || norm == 0.0) return finish(work, w, n, opts.want_vectors);

  for (int sweep = 0; sweep < opts.max_sweeps; ++sweep) {
    if (off_diagonal_norm(work.data(), n) <= threshold)
      return finish(work, w, n, opts.want_vectors);
    for (int p = 0; p < n - 1; ++p) {
      for (int q = p + 1; q < n; ++q) {
        Rotation rot = make_rotation(p, q, work.data(), n);
        if (!rot.active) continue;
        rotate_rows(rot, work.data(), n);
        for (int k = 0; k < n; ++k)
          rotate_cols_in_row(rot, work.data() + static_cast<std::size_t>(k) * n);
        fix_pivot(rot, work.data(), n);
        if (opts.want_vectors) rotate_rows(rot, w.data(), n);
      }
    }
  }
  const double off = off_diagonal_norm(work.data(), n);
  if (off <= threshold) return finish(work, w, n, opts.want_vectors);
  throw NumericsError("hermitian_eigen_serial: no convergence after " +
                      std::to_string(opts.max_sweeps) + " sweeps; off-diagonal norm " +
                      std::to_string(off));
}

PsdFactor psd_factor(const HermitianMatrix& m, double tol) {
  EigenResult eig = hermitian_eigen(m);
  const int n = m.size();
  double spectral = 0.0;
  for (double v : eig.values) spectral = std::max(spectral, std::abs(v));
  const double band = tol * std::max(1.0, spectral);

  PsdFactor out;
  out.min_eigenvalue = eig.values.empty() ? 0.0 : eig.values.front();
  if (out.min_eigenvalue < -band)
    throw NotPsdError(out.min_eigenvalue,
                      "psd_factor: matrix is not PSD (min eigenvalue " +
                          std::to_string(out.min_eigenvalue) + ")");

  // Eigenvalues inside the tolerance band count as zero and are dropped, so
  // the rank is stable when the matrix has an exact kernel perturbed by
  // rounding noise.
  std::vector<int> kept;
  for (int k = 0; k < n; ++k)
    if (eig.values[k] > band) kept.push_back(k);
  out.rank = static_cast<int>(kept.size());
  out.y = ComplexMatrix(out.rank, n);
  for (int i = 0; i < out.rank; ++i) {
    const double root = std::sqrt(eig.values[kept[i]]);
    for (int j = 0; j < n; ++j) out.y(i, j) = root * std::conj(eig.vectors(j, kept[i]));
  }
  return out;
}

HermitianMatrix psd_project(const HermitianMatrix& m) {
  EigenResult eig = hermitian_eigen(m);
  const int n = m.size();
  HermitianMatrix out(n);
  for (int j = 0; j < n; ++j) {
    for (int k = j; k < n; ++k) {
      cplx sum = 0.0;
      for (int i = 0; i < n; ++i) {
        const double lambda = eig.values[i];
        if (lambda <= 0.0) continue;
        sum += lambda * eig.vectors(j, i) * std::conj(eig.vectors(k, i));
      }
      out.set(j, k, sum);
    }
  }
  return out;
}

std::vector<cplx> poly_roots(const std::vector<cplx>& coeffs) {
  std::vector<cplx> c = coeffs;
  while (!c.empty() && c.back() == 0.0) c.pop_back();
  if (c.size() <= 1) throw NumericsError("poly_roots: degree must be at least 1");
  const int deg = static_cast<int>(c.size()) - 1;

  double cmax = 0.0;
  for (const cplx& v : c) cmax = std::max(cmax, std::abs(v));
  for (cplx& v : c) v /= cmax;

  // Cauchy upper bound for |root|, used as the initial circle radius.
  double bound = 0.0;
  for (int j = 0; j < deg; ++j) bound = std::max(bound, std::abs(c[j] / c[deg]));
  const double radius = 1.0 + bound;

  const double pi = std::acos(-1.0);
  std::vector<cplx> z(deg);
  for (int k = 0; k < deg; ++k) {
    const double angle = 2.0 * pi * k / deg + 0.376;  // offset breaks symmetry
    z[k] = 0.5 * radius * cplx(std::cos(angle), std::sin(angle));
  }

  const auto eval = [&](cplx x, cplx& p, cplx& dp) {
    p = c[deg];
    dp = 0.0;
    for (int j = deg - 1; j >= 0; --j) {
      dp = dp * x + p;
      p = p * x + c[j];
    }
  };

  const int max_iter = 500;
  for (int iter = 0; iter < max_iter; ++iter) {
    double max_step = 0.0;
    for (int k = 0; k < deg; ++k) {
      cplx p, dp;
      eval(z[k], p, dp);
      if (p == 0.0) continue;
      const cplx newton = (dp == 0.0) ? cplx(1e-12, 1e-12) : p / dp;
      cplx repulse = 0.0;
      for (int j = 0; j < deg; ++j) {
        if (j == k) continue;
        cplx diff = z[k] - z[j];
        if (std::abs(diff) < 1e-300) diff = cplx(1e-300, 0.0);
        repulse += 1.0 / diff;
      }
      const cplx denom = 1.0 - newton * repulse;
      const cplx step = (std::abs(denom) < 1e-300) ? newton : newton / denom;
      z[k] -= step;
      max_step = std::max(max_step, std::abs(step) / (1.0 + std::abs(z[k])));
    }
    if (max_step <= 1e-14) return z;
  }

  // Accept the final iterate only if every root has a small residual.
  for (int k = 0; k < deg; ++k) {
    cplx p, dp;
    eval(z[k], p, dp);
    const double scale = std::pow(std::max(1.0, std::abs(z[k])), deg);
    if (std::abs(p) > 1e-9 * scale)
      throw NumericsError("poly_roots: no convergence; residual " + std::to_string(std::abs(p)));
  }
  return z;
}

}  // namespace agler
