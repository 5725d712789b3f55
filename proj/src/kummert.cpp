#include "aglercert/kummert.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <tuple>
#include <vector>

#include "aglercert/rng.hpp"

namespace agler {

namespace {

// ---------------------------------------------------------------------------
// Small fixed-size 2x2 complex helpers for the Riccati fixed point, which may
// run millions of iterations on near-boundary tables.

struct M2 {
  cplx a{}, b{}, c{}, d{};  // [[a, b], [c, d]]
};

M2 operator*(const M2& x, const M2& y) {
  return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d, x.c * y.a + x.d * y.c,
          x.c * y.b + x.d * y.d};
}

M2 operator+(const M2& x, const M2& y) { return {x.a + y.a, x.b + y.b, x.c + y.c, x.d + y.d}; }

M2 operator-(const M2& x, const M2& y) { return {x.a - y.a, x.b - y.b, x.c - y.c, x.d - y.d}; }

M2 operator*(cplx s, const M2& x) { return {s * x.a, s * x.b, s * x.c, s * x.d}; }

M2 adjoint2(const M2& x) {
  return {std::conj(x.a), std::conj(x.c), std::conj(x.b), std::conj(x.d)};
}

double max_abs(const M2& x) {
  return std::max({std::abs(x.a), std::abs(x.b), std::abs(x.c), std::abs(x.d)});
}

double frobenius2(const M2& x) {
  return std::sqrt(std::norm(x.a) + std::norm(x.b) + std::norm(x.c) + std::norm(x.d));
}

// Smallest eigenvalue of a 2x2 Hermitian matrix, in closed form.
double min_eig2(const M2& x) {
  double mean = 0.5 * (x.a.real() + x.d.real());
  double diff = 0.5 * (x.a.real() - x.d.real());
  return mean - std::hypot(diff, std::abs(x.b));
}

// X^-1 * Y for invertible X.
M2 solve2(const M2& x, const M2& y) {
  cplx det = x.a * x.d - x.b * x.c;
  return {(x.d * y.a - x.b * y.c) / det, (x.d * y.b - x.b * y.d) / det,
          (x.a * y.c - x.c * y.a) / det, (x.a * y.d - x.c * y.b) / det};
}

M2 c0_of(const TrigPoly11& t) {
  return {0.5 * t.at(0, 0), t.at(0, 1), std::conj(t.at(0, 1)), 0.5 * t.at(0, 0)};
}

M2 c1_of(const TrigPoly11& t) {
  return {0.5 * t.at(1, 0), t.at(1, 1), t.at(1, -1), 0.5 * t.at(1, 0)};
}

struct RiccatiRun {
  bool started = false;    // C0 was safely positive definite
  bool converged = false;  // step fell below the tolerance
  M2 x{};
  long iters = 0;
  double step = std::numeric_limits<double>::infinity();
};

// Fixed-point iteration X <- C0 - C1^* X^-1 C1 from X0 = C0. Bails out (with
// converged = false) on a singular start, a singular iterate, or an iterate
// that loses positive semidefiniteness beyond rounding; the caller then falls
// back to the regularized table.
RiccatiRun riccati_fixed_point(const TrigPoly11& t, double tol, long max_iter) {
  RiccatiRun run;
  double scale = std::max(1.0, t.max_abs());
  M2 c0 = c0_of(t);
  M2 c1 = c1_of(t);
  if (min_eig2(c0) < 1e-13 * scale) return run;
  run.started = true;
  M2 x = c0;
  run.x = x;
  for (long it = 0; it < max_iter; ++it) {
    cplx det = x.a * x.d - x.b * x.c;
    if (!(std::abs(det) > 1e-280)) return run;
    M2 xn = c0 - adjoint2(c1) * solve2(x, c1);
    xn = 0.5 * (xn + adjoint2(xn));
    if (!(min_eig2(xn) > -1e-10 * std::max(1.0, max_abs(xn)))) return run;
    run.step = max_abs(xn - x) / std::max(1.0, max_abs(x));
    x = xn;
    run.x = x;
    run.iters = it + 1;
    if (run.step < tol) {
      run.converged = true;
      return run;
    }
  }
  return run;
}

cplx div_or_zero(cplx num, double den) { return den > 0.0 ? num / den : cplx(0.0, 0.0); }

// ---------------------------------------------------------------------------
// Gram feasibility problem: 32 real unknowns parametrize the two Hermitian
// 4x4 matrices (diagonal entries, then real and imaginary parts of each
// off-diagonal entry), and 36 coefficient equations give 72 real rows.

constexpr int kHalf = 16;
constexpr int kUnknowns = 32;
constexpr int kRows = 72;

struct HermEntry {
  int i, j, kind;  // kind: 0 diagonal, 1 real part, 2 imaginary part
};

const std::array<HermEntry, kHalf>& herm_basis() {
  static const std::array<HermEntry, kHalf> basis = [] {
    std::array<HermEntry, kHalf> out{};
    int n = 0;
    for (int i = 0; i < 4; ++i) out[n++] = {i, i, 0};
    for (int i = 0; i < 4; ++i) {
      for (int j = i + 1; j < 4; ++j) {
        out[n++] = {i, j, 1};
        out[n++] = {i, j, 2};
      }
    }
    return out;
  }();
  return basis;
}

// Monomial bases as subsets of {z1, z2, z3}: G1 rows run over 1, z2, z3,
// z2*z3 and G2 rows over 1, z1, z3, z1*z3.
int lift1(int m) { return ((m & 1) ? 2 : 0) | ((m & 2) ? 4 : 0); }
int lift2(int m) { return ((m & 1) ? 1 : 0) | ((m & 2) ? 4 : 0); }

using Vec32 = std::array<double, kUnknowns>;
using Vec72 = std::array<double, kRows>;

HermitianMatrix unpack_half(const double* x) {
  std::array<std::array<cplx, 4>, 4> m{};
  for (int idx = 0; idx < kHalf; ++idx) {
    const HermEntry& e = herm_basis()[idx];
    if (e.kind == 0) {
      m[e.i][e.i] += x[idx];
    } else if (e.kind == 1) {
      m[e.i][e.j] += x[idx];
    } else {
      m[e.i][e.j] += cplx(0.0, x[idx]);
    }
  }
  HermitianMatrix g(4);
  for (int j = 0; j < 4; ++j) {
    for (int k = j; k < 4; ++k) g.set(j, k, m[j][k]);
  }
  return g;
}

void pack_half(const HermitianMatrix& g, double* x) {
  for (int idx = 0; idx < kHalf; ++idx) {
    const HermEntry& e = herm_basis()[idx];
    x[idx] = e.kind == 0   ? g(e.i, e.i).real()
             : e.kind == 1 ? g(e.i, e.j).real()
                           : g(e.i, e.j).imag();
  }
}

struct LinearSystem {
  std::vector<double> k;  // kRows x kUnknowns, row-major
  Vec72 b{};
};

Vec72 apply_k(const LinearSystem& sys, const Vec32& x) {
  Vec72 out{};
  for (int r = 0; r < kRows; ++r) {
    const double* row = sys.k.data() + static_cast<std::size_t>(r) * kUnknowns;
    double acc = 0.0;
    for (int u = 0; u < kUnknowns; ++u) acc += row[u] * x[u];
    out[r] = acc;
  }
  return out;
}

double constraint_residual(const LinearSystem& sys, const Vec32& x) {
  Vec72 kx = apply_k(sys, x);
  double acc = 0.0;
  for (int r = 0; r < kRows; ++r) acc += (kx[r] - sys.b[r]) * (kx[r] - sys.b[r]);
  return std::sqrt(acc);
}

LinearSystem build_system(const MultiAffine3Poly& p, const EFactor& e) {
  // Target coefficients of |p|^2 - |p~|^2 - (1-|z3|^2)|E|^2 at z^al conj(z)^be.
  std::array<std::array<cplx, 8>, 8> ct{};
  for (int al = 0; al < 8; ++al) {
    for (int be = 0; be < 8; ++be) {
      std::size_t a = static_cast<std::size_t>(al);
      std::size_t b = static_cast<std::size_t>(be);
      ct[a][b] = p.coeffs[a] * std::conj(p.coeffs[b]) -
                 std::conj(p.coeffs[7 - a]) * p.coeffs[7 - b];
    }
  }
  MultiAffine2Poly e0 = e.component(0);
  MultiAffine2Poly e1 = e.component(1);
  for (int g = 0; g < 4; ++g) {
    for (int dl = 0; dl < 4; ++dl) {
      std::size_t gi = static_cast<std::size_t>(g);
      std::size_t di = static_cast<std::size_t>(dl);
      cplx ge = std::conj(e0.coeffs[di]) * e0.coeffs[gi] + std::conj(e1.coeffs[di]) * e1.coeffs[gi];
      ct[gi][di] -= ge;
      ct[gi | 4][di | 4] += ge;
    }
  }

  LinearSystem sys;
  sys.k.assign(static_cast<std::size_t>(kRows) * kUnknowns, 0.0);
  int eq = 0;
  for (int al = 0; al < 8; ++al) {
    for (int be = al; be < 8; ++be) {
      std::array<cplx, kUnknowns> row{};
      auto add_entry = [&row](int which, int i, int j, cplx coef) {
        int base = which * kHalf;
        for (int idx = 0; idx < kHalf; ++idx) {
          const HermEntry& h = herm_basis()[idx];
          cplx val(0.0, 0.0);
          if (h.kind == 0) {
            if (h.i == i && h.j == j) val = coef;
          } else if (h.kind == 1) {
            if ((h.i == i && h.j == j) || (h.i == j && h.j == i)) val = coef;
          } else {
            if (h.i == i && h.j == j) {
              val = cplx(0.0, 1.0) * coef;
            } else if (h.i == j && h.j == i) {
              val = cplx(0.0, -1.0) * coef;
            }
          }
          if (val != cplx(0.0, 0.0)) row[static_cast<std::size_t>(base + idx)] += val;
        }
      };
      // (1-|zj|^2) v^* G v contributes G[g][dl] at (z^lift(dl), conj(z)^lift(g))
      // and -G[g][dl] at the pair with the extra variable multiplied in.
      for (int g = 0; g < 4; ++g) {
        for (int dl = 0; dl < 4; ++dl) {
          if (lift1(dl) == al && lift1(g) == be) add_entry(0, g, dl, cplx(1.0, 0.0));
          if ((lift1(dl) | 1) == al && (lift1(g) | 1) == be) add_entry(0, g, dl, cplx(-1.0, 0.0));
          if (lift2(dl) == al && lift2(g) == be) add_entry(1, g, dl, cplx(1.0, 0.0));
          if ((lift2(dl) | 2) == al && (lift2(g) | 2) == be) add_entry(1, g, dl, cplx(-1.0, 0.0));
        }
      }
      double* kre = sys.k.data() + static_cast<std::size_t>(2 * eq) * kUnknowns;
      double* kim = kre + kUnknowns;
      for (int u = 0; u < kUnknowns; ++u) {
        kre[u] = row[static_cast<std::size_t>(u)].real();
        kim[u] = row[static_cast<std::size_t>(u)].imag();
      }
      sys.b[static_cast<std::size_t>(2 * eq)] = ct[static_cast<std::size_t>(al)][static_cast<std::size_t>(be)].real();
      sys.b[static_cast<std::size_t>(2 * eq + 1)] = ct[static_cast<std::size_t>(al)][static_cast<std::size_t>(be)].imag();
      ++eq;
    }
  }
  return sys;
}

struct AffineGeometry {
  Vec32 xls{};             // minimum-norm solution of K x = b
  std::vector<Vec32> null;  // orthonormal kernel basis
};

double dot32(const Vec32& x, const Vec32& y) {
  double acc = 0.0;
  for (int u = 0; u < kUnknowns; ++u) acc += x[u] * y[u];
  return acc;
}

// Row reduction of [K | b] with partial pivoting. The constraint matrix has
// entries in {-1, 0, 1} and a fixed singular spectrum bounded away from zero,
// so a fixed pivot threshold separates true pivots from rounding noise.
AffineGeometry affine_geometry(const LinearSystem& sys) {
  std::vector<double> m(sys.k);
  Vec72 rhs = sys.b;
  auto at = [&m](int r, int c) -> double& {
    return m[static_cast<std::size_t>(r) * kUnknowns + c];
  };
  std::array<int, kUnknowns> pivot_row;
  pivot_row.fill(-1);
  int rank = 0;
  for (int col = 0; col < kUnknowns && rank < kRows; ++col) {
    int best = -1;
    double mx = 1e-6;
    for (int r = rank; r < kRows; ++r) {
      if (std::abs(at(r, col)) > mx) {
        mx = std::abs(at(r, col));
        best = r;
      }
    }
    if (best < 0) continue;
    for (int c = 0; c < kUnknowns; ++c) std::swap(at(best, c), at(rank, c));
    std::swap(rhs[static_cast<std::size_t>(best)], rhs[static_cast<std::size_t>(rank)]);
    double piv = at(rank, col);
    for (int c = 0; c < kUnknowns; ++c) at(rank, c) /= piv;
    rhs[static_cast<std::size_t>(rank)] /= piv;
    for (int r = 0; r < kRows; ++r) {
      if (r == rank) continue;
      double f = at(r, col);
      if (f == 0.0) continue;
      for (int c = 0; c < kUnknowns; ++c) at(r, c) -= f * at(rank, c);
      rhs[static_cast<std::size_t>(r)] -= f * rhs[static_cast<std::size_t>(rank)];
    }
    pivot_row[static_cast<std::size_t>(col)] = rank;
    ++rank;
  }

  AffineGeometry geo;
  for (int col = 0; col < kUnknowns; ++col) {
    int r = pivot_row[static_cast<std::size_t>(col)];
    if (r >= 0) geo.xls[static_cast<std::size_t>(col)] = rhs[static_cast<std::size_t>(r)];
  }
  for (int f = 0; f < kUnknowns; ++f) {
    if (pivot_row[static_cast<std::size_t>(f)] >= 0) continue;
    Vec32 v{};
    v[static_cast<std::size_t>(f)] = 1.0;
    for (int col = 0; col < kUnknowns; ++col) {
      int r = pivot_row[static_cast<std::size_t>(col)];
      if (r >= 0) v[static_cast<std::size_t>(col)] = -at(r, f);
    }
    geo.null.push_back(v);
  }
  // Modified Gram-Schmidt; the vectors are independent by construction.
  for (std::size_t i = 0; i < geo.null.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      double c = dot32(geo.null[i], geo.null[j]);
      for (int u = 0; u < kUnknowns; ++u) geo.null[i][u] -= c * geo.null[j][u];
    }
    double nrm = std::sqrt(dot32(geo.null[i], geo.null[i]));
    for (int u = 0; u < kUnknowns; ++u) geo.null[i][u] /= nrm;
  }
  // Minimum-norm particular solution: drop the kernel component.
  for (const Vec32& n : geo.null) {
    double c = dot32(geo.xls, n);
    for (int u = 0; u < kUnknowns; ++u) geo.xls[u] -= c * n[u];
  }
  return geo;
}

EigenOptions small_values_only() {
  EigenOptions opts;
  opts.want_vectors = false;
  opts.parallel = false;
  return opts;
}

EigenOptions small_with_vectors() {
  EigenOptions opts;
  opts.parallel = false;
  return opts;
}

double herm_min_eig(const HermitianMatrix& m) {
  return hermitian_eigen(m, small_values_only()).values.front();
}

ComplexMatrix herm_inverse(const HermitianMatrix& m) {
  EigenResult er = hermitian_eigen(m, small_with_vectors());
  int n = m.size();
  ComplexMatrix out(n, n);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) {
      cplx acc(0.0, 0.0);
      for (int k = 0; k < n; ++k) {
        acc += er.vectors(r, k) * std::conj(er.vectors(c, k)) / er.values[static_cast<std::size_t>(k)];
      }
      out(r, c) = acc;
    }
  }
  return out;
}

double trace_re(const ComplexMatrix& x) {
  double acc = 0.0;
  for (int r = 0; r < x.rows(); ++r) acc += x(r, r).real();
  return acc;
}

double trace_prod_re(const ComplexMatrix& x, const ComplexMatrix& y) {
  cplx acc(0.0, 0.0);
  for (int r = 0; r < x.rows(); ++r) {
    for (int c = 0; c < x.cols(); ++c) acc += x(r, c) * y(c, r);
  }
  return acc.real();
}

// Gaussian elimination with partial pivoting; false on a singular matrix.
bool solve_dense(std::vector<double> h, std::vector<double> rhs, int n, std::vector<double>& out) {
  auto at = [&h, n](int r, int c) -> double& { return h[static_cast<std::size_t>(r) * n + c]; };
  for (int col = 0; col < n; ++col) {
    int best = col;
    for (int r = col + 1; r < n; ++r) {
      if (std::abs(at(r, col)) > std::abs(at(best, col))) best = r;
    }
    if (std::abs(at(best, col)) < 1e-300) return false;
    if (best != col) {
      for (int c = 0; c < n; ++c) std::swap(at(best, c), at(col, c));
      std::swap(rhs[static_cast<std::size_t>(best)], rhs[static_cast<std::size_t>(col)]);
    }
    for (int r = col + 1; r < n; ++r) {
      double f = at(r, col) / at(col, col);
      if (f == 0.0) continue;
      for (int c = col; c < n; ++c) at(r, c) -= f * at(col, c);
      rhs[static_cast<std::size_t>(r)] -= f * rhs[static_cast<std::size_t>(col)];
    }
  }
  out.assign(static_cast<std::size_t>(n), 0.0);
  for (int r = n - 1; r >= 0; --r) {
    double acc = rhs[static_cast<std::size_t>(r)];
    for (int c = r + 1; c < n; ++c) acc -= at(r, c) * out[static_cast<std::size_t>(c)];
    out[static_cast<std::size_t>(r)] = acc / at(r, r);
  }
  return true;
}

struct MarginPoint {
  Vec32 x{};
  double margin = 0.0;
};

// Barrier method for the max-margin point of the affine family: maximize s
// subject to G1(y) - s I >= 0 and G2(y) - s I >= 0 over the kernel
// coordinates y, following the log-det barrier path with damped Newton steps
// and a fraction-to-boundary line search.
MarginPoint max_margin_point(const AffineGeometry& geo) {
  const int nk = static_cast<int>(geo.null.size());
  const int nv = nk + 1;
  std::vector<HermitianMatrix> dg1, dg2;
  dg1.reserve(static_cast<std::size_t>(nk));
  dg2.reserve(static_cast<std::size_t>(nk));
  std::vector<ComplexMatrix> dg1c, dg2c;
  for (const Vec32& n : geo.null) {
    dg1.push_back(unpack_half(n.data()));
    dg2.push_back(unpack_half(n.data() + kHalf));
    dg1c.push_back(dg1.back().to_complex());
    dg2c.push_back(dg2.back().to_complex());
  }
  HermitianMatrix g10 = unpack_half(geo.xls.data());
  HermitianMatrix g20 = unpack_half(geo.xls.data() + kHalf);
  double scale_g = std::max({1.0, g10.frobenius_norm(), g20.frobenius_norm()});
  double m0 = std::min(herm_min_eig(g10), herm_min_eig(g20));

  std::vector<double> v(static_cast<std::size_t>(nv), 0.0);
  v[static_cast<std::size_t>(nk)] = m0 - scale_g;

  auto mats = [&](const std::vector<double>& w, HermitianMatrix& a1, HermitianMatrix& a2) {
    for (int j = 0; j < 4; ++j) {
      for (int k = j; k < 4; ++k) {
        cplx v1 = g10(j, k);
        cplx v2 = g20(j, k);
        for (int i = 0; i < nk; ++i) {
          v1 += w[static_cast<std::size_t>(i)] * dg1[static_cast<std::size_t>(i)](j, k);
          v2 += w[static_cast<std::size_t>(i)] * dg2[static_cast<std::size_t>(i)](j, k);
        }
        if (j == k) {
          v1 -= w[static_cast<std::size_t>(nk)];
          v2 -= w[static_cast<std::size_t>(nk)];
        }
        a1.set(j, k, v1);
        a2.set(j, k, v2);
      }
    }
  };

  double t = 1.0 / scale_g;
  bool done = false;
  for (int stage = 0; stage < 40 && !done; ++stage) {
    for (int newton = 0; newton < 60; ++newton) {
      HermitianMatrix a1(4), a2(4);
      mats(v, a1, a2);
      if (std::min(herm_min_eig(a1), herm_min_eig(a2)) < 1e-13 * scale_g) {
        done = true;
        break;
      }
      ComplexMatrix b1 = herm_inverse(a1);
      ComplexMatrix b2 = herm_inverse(a2);
      std::vector<ComplexMatrix> ba1, ba2;
      ba1.reserve(static_cast<std::size_t>(nv));
      ba2.reserve(static_cast<std::size_t>(nv));
      for (int i = 0; i < nk; ++i) {
        ba1.push_back(b1 * dg1c[static_cast<std::size_t>(i)]);
        ba2.push_back(b2 * dg2c[static_cast<std::size_t>(i)]);
      }
      ComplexMatrix nb1(4, 4), nb2(4, 4);
      for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 4; ++c) {
          nb1(r, c) = -b1(r, c);
          nb2(r, c) = -b2(r, c);
        }
      }
      ba1.push_back(nb1);
      ba2.push_back(nb2);

      std::vector<double> grad(static_cast<std::size_t>(nv), 0.0);
      grad[static_cast<std::size_t>(nk)] = t;
      for (int i = 0; i < nv; ++i) {
        grad[static_cast<std::size_t>(i)] +=
            trace_re(ba1[static_cast<std::size_t>(i)]) + trace_re(ba2[static_cast<std::size_t>(i)]);
      }
      std::vector<double> hess(static_cast<std::size_t>(nv) * nv, 0.0);
      for (int i = 0; i < nv; ++i) {
        for (int j = i; j < nv; ++j) {
          double hij = -(trace_prod_re(ba1[static_cast<std::size_t>(i)], ba1[static_cast<std::size_t>(j)]) +
                         trace_prod_re(ba2[static_cast<std::size_t>(i)], ba2[static_cast<std::size_t>(j)]));
          hess[static_cast<std::size_t>(i) * nv + j] = hij;
          hess[static_cast<std::size_t>(j) * nv + i] = hij;
        }
      }
      std::vector<double> neg_grad(static_cast<std::size_t>(nv));
      for (int i = 0; i < nv; ++i) neg_grad[static_cast<std::size_t>(i)] = -grad[static_cast<std::size_t>(i)];
      std::vector<double> dv;
      if (!solve_dense(hess, neg_grad, nv, dv)) break;
      double lam2 = 0.0;
      for (int i = 0; i < nv; ++i) lam2 += grad[static_cast<std::size_t>(i)] * dv[static_cast<std::size_t>(i)];
      if (lam2 < 1e-18) break;

      double alpha = 1.0;
      bool interior = false;
      std::vector<double> trial(static_cast<std::size_t>(nv));
      for (int h = 0; h < 80; ++h) {
        for (int i = 0; i < nv; ++i) {
          trial[static_cast<std::size_t>(i)] = v[static_cast<std::size_t>(i)] + alpha * dv[static_cast<std::size_t>(i)];
        }
        HermitianMatrix t1(4), t2(4);
        mats(trial, t1, t2);
        if (herm_min_eig(t1) > 0.0 && herm_min_eig(t2) > 0.0) {
          interior = true;
          break;
        }
        alpha *= 0.5;
      }
      if (!interior) break;
      if (alpha < 1.0) alpha *= 0.9;
      for (int i = 0; i < nv; ++i) v[static_cast<std::size_t>(i)] += alpha * dv[static_cast<std::size_t>(i)];
      if (alpha == 1.0 && lam2 < 1e-16) break;
    }
    if (done) break;
    if (8.0 / t < 1e-12 * scale_g) break;
    t *= 5.0;
  }

  MarginPoint out;
  out.x = geo.xls;
  for (int i = 0; i < nk; ++i) {
    for (int u = 0; u < kUnknowns; ++u) {
      out.x[u] += v[static_cast<std::size_t>(i)] * geo.null[static_cast<std::size_t>(i)][u];
    }
  }
  out.margin = v[static_cast<std::size_t>(nk)];
  return out;
}

// Alternating projections with Dykstra correction between the affine solution
// set and the product PSD cone, checked every 25 iterations.
std::pair<HermitianMatrix, HermitianMatrix> dykstra_polish(const LinearSystem& sys,
                                                           const AffineGeometry& geo,
                                                           const Vec32& x0, double tol,
                                                           long max_iter) {
  auto proj_aff = [&](const Vec32& w) {
    Vec32 out = geo.xls;
    for (const Vec32& n : geo.null) {
      double c = 0.0;
      for (int u = 0; u < kUnknowns; ++u) c += n[u] * (w[u] - geo.xls[u]);
      for (int u = 0; u < kUnknowns; ++u) out[u] += c * n[u];
    }
    return out;
  };
  auto proj_cone = [](const Vec32& w) {
    HermitianMatrix c1 = psd_project(unpack_half(w.data()));
    HermitianMatrix c2 = psd_project(unpack_half(w.data() + kHalf));
    Vec32 out{};
    pack_half(c1, out.data());
    pack_half(c2, out.data() + kHalf);
    return out;
  };

  Vec32 x = x0, p{}, q{};
  double cres = std::numeric_limits<double>::infinity();
  double mn = -std::numeric_limits<double>::infinity();
  for (long it = 0; it < max_iter; ++it) {
    Vec32 xp;
    for (int u = 0; u < kUnknowns; ++u) xp[u] = x[u] + p[u];
    Vec32 y = proj_aff(xp);
    for (int u = 0; u < kUnknowns; ++u) p[u] = xp[u] - y[u];
    Vec32 yq;
    for (int u = 0; u < kUnknowns; ++u) yq[u] = y[u] + q[u];
    Vec32 xn = proj_cone(yq);
    for (int u = 0; u < kUnknowns; ++u) q[u] = yq[u] - xn[u];
    x = xn;
    if (it % 25 == 0) {
      cres = constraint_residual(sys, x);
      HermitianMatrix g1 = unpack_half(x.data());
      HermitianMatrix g2 = unpack_half(x.data() + kHalf);
      mn = std::min(herm_min_eig(g1), herm_min_eig(g2));
      if (cres < tol && mn > -tol) {
        return {psd_project(g1), psd_project(g2)};
      }
    }
  }
  double residual = std::max(cres, std::max(0.0, -mn));
  throw NoConvergenceError(residual, "solve_sos12: Dykstra projections did not converge "
                                     "(constraint residual " +
                                         std::to_string(cres) + ")");
}

StabilityReport stability_2var(const MultiAffine2Poly& q) {
  MultiAffine3Poly p;
  for (int m = 0; m < 4; ++m) p.coeffs[static_cast<std::size_t>(m)] = q.coeffs[static_cast<std::size_t>(m)];
  return stability_3var(p);
}

using Grid33 = std::array<std::array<cplx, 3>, 3>;

Grid33 mul2(const MultiAffine2Poly& x, const MultiAffine2Poly& y) {
  Grid33 out{};
  for (int xm = 0; xm < 4; ++xm) {
    for (int ym = 0; ym < 4; ++ym) {
      int i = (xm & 1) + (ym & 1);
      int j = ((xm >> 1) & 1) + ((ym >> 1) & 1);
      out[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] +=
          x.coeffs[static_cast<std::size_t>(xm)] * y.coeffs[static_cast<std::size_t>(ym)];
    }
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Domain types

cplx MultiAffine2Poly::eval(cplx z1, cplx z2) const {
  return coeffs[0] + coeffs[1] * z1 + (coeffs[2] + coeffs[3] * z1) * z2;
}

MultiAffine2Poly MultiAffine2Poly::reflect() const {
  MultiAffine2Poly out;
  for (int m = 0; m < 4; ++m) {
    out.coeffs[static_cast<std::size_t>(m)] = std::conj(coeffs[static_cast<std::size_t>(3 - m)]);
  }
  return out;
}

MultiAffine2Poly operator+(const MultiAffine2Poly& x, const MultiAffine2Poly& y) {
  MultiAffine2Poly out;
  for (int m = 0; m < 4; ++m) {
    out.coeffs[static_cast<std::size_t>(m)] =
        x.coeffs[static_cast<std::size_t>(m)] + y.coeffs[static_cast<std::size_t>(m)];
  }
  return out;
}

int TrigPoly11::idx(int m, int n) {
  if (m < -1 || m > 1 || n < -1 || n > 1) {
    throw KummertError("TrigPoly11: index out of range");
  }
  return (m + 1) * 3 + (n + 1);
}

void TrigPoly11::set(int m, int n, cplx v) {
  if (m == 0 && n == 0) v = cplx(v.real(), 0.0);
  t_[static_cast<std::size_t>(idx(m, n))] = v;
  t_[static_cast<std::size_t>(idx(-m, -n))] = std::conj(v);
}

cplx TrigPoly11::eval(cplx z1, cplx z2) const {
  std::array<cplx, 3> p1 = {1.0 / z1, cplx(1.0, 0.0), z1};
  std::array<cplx, 3> p2 = {1.0 / z2, cplx(1.0, 0.0), z2};
  cplx acc(0.0, 0.0);
  for (int m = -1; m <= 1; ++m) {
    for (int n = -1; n <= 1; ++n) {
      acc += t_[static_cast<std::size_t>(idx(m, n))] * p1[static_cast<std::size_t>(m + 1)] *
             p2[static_cast<std::size_t>(n + 1)];
    }
  }
  return acc;
}

double TrigPoly11::max_abs() const {
  double mx = 0.0;
  for (const cplx& v : t_) mx = std::max(mx, std::abs(v));
  return mx;
}

MultiAffine2Poly EFactor::component(int c) const {
  if (c < 0 || c > 1) throw KummertError("EFactor: component index out of range");
  MultiAffine2Poly out;
  out.coeffs[0] = a0(c, 0);
  out.coeffs[1] = a1(c, 0);
  out.coeffs[2] = a0(c, 1);
  out.coeffs[3] = a1(c, 1);
  return out;
}

std::array<cplx, 2> EFactor::eval(cplx z1, cplx z2) const {
  std::array<cplx, 2> out;
  for (int c = 0; c < 2; ++c) {
    out[static_cast<std::size_t>(c)] = (a0(c, 0) + a1(c, 0) * z1) + (a0(c, 1) + a1(c, 1) * z1) * z2;
  }
  return out;
}

ComplexMatrix VEvaluator::eval(cplx z1, cplx z2) const {
  double scale = 1.0;
  for (int m = 0; m < 4; ++m) {
    scale += std::abs(a.coeffs[static_cast<std::size_t>(m)]) + std::abs(b.coeffs[static_cast<std::size_t>(m)]);
  }
  cplx av = a.eval(z1, z2);
  if (std::abs(av) <= 1e-14 * scale) {
    throw PoleError("VEvaluator: evaluation at a zero of a");
  }
  cplx btv = bt.eval(z1, z2);
  cplx den = av + btv;
  if (std::abs(den) <= 1e-14 * scale) {
    throw PoleError("VEvaluator: evaluation at a zero of a + reflect(b)");
  }
  cplx bv = b.eval(z1, z2);
  cplx atv = at.eval(z1, z2);
  std::array<cplx, 2> ev = {e[0].eval(z1, z2), e[1].eval(z1, z2)};
  std::array<cplx, 2> etv = {et[0].eval(z1, z2), et[1].eval(z1, z2)};
  ComplexMatrix m(3, 3);
  m(0, 0) = btv;
  for (int j = 0; j < 2; ++j) {
    m(0, 1 + j) = etv[static_cast<std::size_t>(j)];
    m(1 + j, 0) = ev[static_cast<std::size_t>(j)];
  }
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      cplx val = ev[static_cast<std::size_t>(i)] * etv[static_cast<std::size_t>(j)];
      if (i == j) val -= av * (atv + bv);
      m(1 + i, 1 + j) = val / den;
    }
  }
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) m(r, c) /= av;
  }
  return m;
}

// ---------------------------------------------------------------------------
// Operations

std::pair<MultiAffine2Poly, MultiAffine2Poly> split_ab(const MultiAffine3Poly& p) {
  MultiAffine2Poly a, b;
  for (int m = 0; m < 4; ++m) {
    a.coeffs[static_cast<std::size_t>(m)] = p.coeffs[static_cast<std::size_t>(m)];
    b.coeffs[static_cast<std::size_t>(m)] = p.coeffs[static_cast<std::size_t>(m | 4)];
  }
  return {a, b};
}

TrigPoly11 t_from_ab(const MultiAffine2Poly& a, const MultiAffine2Poly& b) {
  std::array<std::array<cplx, 3>, 3> acc{};
  for (int al = 0; al < 4; ++al) {
    for (int be = 0; be < 4; ++be) {
      int m = (al & 1) - (be & 1);
      int n = ((al >> 1) & 1) - ((be >> 1) & 1);
      acc[static_cast<std::size_t>(m + 1)][static_cast<std::size_t>(n + 1)] +=
          a.coeffs[static_cast<std::size_t>(al)] * std::conj(a.coeffs[static_cast<std::size_t>(be)]) -
          b.coeffs[static_cast<std::size_t>(al)] * std::conj(b.coeffs[static_cast<std::size_t>(be)]);
    }
  }
  TrigPoly11 t;
  t.set(0, 0, acc[1][1]);
  t.set(0, 1, acc[1][2]);
  t.set(1, -1, acc[2][0]);
  t.set(1, 0, acc[2][1]);
  t.set(1, 1, acc[2][2]);
  return t;
}

double trig_positivity_margin(const TrigPoly11& t) {
  double t00 = t.at(0, 0).real();
  cplx t10 = t.at(1, 0);
  cplx t01 = t.at(0, 1);
  cplx t11 = t.at(1, 1);
  cplx t1m = t.at(1, -1);
  return torus_min_deg1([&](double theta) {
    cplx z = std::polar(1.0, theta);
    double t0 = t00 + 2.0 * (t10 * z).real();
    cplx t1 = t01 + t11 * z + std::conj(t1m) * std::conj(z);
    return t0 - 2.0 * std::abs(t1);
  });
}

EFactor fejer_riesz_2x2(const TrigPoly11& t, double tol, long max_iter) {
  if (!(tol > 0.0)) throw KummertError("fejer_riesz_2x2: tolerance must be positive");
  if (max_iter < 1) throw KummertError("fejer_riesz_2x2: need at least one iteration");
  double scale = std::max(1.0, t.max_abs());
  double margin = trig_positivity_margin(t);
  if (margin < -tol * scale) {
    throw NotPositiveError(margin, "fejer_riesz_2x2: t is negative on the 2-torus (minimum " +
                                       std::to_string(margin) + ")");
  }

  constexpr double kRegEps = 1e-10;  // shift applied to t00 on the retry path
  constexpr double kStepOk = 1e-9;   // acceptable final step for a capped regularized run

  TrigPoly11 tw = t;
  RiccatiRun run = riccati_fixed_point(tw, tol, max_iter);
  bool reg = false;
  if (!run.started || !run.converged) {
    tw.set(0, 0, t.at(0, 0) + kRegEps);
    run = riccati_fixed_point(tw, tol, max_iter);
    reg = true;
    if (!run.started || !(run.step <= kStepOk * scale)) {
      throw NoConvergenceError(run.step, "fejer_riesz_2x2: fixed point stalled (relative step " +
                                             std::to_string(run.step) + ")");
    }
  }

  // X = L L^* (Cholesky), A0 = L^* upper triangular, A1 = L^-1 C1.
  double l00 = std::sqrt(std::max(run.x.a.real(), 0.0));
  cplx l10 = div_or_zero(run.x.c, l00);
  double l11 = std::sqrt(std::max(run.x.d.real() - std::norm(l10), 0.0));
  M2 c1 = c1_of(tw);
  cplx r00 = div_or_zero(c1.a, l00);
  cplx r01 = div_or_zero(c1.b, l00);
  cplx r10 = div_or_zero(c1.c - l10 * r00, l11);
  cplx r11 = div_or_zero(c1.d - l10 * r01, l11);

  EFactor e;
  e.a0 = ComplexMatrix(2, 2);
  e.a1 = ComplexMatrix(2, 2);
  e.a0(0, 0) = l00;
  e.a0(0, 1) = std::conj(l10);
  e.a0(1, 1) = l11;
  e.a1(0, 0) = r00;
  e.a1(0, 1) = r01;
  e.a1(1, 0) = r10;
  e.a1(1, 1) = r11;
  e.regularized = reg;
  e.iterations = run.iters;
  return e;
}

double fejer_riesz_residual(const EFactor& e, const TrigPoly11& t, int samples) {
  if (samples < 1) throw KummertError("fejer_riesz_residual: need at least one sample");
  M2 a0 = {e.a0(0, 0), e.a0(0, 1), e.a0(1, 0), e.a0(1, 1)};
  M2 a1 = {e.a1(0, 0), e.a1(0, 1), e.a1(1, 0), e.a1(1, 1)};
  M2 g0 = adjoint2(a0) * a0 + adjoint2(a1) * a1;
  M2 g1 = adjoint2(a0) * a1;
  M2 c0 = c0_of(t);
  M2 c1 = c1_of(t);
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    cplx z = std::polar(1.0, Rng::two_pi() * s / samples);
    M2 lhs = g0 + z * g1 + std::conj(z) * adjoint2(g1);
    M2 rhs = c0 + z * c1 + std::conj(z) * adjoint2(c1);
    worst = std::max(worst, frobenius2(lhs - rhs));
  }
  return worst;
}

VEvaluator build_v(const MultiAffine2Poly& a, const MultiAffine2Poly& b, const EFactor& e) {
  if (stability_2var(a).status == Stability::Unstable) {
    throw KummertError("build_v: a must have no zeros in the open bidisk");
  }
  VEvaluator v;
  v.a = a;
  v.b = b;
  v.at = a.reflect();
  v.bt = b.reflect();
  if (stability_2var(a + v.bt).status == Stability::Unstable) {
    throw KummertError("build_v: a + reflect(b) must have no zeros in the open bidisk");
  }
  v.e = {e.component(0), e.component(1)};
  v.et = {v.e[0].reflect(), v.e[1].reflect()};
  return v;
}

double v_unitarity_residual(const VEvaluator& v, int samples, std::uint64_t seed) {
  if (samples < 1) throw KummertError("v_unitarity_residual: need at least one sample");
  Rng rng(seed);
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    std::vector<cplx> z = rng.torus_point(2);
    ComplexMatrix m = v.eval(z[0], z[1]);
    ComplexMatrix g = m.adjoint() * m;
    for (int r = 0; r < 3; ++r) g(r, r) -= 1.0;
    worst = std::max(worst, g.frobenius_norm());
  }
  return worst;
}

double reflected_product_residual(const VEvaluator& v) {
  Grid33 lhs = mul2(v.et[0], v.e[0]);
  Grid33 l2 = mul2(v.et[1], v.e[1]);
  Grid33 ra = mul2(v.at, v.a);
  Grid33 rb = mul2(v.bt, v.b);
  double worst = 0.0;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      std::size_t ii = static_cast<std::size_t>(i);
      std::size_t jj = static_cast<std::size_t>(j);
      worst = std::max(worst, std::abs(lhs[ii][jj] + l2[ii][jj] - (ra[ii][jj] - rb[ii][jj])));
    }
  }
  return worst;
}

std::pair<HermitianMatrix, HermitianMatrix> solve_sos12(const MultiAffine3Poly& p,
                                                        const EFactor& e, double tol,
                                                        long max_iter) {
  if (!(tol >= 0.0)) throw KummertError("solve_sos12: tolerance must be nonnegative");
  StabilityReport rep = stability_3var(p);
  if (rep.status == Stability::Unstable) {
    throw KummertError("solve_sos12: input polynomial is unstable (margin " +
                       std::to_string(rep.margin) + ")");
  }
  LinearSystem sys = build_system(p, e);
  AffineGeometry geo = affine_geometry(sys);
  if (geo.null.size() != 4) {
    throw KummertError("solve_sos12: unexpected constraint kernel dimension");
  }
  double bscale = 0.0;
  for (double v : sys.b) bscale += v * v;
  bscale = std::max(1.0, std::sqrt(bscale));
  if (!(constraint_residual(sys, geo.xls) <= 1e-8 * bscale)) {
    throw KummertError("solve_sos12: coefficient system is inconsistent; the factor does not "
                       "match the polynomial");
  }
  MarginPoint start = max_margin_point(geo);
  return dykstra_polish(sys, geo, start.x, tol, max_iter);
}

KummertCertificate solve_kummert(const MultiAffine3Poly& p, double tol, long max_iter) {
  StabilityReport rep = stability_3var(p);
  if (rep.status == Stability::Unstable) {
    throw KummertError("solve_kummert: input polynomial is unstable (margin " +
                       std::to_string(rep.margin) + ")");
  }
  auto [a, b] = split_ab(p);
  TrigPoly11 t = t_from_ab(a, b);
  // The fixed-point contraction rate degrades as the positivity margin of t
  // shrinks, so the pipeline spends a much larger budget than the
  // factorization default before falling back to regularization.
  EFactor e = fejer_riesz_2x2(t, 1e-13, 2000000);
  KummertCertificate cert;
  cert.e = e;
  std::tie(cert.g1, cert.g2) = solve_sos12(p, e, tol, max_iter);
  cert.h1 = psd_factor(cert.g1, 1e-12).y;
  cert.h2 = psd_factor(cert.g2, 1e-12).y;
  return cert;
}

double verify_kummert(const MultiAffine3Poly& p, const KummertCertificate& cert, int samples,
                      std::uint64_t seed) {
  if (samples < 1) throw KummertError("verify_kummert: need at least one sample");
  if (cert.g1.size() != 4 || cert.g2.size() != 4) {
    throw KummertError("verify_kummert: Gram matrices must be 4x4");
  }
  if (cert.e.a0.rows() != 2 || cert.e.a0.cols() != 2 || cert.e.a1.rows() != 2 ||
      cert.e.a1.cols() != 2) {
    throw KummertError("verify_kummert: factor matrices must be 2x2");
  }
  MultiAffine3Poly pt = p.reflect();
  auto quad = [](const HermitianMatrix& g, const std::array<cplx, 4>& v) {
    cplx acc(0.0, 0.0);
    for (int j = 0; j < 4; ++j) {
      for (int k = 0; k < 4; ++k) {
        acc += std::conj(v[static_cast<std::size_t>(j)]) * g(j, k) * v[static_cast<std::size_t>(k)];
      }
    }
    return acc.real();
  };

  Rng rng(seed);
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    std::vector<cplx> z = s < samples / 2 ? rng.torus_point(3) : rng.polydisk_point(3);
    double lhs = std::norm(p.eval(z[0], z[1], z[2])) - std::norm(pt.eval(z[0], z[1], z[2]));
    std::array<cplx, 2> ev = cert.e.eval(z[0], z[1]);
    double sos3 = std::norm(ev[0]) + std::norm(ev[1]);
    std::array<cplx, 4> v1 = {cplx(1.0, 0.0), z[1], z[2], z[1] * z[2]};
    std::array<cplx, 4> v2 = {cplx(1.0, 0.0), z[0], z[2], z[0] * z[2]};
    double rhs = (1.0 - std::norm(z[0])) * quad(cert.g1, v1) +
                 (1.0 - std::norm(z[1])) * quad(cert.g2, v2) + (1.0 - std::norm(z[2])) * sos3;
    double res = std::abs(lhs - rhs) / std::max({1.0, std::abs(lhs), std::abs(rhs)});
    worst = std::max(worst, res);
  }
  return worst;
}

}  // namespace agler
