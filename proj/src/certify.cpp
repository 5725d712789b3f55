#include "aglercert/certify.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>

#include "aglercert/rng.hpp"

namespace agler {

namespace {

// Dense cube index; storage is zero-initialized so out-of-range stays 0.
std::size_t cube_index(int d, int i, int j, int k) {
  return (static_cast<std::size_t>(j) * d + static_cast<std::size_t>(k)) * d +
         static_cast<std::size_t>(i);
}

BTensor solve_recursion(int d, const std::function<cplx(int, int)>& l) {
  BTensor t;
  t.d = d;
  t.data.assign(static_cast<std::size_t>(d) * d * d, cplx(0.0, 0.0));
  for (int j = 0; j < d; ++j) {
    for (int k = 0; k < d; ++k) {
      cplx lv = l(j, k);
      int ilo = std::max(0, j + k - d + 1);
      int ihi = std::min(j, k);
      for (int i = ilo; i <= ihi; ++i) {
        cplx prev = t.at(i - 1, j - 1, k - 1);
        t.set(i, j, k, (lv + static_cast<double>(i) * prev) / static_cast<double>(d - j - k + i));
      }
    }
  }
  return t;
}

double binom_d(int n, int k) { return static_cast<double>(binomial(n, k)); }

}  // namespace

bool BTensor::in_range(int d, int i, int j, int k) {
  return j >= 0 && j < d && k >= 0 && k < d && i >= std::max(0, j + k - d + 1) &&
         i <= std::min(j, k);
}

cplx BTensor::at(int i, int j, int k) const {
  if (!in_range(d, i, j, k)) return cplx(0.0, 0.0);
  return data[cube_index(d, i, j, k)];
}

void BTensor::set(int i, int j, int k, cplx v) {
  if (!in_range(d, i, j, k)) throw CertError("BTensor::set: index out of range");
  data[cube_index(d, i, j, k)] = v;
}

BTensor solve_b_tensor(const SymMultiAffinePoly& p) {
  int d = p.d;
  if (d < 2) throw CertError("solve_b_tensor: need at least two variables");
  if (p.weights.size() != static_cast<std::size_t>(d) + 1) {
    throw CertError("solve_b_tensor: malformed weights");
  }
  const std::vector<cplx>& w = p.weights;
  return solve_recursion(d, [&w, d](int j, int k) {
    std::size_t ju = static_cast<std::size_t>(j);
    std::size_t ku = static_cast<std::size_t>(k);
    std::size_t du = static_cast<std::size_t>(d);
    cplx num = w[ju] * std::conj(w[ku]) - std::conj(w[du - ju]) * w[du - ku];
    return num / (binom_d(d, j) * binom_d(d, k));
  });
}

BTensor solve_b_tensor_from_gram(const CDGram& g, int d) {
  if (d < 2) throw CertError("solve_b_tensor_from_gram: need at least two variables");
  if (g.d != d) throw CertError("solve_b_tensor_from_gram: gram degree mismatch");
  return solve_recursion(d, [&g, d](int j, int k) {
    cplx diff = g.g(j, k);
    if (j > 0 && k > 0) diff -= g.g(j - 1, k - 1);
    return diff / (binom_d(d, j) * binom_d(d, k));
  });
}

AglerMatrix build_agler_matrix(const BTensor& t, int dcap) {
  if (t.d < 2) throw CertError("build_agler_matrix: need at least two variables");
  if (t.d > dcap) {
    throw CertError("build_agler_matrix: matrix of dimension 2^" + std::to_string(t.d - 1) +
                    " exceeds the configured cap");
  }
  int n = 1 << (t.d - 1);
  AglerMatrix out;
  out.d = t.d;
  out.m = HermitianMatrix(n);
  for (std::uint32_t a = 0; a < static_cast<std::uint32_t>(n); ++a) {
    for (std::uint32_t b = a; b < static_cast<std::uint32_t>(n); ++b) {
      out.m.set(static_cast<int>(a), static_cast<int>(b),
                t.at(std::popcount(a & b), std::popcount(a), std::popcount(b)));
    }
  }
  return out;
}

std::string to_string(CertStatus s) {
  switch (s) {
    case CertStatus::AglerDenominator: return "AglerDenominator";
    case CertStatus::Boundary: return "Boundary";
    case CertStatus::NotCertified: return "NotCertified";
  }
  return "Unknown";
}

CertReport certify(const SymMultiAffinePoly& p, double tol) {
  CertReport rep;
  rep.stability = stability_sym(p);
  if (rep.stability.status == Stability::Unstable) {
    throw CertError("certify: input has a zero in the polydisk (margin " +
                    std::to_string(rep.stability.margin) + "); the test presupposes stability");
  }
  AglerMatrix am = build_agler_matrix(solve_b_tensor(p));
  EigenOptions opts;
  opts.want_vectors = false;
  EigenResult eig = hermitian_eigen(am.m, opts);
  rep.min_eigenvalue = eig.values.front();
  rep.matrix_norm = std::max(std::abs(eig.values.front()), std::abs(eig.values.back()));
  double band = tol * std::max(1.0, rep.matrix_norm);
  if (rep.min_eigenvalue > band) {
    rep.status = CertStatus::AglerDenominator;
  } else if (rep.min_eigenvalue >= -band) {
    rep.status = CertStatus::Boundary;
  } else {
    rep.status = CertStatus::NotCertified;
  }
  return rep;
}

SOSCertificate extract_certificate(const AglerMatrix& m, double tol) {
  PsdFactor f = psd_factor(m.m, tol);
  SOSCertificate cert;
  cert.d = m.d;
  cert.rank = f.rank;
  int n = m.m.size();
  cert.vectors.assign(static_cast<std::size_t>(n), std::vector<cplx>());
  for (int a = 0; a < n; ++a) {
    std::vector<cplx>& v = cert.vectors[static_cast<std::size_t>(a)];
    v.resize(static_cast<std::size_t>(f.rank));
    // Conjugated column, so that sum_r B_alpha[r] conj(B_beta[r]) equals the
    // matrix entry (alpha, beta) and |B(w)|^2 expands with w^alpha against
    // conj(w^beta), extending the one-variable Gram convention.
    for (int r = 0; r < f.rank; ++r) v[static_cast<std::size_t>(r)] = std::conj(f.y(r, a));
  }
  return cert;
}

double verify_certificate(const SymMultiAffinePoly& p, const SOSCertificate& cert, int samples,
                          std::uint64_t seed) {
  if (cert.d != p.d) throw CertError("verify_certificate: certificate dimension mismatch");
  int d = p.d;
  std::size_t n = static_cast<std::size_t>(1) << (d - 1);
  if (cert.vectors.size() != n) {
    throw CertError("verify_certificate: certificate has the wrong number of vectors");
  }
  if (samples < 1) throw CertError("verify_certificate: need at least one sample");
  SymMultiAffinePoly pt = reflect(p);

  Rng rng(seed);
  std::vector<std::vector<cplx>> points;
  points.reserve(static_cast<std::size_t>(samples));
  for (int s = 0; s < samples; ++s) {
    points.push_back(s < samples / 2 ? rng.torus_point(d) : rng.polydisk_point(d));
  }

  double worst = 0.0;
#pragma omp parallel for reduction(max : worst) schedule(dynamic)
  for (int s = 0; s < samples; ++s) {
    const std::vector<cplx>& z = points[static_cast<std::size_t>(s)];
    double lhs = std::norm(eval_sym(p, z)) - std::norm(eval_sym(pt, z));
    double rhs = 0.0;
    std::vector<cplx> hat(static_cast<std::size_t>(d) - 1);
    std::vector<cplx> monom(n);
    std::vector<cplx> b(static_cast<std::size_t>(cert.rank));
    for (int j = 0; j < d; ++j) {
      for (int k = 0, t = 0; k < d; ++k) {
        if (k != j) hat[static_cast<std::size_t>(t++)] = z[static_cast<std::size_t>(k)];
      }
      // All subset monomials of the remaining coordinates by peeling the
      // lowest set bit, then B(hat) = sum_alpha monom[alpha] * B_alpha.
      monom[0] = cplx(1.0, 0.0);
      for (std::size_t mask = 1; mask < n; ++mask) {
        std::size_t low = mask & (~mask + 1);
        int bit = std::countr_zero(mask);
        monom[mask] = monom[mask ^ low] * hat[static_cast<std::size_t>(bit)];
      }
      std::fill(b.begin(), b.end(), cplx(0.0, 0.0));
      for (std::size_t mask = 0; mask < n; ++mask) {
        const std::vector<cplx>& va = cert.vectors[mask];
        cplx m = monom[mask];
        for (std::size_t r = 0; r < va.size(); ++r) b[r] += m * va[r];
      }
      double bnorm = 0.0;
      for (const cplx& v : b) bnorm += std::norm(v);
      rhs += (1.0 - std::norm(z[static_cast<std::size_t>(j)])) * bnorm;
    }
    double res = std::abs(lhs - rhs) / std::max({1.0, std::abs(lhs), std::abs(rhs)});
    worst = std::max(worst, res);
  }
  return worst;
}

RadiusResult agler_radius(const SymMultiAffinePoly& p, double r_lo, double r_hi, int steps,
                          double tol) {
  if (p.weights.empty() || p.weights[0] == cplx(0.0, 0.0)) {
    throw CertError("agler_radius: requires p(0) != 0");
  }
  if (!(r_lo >= 0.0) || !(r_hi > r_lo)) throw CertError("agler_radius: invalid interval");
  if (steps < 2) throw CertError("agler_radius: need at least two grid points");
  if (!(tol > 0.0)) throw CertError("agler_radius: tolerance must be positive");
  // Admit r_hi within half the stability band of the radius: the scaled
  // polynomial is then at worst BoundaryStable, which certify accepts.
  double srad = stability_radius(p);
  if (r_hi > srad * (1.0 + 0.5 * kEpsStab)) {
    throw CertError("agler_radius: upper bound exceeds the stability radius");
  }

  RadiusResult out;
  auto probe = [&p](double r) {
    CertReport rep = certify(scale_radius(p, r));
    return RadiusScanRow{r, rep.status, rep.min_eigenvalue};
  };
  for (int i = 0; i < steps; ++i) {
    double r = r_lo + (r_hi - r_lo) * i / (steps - 1);
    out.scan.push_back(probe(r));
  }
  int top = -1;
  for (int i = 0; i < steps; ++i) {
    if (out.scan[static_cast<std::size_t>(i)].status != CertStatus::NotCertified) top = i;
  }
  if (top < 0) {
    out.radius = 0.0;
    return out;
  }
  if (top == steps - 1) {
    out.radius = r_hi;
    return out;
  }
  double lo = out.scan[static_cast<std::size_t>(top)].r;
  double hi = out.scan[static_cast<std::size_t>(top) + 1].r;
  while (hi - lo > tol) {
    RadiusScanRow row = probe(0.5 * (lo + hi));
    out.scan.push_back(row);
    if (row.status != CertStatus::NotCertified) {
      lo = row.r;
    } else {
      hi = row.r;
    }
  }
  std::sort(out.scan.begin(), out.scan.end(),
            [](const RadiusScanRow& a, const RadiusScanRow& b) { return a.r < b.r; });
  out.radius = lo;
  return out;
}

Degree4ClosedForm degree4_closed_form(const SymMultiAffinePoly& p, double tol) {
  if (p.d != 4 || p.weights.size() != 5) {
    throw CertError("degree4_closed_form: requires exactly four variables");
  }
  const std::vector<cplx>& w = p.weights;
  Degree4ClosedForm out;
  out.lhs = 8.0 * (std::norm(w[0]) - std::norm(w[4])) - (std::norm(w[1]) - std::norm(w[3]));
  out.rhs = 2.0 * std::abs(w[2] * std::conj(w[1]) - std::conj(w[2]) * w[3] -
                           2.0 * (w[1] * std::conj(w[0]) - std::conj(w[3]) * w[4]));
  out.pass = out.lhs >= out.rhs - tol;
  return out;
}

Degree4Blocks degree4_blocks(const SymMultiAffinePoly& p) {
  if (p.d != 4) throw CertError("degree4_blocks: requires exactly four variables");
  AglerMatrix am = build_agler_matrix(solve_b_tensor(p));

  // Cardinality grouping {}, {1},{2},{3}, {1,2},{2,3},{1,3}, {1,2,3}.
  static constexpr int kOrder[8] = {0, 1, 2, 4, 3, 6, 5, 7};
  ComplexMatrix bg(8, 8);
  for (int a = 0; a < 8; ++a) {
    for (int b = 0; b < 8; ++b) bg(a, b) = am.m(kOrder[a], kOrder[b]);
  }

  Degree4Blocks out;
  static constexpr int kOffsets[5] = {0, 1, 4, 7, 8};
  for (int j = 0; j < 4; ++j) {
    for (int k = 0; k < 4; ++k) {
      ComplexMatrix blk(kOffsets[j + 1] - kOffsets[j], kOffsets[k + 1] - kOffsets[k]);
      for (int r = 0; r < blk.rows(); ++r) {
        for (int c = 0; c < blk.cols(); ++c) blk(r, c) = bg(kOffsets[j] + r, kOffsets[k] + c);
      }
      out.s[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)] = std::move(blk);
    }
  }

  const cplx mu = std::polar(1.0, Rng::two_pi() / 3.0);
  const cplx mu_pow[3] = {cplx(1.0, 0.0), mu, mu * mu};
  ComplexMatrix r(8, 8);
  r(0, 0) = cplx(2.0, 0.0);
  r(7, 7) = cplx(2.0, 0.0);
  for (int blk = 0; blk < 2; ++blk) {
    int off = 1 + 3 * blk;
    for (int a = 0; a < 3; ++a) {
      for (int b = 0; b < 3; ++b) r(off + a, off + b) = 2.0 * mu_pow[(a * b) % 3];
    }
  }
  out.conjugated = r * bg * r.adjoint();

  // Regrouping that exposes the block-diagonal form diag(A, X, X^t).
  static constexpr int kRegroup[8] = {0, 1, 4, 7, 3, 6, 2, 5};
  ComplexMatrix ms(8, 8);
  for (int a = 0; a < 8; ++a) {
    for (int b = 0; b < 8; ++b) ms(a, b) = out.conjugated(kRegroup[a], kRegroup[b]);
  }

  out.block_a = ComplexMatrix(4, 4);
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) out.block_a(a, b) = ms(a, b);
  }
  ComplexMatrix mid(2, 2), tail(2, 2);
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) {
      mid(a, b) = ms(4 + a, 4 + b);
      tail(a, b) = ms(6 + a, 6 + b);
    }
  }
  out.x_extracted = ComplexMatrix(2, 2);
  for (int a = 0; a < 2; ++a) {
    for (int b = 0; b < 2; ++b) out.x_extracted(a, b) = tail(b, a);
  }

  const ComplexMatrix& av = out.block_a;
  out.x_closed = ComplexMatrix(2, 2);
  cplx diag = (9.0 * av(0, 0) - av(1, 1)) / 2.0;
  out.x_closed(0, 0) = diag / 4.0;
  out.x_closed(1, 1) = diag / 4.0;
  out.x_closed(0, 1) = mu * (av(2, 1) - 3.0 * av(1, 0)) / 4.0;
  out.x_closed(1, 0) = mu * mu * (av(1, 2) - 3.0 * av(0, 1)) / 4.0;

  double off2 = 0.0;
  double resid2 = 0.0;
  for (int a = 0; a < 8; ++a) {
    for (int b = 0; b < 8; ++b) {
      bool in_a = a < 4 && b < 4;
      bool in_mid = a >= 4 && a < 6 && b >= 4 && b < 6;
      bool in_tail = a >= 6 && b >= 6;
      if (!in_a && !in_mid && !in_tail) off2 += std::norm(ms(a, b));
      cplx want(0.0, 0.0);
      if (in_a) want = out.block_a(a, b);
      if (in_mid) want = out.x_closed(a - 4, b - 4);
      if (in_tail) want = out.x_closed(b - 6, a - 6);  // transpose block
      resid2 += std::norm(ms(a, b) - want);
    }
  }
  out.off_block_mass = std::sqrt(off2);
  out.block_identity_residual = std::sqrt(resid2);
  if (out.off_block_mass > 1e-9 * std::max(1.0, am.m.frobenius_norm())) {
    throw CertError("degree4_blocks: conjugated matrix is not block diagonal; "
                    "internal inconsistency");
  }
  return out;
}

}  // namespace agler
