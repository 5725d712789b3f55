#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <bit>
#include <cmath>
#include <complex>
#include <vector>

#include "aglercert/certify.hpp"
#include "aglercert/rng.hpp"

using namespace agler;

namespace {

UniPoly poly_from_roots(const std::vector<cplx>& roots, bool real_coeffs) {
  std::vector<cplx> c{cplx(1, 0)};
  for (const cplx& r : roots) {
    std::vector<cplx> next(c.size() + 1, cplx(0, 0));
    for (std::size_t j = 0; j < c.size(); ++j) {
      next[j] += c[j];
      next[j + 1] -= c[j] / r;
    }
    c = std::move(next);
  }
  if (real_coeffs) {
    for (cplx& v : c) v = cplx(v.real(), 0.0);
  }
  return UniPoly{std::move(c)};
}

// Boundary-tolerance polynomial whose subset matrix is genuinely indefinite:
// all four roots sit at modulus 1 - 5e-10, inside the disk but within the
// stability band, and the minimum eigenvalue lands at about -1.64e-9.
SymMultiAffinePoly indefinite_example() {
  const double m0 = 1.0 - 5e-10;
  std::vector<cplx> roots = {std::polar(m0, 0.4), std::polar(m0, -0.4), std::polar(m0, 2.0),
                             std::polar(m0, -2.0)};
  return symmetrize(poly_from_roots(roots, true), 4);
}

double tensor_max_diff(const BTensor& a, const BTensor& b) {
  double worst = 0.0;
  for (int j = 0; j < a.d; ++j) {
    for (int k = 0; k < a.d; ++k) {
      for (int i = 0; i <= std::min(j, k); ++i) {
        worst = std::max(worst, std::abs(a.at(i, j, k) - b.at(i, j, k)));
      }
    }
  }
  return worst;
}

}  // namespace

TEST_CASE("tensor storage and range semantics") {
  BTensor t;
  t.d = 3;
  t.data.assign(27, cplx(0, 0));
  CHECK(BTensor::in_range(3, 0, 0, 0));
  CHECK(BTensor::in_range(3, 1, 2, 1));
  CHECK_FALSE(BTensor::in_range(3, 0, 2, 2));  // i must be >= j+k-d+1 = 2
  CHECK_FALSE(BTensor::in_range(3, 2, 1, 2));  // i must be <= min(j,k)
  CHECK_FALSE(BTensor::in_range(3, 0, -1, 0));
  CHECK_FALSE(BTensor::in_range(3, 0, 3, 0));
  t.set(1, 2, 1, cplx(5, 1));
  CHECK(t.at(1, 2, 1) == cplx(5, 1));
  CHECK(t.at(-1, -1, -1) == cplx(0, 0));
  CHECK(t.at(0, 2, 2) == cplx(0, 0));
  CHECK_THROWS_AS(t.set(0, 2, 2, cplx(1, 0)), CertError);
}

TEST_CASE("hand-solved three-variable example") {
  SymMultiAffinePoly p = symmetrize(UniPoly{{cplx(1, 0), cplx(-1, 0)}}, 3);
  BTensor t = solve_b_tensor(p);
  CHECK(std::abs(t.at(0, 0, 0) - cplx(1.0 / 3.0, 0)) < 1e-15);
  CHECK(std::abs(t.at(0, 1, 0) - cplx(-1.0 / 6.0, 0)) < 1e-15);
  CHECK(std::abs(t.at(0, 1, 1) - cplx(1.0 / 9.0, 0)) < 1e-15);
  CHECK(std::abs(t.at(1, 1, 1) - cplx(2.0 / 9.0, 0)) < 1e-15);
  CHECK(std::abs(t.at(0, 2, 0) - cplx(0, 0)) < 1e-15);
  CHECK(std::abs(t.at(1, 2, 1) - cplx(-1.0 / 6.0, 0)) < 1e-15);
  CHECK(std::abs(t.at(2, 2, 2) - cplx(1.0 / 3.0, 0)) < 1e-15);

  AglerMatrix am = build_agler_matrix(t);
  REQUIRE(am.m.size() == 4);
  const double expected[4][4] = {{1.0 / 3, -1.0 / 6, -1.0 / 6, 0},
                                 {-1.0 / 6, 2.0 / 9, 1.0 / 9, -1.0 / 6},
                                 {-1.0 / 6, 1.0 / 9, 2.0 / 9, -1.0 / 6},
                                 {0, -1.0 / 6, -1.0 / 6, 1.0 / 3}};
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) CHECK(std::abs(am.m(a, b) - cplx(expected[a][b], 0)) < 1e-12);
  }
  EigenResult eig = hermitian_eigen(am.m);
  const double ev[4] = {0.0, 1.0 / 9, 1.0 / 3, 2.0 / 3};
  for (int k = 0; k < 4; ++k) CHECK(std::abs(eig.values[static_cast<std::size_t>(k)] - ev[k]) < 1e-10);
}

TEST_CASE("constant polynomial gives the diagonal matrix") {
  for (int d : {2, 3, 5, 8}) {
    UniPoly one{{cplx(1, 0)}};
    BTensor t = solve_b_tensor(symmetrize(one, d));
    for (int j = 0; j < d; ++j) {
      for (int k = 0; k < d; ++k) {
        for (int i = std::max(0, j + k - d + 1); i <= std::min(j, k); ++i) {
          cplx want =
              (i == j && i == k) ? cplx(1.0 / (d * static_cast<double>(binomial(d - 1, j))), 0)
                                 : cplx(0, 0);
          CHECK(std::abs(t.at(i, j, k) - want) < 1e-14);
        }
      }
    }
    AglerMatrix am = build_agler_matrix(t);
    int n = 1 << (d - 1);
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        double want = a == b ? 1.0 / (d * static_cast<double>(binomial(
                                              d - 1, std::popcount(static_cast<unsigned>(a)))))
                             : 0.0;
        CHECK(std::abs(am.m(a, b) - cplx(want, 0)) < 1e-14);
      }
    }
  }
}

TEST_CASE("gram-driven recursion matches the direct one") {
  // Worked example at d = 3.
  UniPoly q{{cplx(1, 0), cplx(-1, 0)}};
  BTensor direct = solve_b_tensor(symmetrize(q, 3));
  BTensor viagram = solve_b_tensor_from_gram(cd_gram(q, 3), 3);
  CHECK(tensor_max_diff(direct, viagram) < 1e-12);

  UniPoly q2{{cplx(1, 0), cplx(-0.5, 0)}};
  CHECK(tensor_max_diff(solve_b_tensor(symmetrize(q2, 2)),
                        solve_b_tensor_from_gram(cd_gram(q2, 2), 2)) < 1e-12);

  // Constant at several degrees.
  for (int d : {2, 4, 6}) {
    UniPoly one{{cplx(1, 0)}};
    CHECK(tensor_max_diff(solve_b_tensor(symmetrize(one, d)),
                          solve_b_tensor_from_gram(cd_gram(one, d), d)) < 1e-14);
  }

  // Random weight vectors: the two paths are algebraically identical.
  Rng rng(301);
  for (int trial = 0; trial < 30; ++trial) {
    int d = 2 + static_cast<int>(rng.uniform(0.0, 7.0));
    SymMultiAffinePoly p;
    p.d = d;
    for (int j = 0; j <= d; ++j) p.weights.push_back(rng.disk(1.5));
    BTensor a = solve_b_tensor(p);
    BTensor b = solve_b_tensor_from_gram(cd_gram(diagonal_restriction(p), d), d);
    CHECK(tensor_max_diff(a, b) < 1e-12);
  }

  CHECK_THROWS_AS(solve_b_tensor_from_gram(cd_gram(q, 3), 4), CertError);
}

TEST_CASE("tensor symmetries and recursion round trip") {
  Rng rng(302);
  for (int trial = 0; trial < 10; ++trial) {
    int d = 3 + static_cast<int>(rng.uniform(0.0, 5.0));
    UniPoly q = random_stable_unipoly(rng, d);
    SymMultiAffinePoly p = symmetrize(q, d);
    BTensor t = solve_b_tensor(p);
    for (int j = 0; j < d; ++j) {
      for (int k = 0; k < d; ++k) {
        for (int i = std::max(0, j + k - d + 1); i <= std::min(j, k); ++i) {
          // Conjugate pairing.
          CHECK(std::abs(t.at(i, k, j) - std::conj(t.at(i, j, k))) < 1e-13);
          // Reflection symmetry.
          CHECK(std::abs(t.at(i, j, k) - t.at(d - 1 - j - k + i, d - 1 - k, d - 1 - j)) < 1e-10);
          // Reconstructed load is independent of i and equals the direct one.
          cplx load = static_cast<double>(d - j - k + i) * t.at(i, j, k) -
                      static_cast<double>(i) * t.at(i - 1, j - 1, k - 1);
          cplx direct = (q.coeffs[static_cast<std::size_t>(j)] *
                             std::conj(q.coeffs[static_cast<std::size_t>(k)]) -
                         std::conj(q.coeffs[static_cast<std::size_t>(d - j)]) *
                             q.coeffs[static_cast<std::size_t>(d - k)]) /
                        (static_cast<double>(binomial(d, j)) * static_cast<double>(binomial(d, k)));
          CHECK(std::abs(load - direct) < 1e-12);
        }
      }
    }
  }
}

TEST_CASE("four-variable tensor relations to the gram block") {
  Rng rng(303);
  for (int trial = 0; trial < 10; ++trial) {
    UniPoly q = random_stable_unipoly(rng, 4, trial % 2 == 0);
    BTensor t = solve_b_tensor(symmetrize(q, 4));
    const HermitianMatrix& a = cd_gram(q, 4).g;
    CHECK(std::abs(t.at(0, 0, 0) - a(0, 0) / 4.0) < 1e-13);
    CHECK(std::abs(t.at(1, 1, 1) - (a(0, 0) / 16.0 + a(1, 1) / 48.0)) < 1e-13);
    CHECK(std::abs(t.at(0, 1, 1) - (a(1, 1) - a(0, 0)) / 32.0) < 1e-13);
  }
}

TEST_CASE("certification verdicts") {
  CertReport boundary = certify(symmetrize(UniPoly{{cplx(1, 0), cplx(-1, 0)}}, 3));
  CHECK(boundary.status == CertStatus::Boundary);
  CHECK(std::abs(boundary.min_eigenvalue) < 1e-10);
  CHECK(boundary.matrix_norm == doctest::Approx(2.0 / 3.0).epsilon(1e-9));
  CHECK(boundary.stability.status == Stability::BoundaryStable);

  CertReport strict = certify(symmetrize(UniPoly{{cplx(1, 0)}}, 5));
  CHECK(strict.status == CertStatus::AglerDenominator);
  CHECK(strict.min_eigenvalue == doctest::Approx(1.0 / 30.0).epsilon(1e-10));

  CHECK_THROWS_AS(certify(symmetrize(UniPoly{{cplx(1, 0), cplx(-2, 0)}}, 3)), CertError);

  CertReport indef = certify(indefinite_example());
  CHECK(indef.stability.status == Stability::BoundaryStable);
  CHECK(indef.status == CertStatus::NotCertified);
  CHECK(indef.min_eigenvalue < -1e-9);
  CHECK(indef.min_eigenvalue > -3e-9);

  // Random stable inputs certify.
  Rng rng(304);
  for (int trial = 0; trial < 10; ++trial) {
    int d = 3 + static_cast<int>(rng.uniform(0.0, 4.0));
    CertReport rep = certify(symmetrize(random_stable_unipoly(rng, d), d));
    CHECK(rep.status != CertStatus::NotCertified);
    CHECK(rep.min_eigenvalue > -1e-9 * std::max(1.0, rep.matrix_norm));
  }
}

TEST_CASE("matrix dimension cap") {
  BTensor t;
  t.d = 13;
  t.data.assign(13 * 13 * 13, cplx(0, 0));
  CHECK_THROWS_AS(build_agler_matrix(t), CertError);
  CHECK_NOTHROW(build_agler_matrix(t, 13));
}

TEST_CASE("certificate extraction and verification") {
  // Worked d=3 example: rank 3 with one zero eigenvalue.
  SymMultiAffinePoly p3 = symmetrize(UniPoly{{cplx(1, 0), cplx(-1, 0)}}, 3);
  AglerMatrix am3 = build_agler_matrix(solve_b_tensor(p3));
  SOSCertificate cert3 = extract_certificate(am3);
  CHECK(cert3.rank == 3);
  REQUIRE(cert3.vectors.size() == 4);
  // Inner products reproduce the matrix.
  for (int a = 0; a < 4; ++a) {
    for (int b = 0; b < 4; ++b) {
      cplx ip(0, 0);
      for (int r = 0; r < cert3.rank; ++r) {
        ip += cert3.vectors[static_cast<std::size_t>(a)][static_cast<std::size_t>(r)] *
              std::conj(cert3.vectors[static_cast<std::size_t>(b)][static_cast<std::size_t>(r)]);
      }
      CHECK(std::abs(ip - am3.m(a, b)) < 1e-12);
    }
  }
  CHECK(verify_certificate(p3, cert3, 200, 1234) < 1e-9);

  // Constant at degree 4: exact closed form, tiny residual.
  SymMultiAffinePoly one4 = symmetrize(UniPoly{{cplx(1, 0)}}, 4);
  AglerMatrix am1 = build_agler_matrix(solve_b_tensor(one4));
  SOSCertificate cert1 = extract_certificate(am1);
  CHECK(verify_certificate(one4, cert1, 100, 7) < 1e-12);

  // Corruption is caught.
  SOSCertificate bad = cert3;
  for (cplx& v : bad.vectors[2]) v *= 2.0;
  CHECK(verify_certificate(p3, bad, 200, 1234) > 1e-2);

  // Dimension mismatch.
  CHECK_THROWS_AS(verify_certificate(one4, cert3, 10, 1), CertError);

  // Random stable inputs: extract + verify round trip.
  Rng rng(305);
  for (int trial = 0; trial < 5; ++trial) {
    int d = 3 + static_cast<int>(rng.uniform(0.0, 5.0));
    SymMultiAffinePoly p = symmetrize(random_stable_unipoly(rng, d), d);
    AglerMatrix am = build_agler_matrix(solve_b_tensor(p));
    SOSCertificate cert = extract_certificate(am);
    CHECK(cert.rank <= am.m.size());
    CHECK(verify_certificate(p, cert, 150, 1000 + static_cast<std::uint64_t>(trial)) < 1e-8);
  }
}

TEST_CASE("radius scan and bisection") {
  // Fully certified up to the stability radius.
  SymMultiAffinePoly p = symmetrize(UniPoly{{cplx(1, 0), cplx(-1, 0)}}, 4);
  RadiusResult full = agler_radius(p, 0.5, 1.0, 6, 1e-6);
  CHECK(full.radius == doctest::Approx(1.0));
  CHECK(full.scan.size() == 6);
  for (const RadiusScanRow& row : full.scan) CHECK(row.status != CertStatus::NotCertified);

  // Constant: any interval works, radius is the upper end.
  RadiusResult cst = agler_radius(symmetrize(UniPoly{{cplx(1, 0)}}, 3), 0.1, 2.5, 4, 1e-6);
  CHECK(cst.radius == doctest::Approx(2.5));

  // Errors: zero constant term, bad interval, cap above the stability radius.
  SymMultiAffinePoly z0;
  z0.d = 2;
  z0.weights = {cplx(0, 0), cplx(1, 0), cplx(0, 0)};
  CHECK_THROWS_AS(agler_radius(z0, 0.1, 0.5, 3, 1e-6), CertError);
  CHECK_THROWS_AS(agler_radius(p, 0.5, 0.4, 3, 1e-6), CertError);
  CHECK_THROWS_AS(agler_radius(p, 0.5, 1.1, 3, 1e-6), CertError);
  CHECK_THROWS_AS(agler_radius(p, 0.5, 1.0, 1, 1e-6), CertError);
  CHECK_THROWS_AS(agler_radius(p, 0.5, 1.0, 4, 0.0), CertError);

  // Indefinite boundary-band example: the top of the admissible interval is
  // not certified, so the largest transition is bisected.
  SymMultiAffinePoly pc = indefinite_example();
  double srad = stability_radius(pc);
  double r_hi = srad * (1.0 + 4.5e-10);
  RadiusResult bis = agler_radius(pc, 0.9, r_hi, 4, 1e-6);
  CHECK(bis.radius > r_hi - 2e-6);
  CHECK(bis.radius < r_hi);
  int not_certified = 0;
  for (const RadiusScanRow& row : bis.scan) {
    if (row.status == CertStatus::NotCertified) ++not_certified;
  }
  CHECK(not_certified >= 1);
  CHECK(bis.scan.size() > 4);  // bisection probes are appended to the table
  for (std::size_t i = 1; i < bis.scan.size(); ++i) CHECK(bis.scan[i - 1].r <= bis.scan[i].r);
}

TEST_CASE("degree-4 closed form") {
  SymMultiAffinePoly a;
  a.d = 4;
  a.weights = {cplx(1, 0), cplx(-1, 0), cplx(0, 0), cplx(0, 0), cplx(0, 0)};
  Degree4ClosedForm fa = degree4_closed_form(a);
  CHECK(fa.lhs == doctest::Approx(7.0).epsilon(1e-14));
  CHECK(fa.rhs == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(fa.pass);

  SymMultiAffinePoly b;
  b.d = 4;
  b.weights = {cplx(1, 0), cplx(-4, 0), cplx(6, 0), cplx(-4, 0), cplx(1, 0)};
  Degree4ClosedForm fb = degree4_closed_form(b);
  CHECK(std::abs(fb.lhs) < 1e-10);
  CHECK(std::abs(fb.rhs) < 1e-10);
  CHECK(fb.pass);

  SymMultiAffinePoly c;
  c.d = 4;
  c.weights = {cplx(1, 0), cplx(0, 0), cplx(0, 0), cplx(0, 0), cplx(0, 0)};
  Degree4ClosedForm fc = degree4_closed_form(c);
  CHECK(fc.lhs == doctest::Approx(8.0).epsilon(1e-14));
  CHECK(fc.rhs == doctest::Approx(0.0));
  CHECK(fc.pass);

  CHECK_THROWS_AS(degree4_closed_form(symmetrize(UniPoly{{cplx(1, 0)}}, 3)), CertError);

  // The closed form fails exactly when the matrix test fails.
  Degree4ClosedForm fi = degree4_closed_form(indefinite_example(), 0.0);
  CHECK_FALSE(fi.pass);
}

TEST_CASE("degree-4 block reduction") {
  Rng rng(306);
  for (int trial = 0; trial < 12; ++trial) {
    bool real_weights = trial % 2 == 0;
    UniPoly q = random_stable_unipoly(rng, 4, real_weights);
    SymMultiAffinePoly p = symmetrize(q, 4);
    Degree4Blocks blk = degree4_blocks(p);

    AglerMatrix am = build_agler_matrix(solve_b_tensor(p));
    double bnorm = am.m.frobenius_norm();
    CHECK(blk.off_block_mass <= 1e-9 * std::max(1.0, bnorm));

    // The leading 4x4 block is the one-variable Gram matrix of the diagonal.
    const HermitianMatrix& g = cd_gram(q, 4).g;
    for (int r = 0; r < 4; ++r) {
      for (int c = 0; c < 4; ++c) CHECK(std::abs(blk.block_a(r, c) - g(r, c)) < 1e-12);
    }

    // The extracted reduced matrix always matches the closed form.
    for (int r = 0; r < 2; ++r) {
      for (int c = 0; c < 2; ++c) {
        CHECK(std::abs(blk.x_extracted(r, c) - blk.x_closed(r, c)) < 1e-10);
      }
    }

    // For real weights the whole conjugated matrix is diag(A, X, X^t).
    if (real_weights) {
      CHECK(blk.block_identity_residual <= 1e-10 * std::max(1.0, bnorm));
    }

    // The reduced matrix is hermitian and PSD for these certified inputs.
    CHECK(std::abs(blk.x_closed(0, 1) - std::conj(blk.x_closed(1, 0))) < 1e-12);
    double tr = blk.x_closed(0, 0).real() + blk.x_closed(1, 1).real();
    double det = (blk.x_closed(0, 0) * blk.x_closed(1, 1) -
                  blk.x_closed(0, 1) * blk.x_closed(1, 0))
                     .real();
    CHECK(tr > -1e-10);
    CHECK(det > -1e-10);

    // Cardinality blocks tile the matrix in the grouped order.
    CHECK(blk.s[0][0].rows() == 1);
    CHECK(blk.s[1][2].rows() == 3);
    CHECK(blk.s[1][2].cols() == 3);
    CHECK(blk.s[3][3].cols() == 1);
    static constexpr int kOrder[8] = {0, 1, 2, 4, 3, 6, 5, 7};
    static constexpr int kOffsets[5] = {0, 1, 4, 7, 8};
    for (int bj = 0; bj < 4; ++bj) {
      for (int bk = 0; bk < 4; ++bk) {
        for (int r = 0; r < blk.s[bj][bk].rows(); ++r) {
          for (int c = 0; c < blk.s[bj][bk].cols(); ++c) {
            CHECK(std::abs(blk.s[bj][bk](r, c) -
                           am.m(kOrder[kOffsets[bj] + r], kOrder[kOffsets[bk] + c])) < 1e-14);
          }
        }
      }
    }
  }

  CHECK_THROWS_AS(degree4_blocks(symmetrize(UniPoly{{cplx(1, 0)}}, 3)), CertError);
}

TEST_CASE("verdict agreement between matrix test and closed form") {
  Rng rng(307);
  for (int trial = 0; trial < 40; ++trial) {
    UniPoly q = random_stable_unipoly(rng, 4, trial % 2 == 0);
    SymMultiAffinePoly p = symmetrize(q, 4);
    CertReport rep = certify(p);
    Degree4ClosedForm form = degree4_closed_form(p);
    double matrix_margin = rep.min_eigenvalue;
    double form_margin = form.lhs - form.rhs;
    if (std::abs(matrix_margin) > 1e-7 && std::abs(form_margin) > 1e-7) {
      CHECK((matrix_margin > 0) == (form_margin > 0));
    }
  }
}
