#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <vector>

#include "aglercert/poly.hpp"
#include "aglercert/rng.hpp"

using namespace agler;

namespace {

double dist(cplx a, cplx b) { return std::abs(a - b); }

}  // namespace

TEST_CASE("unipoly degree trims trailing zeros") {
  CHECK(UniPoly{{}}.degree() == 0);
  CHECK(UniPoly{{cplx(0, 0)}}.degree() == 0);
  CHECK(UniPoly{{cplx(3, 0)}}.degree() == 0);
  CHECK(UniPoly{{cplx(1, 0), cplx(2, 0)}}.degree() == 1);
  CHECK(UniPoly{{cplx(1, 0), cplx(0, 0), cplx(0, 0)}}.degree() == 0);
  CHECK(UniPoly{{cplx(1, 0), cplx(0, 1), cplx(0, 0)}}.degree() == 1);
}

TEST_CASE("unipoly horner evaluation") {
  UniPoly q{{cplx(1, 0), cplx(-2, 0), cplx(3, 0)}};
  CHECK(dist(q.eval(cplx(2, 0)), cplx(9, 0)) < 1e-15);
  CHECK(dist(q.eval(cplx(0, 1)), cplx(1, 0) + cplx(0, -2) + cplx(-3, 0)) < 1e-15);
}

TEST_CASE("symmetrize pads weights and validates the degree") {
  UniPoly q{{cplx(1, 0), cplx(-1, 0)}};
  SymMultiAffinePoly p = symmetrize(q, 3);
  REQUIRE(p.d == 3);
  REQUIRE(p.weights.size() == 4);
  CHECK(p.weights[0] == cplx(1, 0));
  CHECK(p.weights[1] == cplx(-1, 0));
  CHECK(p.weights[2] == cplx(0, 0));
  CHECK(p.weights[3] == cplx(0, 0));

  UniPoly cubic{{cplx(1, 0), cplx(0, 0), cplx(0, 0), cplx(2, 0)}};
  CHECK_THROWS_AS(symmetrize(cubic, 2), PolyError);
  CHECK_NOTHROW(symmetrize(cubic, 3));
  CHECK_THROWS_AS(symmetrize(q, 0), PolyError);
}

TEST_CASE("reflection is a conjugate flip and an involution") {
  Rng rng(11);
  SymMultiAffinePoly p;
  p.d = 4;
  for (int j = 0; j <= 4; ++j) p.weights.push_back(rng.disk(2.0));
  SymMultiAffinePoly r = reflect(p);
  for (int j = 0; j <= 4; ++j) {
    CHECK(r.weights[static_cast<std::size_t>(j)] ==
          std::conj(p.weights[static_cast<std::size_t>(4 - j)]));
  }
  SymMultiAffinePoly rr = reflect(r);
  for (int j = 0; j <= 4; ++j) {
    CHECK(rr.weights[static_cast<std::size_t>(j)] == p.weights[static_cast<std::size_t>(j)]);
  }
}

TEST_CASE("eval_sym matches the diagonal and product forms") {
  Rng rng(17);
  // On the diagonal the binomial factors collapse and the weights act as
  // ordinary coefficients.
  SymMultiAffinePoly p;
  p.d = 5;
  for (int j = 0; j <= 5; ++j) p.weights.push_back(rng.disk(1.5));
  UniPoly diag = diagonal_restriction(p);
  for (int trial = 0; trial < 20; ++trial) {
    cplx z = rng.disk(1.2);
    std::vector<cplx> zs(5, z);
    CHECK(dist(eval_sym(p, zs), diag.eval(z)) < 1e-12);
  }

  // Symmetrizing (1 - z/r)^d gives the product of the per-variable factors.
  const double r = 1.7;
  const int d = 4;
  UniPoly q{{cplx(1, 0)}};
  for (int k = 0; k < d; ++k) {
    std::vector<cplx> next(q.coeffs.size() + 1, cplx(0, 0));
    for (std::size_t j = 0; j < q.coeffs.size(); ++j) {
      next[j] += q.coeffs[j];
      next[j + 1] -= q.coeffs[j] / r;
    }
    q.coeffs = std::move(next);
  }
  SymMultiAffinePoly ps = symmetrize(q, d);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<cplx> zs = rng.polydisk_point(d);
    cplx prod(1, 0);
    for (const cplx& z : zs) prod *= cplx(1, 0) - z / r;
    CHECK(dist(eval_sym(ps, zs), prod) < 1e-12);
  }

  // Weights (1, 0, ..., 0, -1) encode 1 - z_1 ... z_d.
  SymMultiAffinePoly top;
  top.d = 6;
  top.weights.assign(7, cplx(0, 0));
  top.weights[0] = cplx(1, 0);
  top.weights[6] = cplx(-1, 0);
  for (int trial = 0; trial < 10; ++trial) {
    std::vector<cplx> zs = rng.polydisk_point(6);
    cplx prod(1, 0);
    for (const cplx& z : zs) prod *= z;
    CHECK(dist(eval_sym(top, zs), cplx(1, 0) - prod) < 1e-12);
  }

  std::vector<cplx> wrong(4, cplx(0, 0));
  CHECK_THROWS_AS(eval_sym(p, wrong), PolyError);
}

TEST_CASE("scale_radius rescales the argument") {
  Rng rng(23);
  SymMultiAffinePoly p;
  p.d = 3;
  for (int j = 0; j <= 3; ++j) p.weights.push_back(rng.disk(1.0));
  const double r = 0.63;
  SymMultiAffinePoly pr = scale_radius(p, r);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<cplx> zs = rng.polydisk_point(3);
    std::vector<cplx> rzs = zs;
    for (cplx& z : rzs) z *= r;
    CHECK(dist(eval_sym(pr, zs), eval_sym(p, rzs)) < 1e-13);
  }
}

TEST_CASE("univariate stability classifies by root modulus") {
  StabilityReport strict = stability_univariate(UniPoly{{cplx(1, 0), cplx(-0.5, 0)}});
  CHECK(strict.status == Stability::StrictlyStable);
  CHECK(strict.margin == doctest::Approx(1.0).epsilon(1e-12));
  REQUIRE(strict.witness.size() == 1);
  CHECK(dist(strict.witness[0], cplx(2, 0)) < 1e-12);

  StabilityReport boundary = stability_univariate(UniPoly{{cplx(1, 0), cplx(-1, 0)}});
  CHECK(boundary.status == Stability::BoundaryStable);
  CHECK(std::abs(boundary.margin) < 1e-12);

  StabilityReport unstable = stability_univariate(UniPoly{{cplx(1, 0), cplx(-2, 0)}});
  CHECK(unstable.status == Stability::Unstable);
  CHECK(unstable.margin == doctest::Approx(-0.5).epsilon(1e-12));

  StabilityReport constant = stability_univariate(UniPoly{{cplx(5, 0)}});
  CHECK(constant.status == Stability::StrictlyStable);
  CHECK(std::isinf(constant.margin));

  StabilityReport zero = stability_univariate(UniPoly{{cplx(0, 0)}});
  CHECK(zero.status == Stability::Unstable);

  // The witness is always an actual root.
  Rng rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    UniPoly q = random_stable_unipoly(rng, 6);
    q.coeffs[3] += cplx(0.9, 0);  // perturb away from guaranteed stability
    StabilityReport rep = stability_univariate(q);
    REQUIRE(rep.witness.size() == 1);
    CHECK(std::abs(q.eval(rep.witness[0])) < 1e-9);
  }
}

TEST_CASE("symmetric stability reduces to the diagonal") {
  UniPoly q{{cplx(1, 0), cplx(-1, 0)}};
  StabilityReport rep = stability_sym(symmetrize(q, 3));
  CHECK(rep.status == Stability::BoundaryStable);
  REQUIRE(rep.witness.size() == 3);
  CHECK(dist(rep.witness[0], cplx(1, 0)) < 1e-12);
  CHECK(dist(rep.witness[1], rep.witness[0]) == 0.0);

  CHECK(stability_radius(symmetrize(q, 3)) == doctest::Approx(1.0).epsilon(1e-12));
  UniPoly q2{{cplx(1, 0), cplx(-0.5, 0)}};
  CHECK(stability_radius(symmetrize(q2, 4)) == doctest::Approx(2.0).epsilon(1e-12));
  SymMultiAffinePoly constant;
  constant.d = 2;
  constant.weights = {cplx(1, 0), cplx(0, 0), cplx(0, 0)};
  CHECK(std::isinf(stability_radius(constant)));
}

TEST_CASE("degree-1 torus minimum: closed form agrees with profile search") {
  CHECK(torus_min_deg1(1.0, cplx(0.25, 0)) == doctest::Approx(0.5).epsilon(1e-14));
  Rng rng(31);
  for (int trial = 0; trial < 25; ++trial) {
    double u0 = rng.uniform(-2.0, 2.0);
    cplx u1 = rng.disk(1.5);
    auto profile = [u0, u1](double theta) {
      return u0 + 2.0 * (u1 * std::polar(1.0, theta)).real();
    };
    double arg = -1.0;
    double found = torus_min_deg1(profile, &arg);
    CHECK(std::abs(found - torus_min_deg1(u0, u1)) < 1e-10);
    CHECK(std::abs(profile(arg) - found) < 1e-12);
  }
}

TEST_CASE("3-variable stability: layered margins on worked examples") {
  // p = 1 - (z1 + z2 + z3)/6 has layer margins 35/36, 2/3 and 5/12.
  MultiAffine3Poly p;
  p.coeffs[0] = cplx(1, 0);
  p.coeffs[1] = p.coeffs[2] = p.coeffs[4] = cplx(-1.0 / 6.0, 0);
  StabilityReport rep = stability_3var(p);
  CHECK(rep.status == Stability::StrictlyStable);
  CHECK(rep.margin == doctest::Approx(5.0 / 12.0).epsilon(1e-11));

  MultiAffine3Poly one;
  one.coeffs[0] = cplx(1, 0);
  StabilityReport rep1 = stability_3var(one);
  CHECK(rep1.status == Stability::StrictlyStable);
  CHECK(rep1.margin == doctest::Approx(1.0).epsilon(1e-12));

  MultiAffine3Poly z3only;
  z3only.coeffs[4] = cplx(1, 0);
  StabilityReport rep2 = stability_3var(z3only);
  CHECK(rep2.status == Stability::Unstable);
  REQUIRE(rep2.witness.size() == 3);
  CHECK(std::abs(z3only.eval(rep2.witness[0], rep2.witness[1], rep2.witness[2])) < 1e-12);

  MultiAffine3Poly edge;  // 1 - z1: a zero at z1 = 1 on the boundary
  edge.coeffs[0] = cplx(1, 0);
  edge.coeffs[1] = cplx(-1, 0);
  StabilityReport rep3 = stability_3var(edge);
  CHECK(rep3.status == Stability::BoundaryStable);
  CHECK(std::abs(edge.eval(rep3.witness[0], rep3.witness[1], rep3.witness[2])) < 1e-10);

  MultiAffine3Poly two;  // 1 - z1/2 - z2/2 vanishes at (1,1,*)
  two.coeffs[0] = cplx(1, 0);
  two.coeffs[1] = two.coeffs[2] = cplx(-0.5, 0);
  StabilityReport rep4 = stability_3var(two);
  CHECK(rep4.status == Stability::BoundaryStable);
  CHECK(std::abs(two.eval(rep4.witness[0], rep4.witness[1], rep4.witness[2])) < 1e-10);

  MultiAffine3Poly zero;
  StabilityReport rep5 = stability_3var(zero);
  CHECK(rep5.status == Stability::Unstable);
}

TEST_CASE("3-variable stability agrees with closed-polydisk grid search") {
  Rng rng(404);
  int strict_count = 0;
  const double radii[5] = {0.25, 0.5, 0.75, 0.9, 1.0};
  for (int draw = 0; draw < 200; ++draw) {
    MultiAffine3Poly p;
    p.coeffs[0] = cplx(1, 0) + rng.disk(0.25);
    for (std::size_t m = 1; m < 8; ++m) p.coeffs[m] = rng.disk(0.25);
    StabilityReport rep = stability_3var(p);
    if (rep.status != Stability::StrictlyStable) continue;
    ++strict_count;
    double min_abs = 1e300;
    for (int i1 = 0; i1 < 40; ++i1) {
      cplx z1 = std::polar(radii[i1 % 5], Rng::two_pi() * (i1 / 5) / 8.0);
      for (int i2 = 0; i2 < 40; ++i2) {
        cplx z2 = std::polar(radii[i2 % 5], Rng::two_pi() * (i2 / 5) / 8.0);
        // Fixing z1, z2 the polynomial is affine in z3; its minimum modulus
        // over the closed disk has the closed form max(|a| - |b|, 0).
        cplx a = p.eval(z1, z2, cplx(0, 0));
        cplx b = p.eval(z1, z2, cplx(1, 0)) - a;
        min_abs = std::min(min_abs, std::max(std::abs(a) - std::abs(b), 0.0));
      }
    }
    CHECK(min_abs >= 1e-6);
  }
  CHECK(strict_count > 150);  // the sampler distribution accepts most draws
}

TEST_CASE("random stable samplers produce certifiably stable outputs") {
  Rng rng(77);
  for (int deg : {0, 1, 4, 7, 12}) {
    UniPoly q = random_stable_unipoly(rng, deg);
    CHECK(q.degree() == deg);
    CHECK(dist(q.coeffs[0], cplx(1, 0)) < 1e-15);
    StabilityReport rep = stability_univariate(q);
    CHECK(rep.status == Stability::StrictlyStable);
    if (deg > 0) CHECK(rep.margin > 0.05 - 1e-9);
  }
  for (int deg : {3, 4, 8}) {
    UniPoly q = random_stable_unipoly(rng, deg, true);
    for (const cplx& c : q.coeffs) CHECK(c.imag() == 0.0);
    CHECK(stability_univariate(q).status == Stability::StrictlyStable);
  }

  Rng rng_a(2024), rng_b(2024);
  MultiAffine3Poly pa = random_stable_3var(rng_a);
  MultiAffine3Poly pb = random_stable_3var(rng_b);
  for (std::size_t m = 0; m < 8; ++m) CHECK(pa.coeffs[m] == pb.coeffs[m]);
  CHECK(stability_3var(pa).status == Stability::StrictlyStable);
}
