#pragma once
// Polynomial representations and stability tests: univariate polynomials,
// symmetric multi-affine polynomials in d variables (stored as d+1 weighted
// coefficients), and general 3-variable multi-affine polynomials.

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "aglercert/numerics.hpp"
#include "aglercert/rng.hpp"

namespace agler {

inline constexpr double kEpsStab = 1e-9;

class PolyError : public std::runtime_error {
 public:
  explicit PolyError(const std::string& what) : std::runtime_error(what) {}
};

struct UniPoly {
  std::vector<cplx> coeffs;  // p_0..p_d, ascending powers

  // Index of the last nonzero coefficient (0 for constants, including 0).
  int degree() const;
  cplx eval(cplx z) const;
};

// p(z) = sum over subsets alpha of [d] of binom(d,|alpha|)^-1 * weights[|alpha|] * z^alpha.
struct SymMultiAffinePoly {
  int d = 0;
  std::vector<cplx> weights;  // length d+1
};

// Coefficients indexed by subset bitmask: bit k set <=> variable z_{k+1}
// appears in the monomial.
struct MultiAffine3Poly {
  std::array<cplx, 8> coeffs{};

  cplx eval(cplx z1, cplx z2, cplx z3) const;
  // Reflection at multidegree (1,1,1): coefficient flip plus conjugation.
  MultiAffine3Poly reflect() const;
};

enum class Stability { StrictlyStable, BoundaryStable, Unstable };

std::string to_string(Stability s);

struct StabilityReport {
  Stability status = Stability::Unstable;
  double margin = 0.0;        // min of the test quantity; sign decides the verdict
  std::vector<cplx> witness;  // point or root achieving the margin
};

// Multi-affine symmetrization of q at degree d >= deg(q).
SymMultiAffinePoly symmetrize(const UniPoly& q, int d);

// Reflection: weight j of the result is conj(weights[d-j]); an involution.
SymMultiAffinePoly reflect(const SymMultiAffinePoly& p);

// Evaluation by bitmask enumeration of all 2^d subsets.
cplx eval_sym(const SymMultiAffinePoly& p, const std::vector<cplx>& z);

// The restriction p(z,...,z); its coefficients are exactly the weights.
UniPoly diagonal_restriction(const SymMultiAffinePoly& p);

// Scale the argument: returns the weights of z -> p(r*z), i.e. p_j * r^j.
SymMultiAffinePoly scale_radius(const SymMultiAffinePoly& p, double r);

// Stability = no zeros on the closed unit polydisk. The univariate margin is
// min |root| - 1; the symmetric case reduces to the diagonal restriction.
StabilityReport stability_univariate(const UniPoly& q, double eps_stab = kEpsStab);
StabilityReport stability_sym(const SymMultiAffinePoly& p, double eps_stab = kEpsStab);

// Supremum of r such that z -> p(r*z) is stable: min root modulus of the
// diagonal restriction (+infinity for constant diagonals).
double stability_radius(const SymMultiAffinePoly& p);

// Layered 3-variable test: p = a + b*z3 is stable iff a is stable (recursing
// down to one variable) and |a|^2 - |b|^2 > 0 on the torus at each layer.
// The margin is the smallest layer margin, in squared-modulus units.
StabilityReport stability_3var(const MultiAffine3Poly& p, double eps_stab = kEpsStab);

// Minimum over the torus of a degree-1 trigonometric polynomial
// u0 + u1 z + conj(u1 z): exact closed form u0 - 2|u1|.
double torus_min_deg1(double u0, cplx u1);

// Minimum over [0, 2pi) of a 1-D profile: 4096-point grid plus golden-section
// refinement of the bracket to 1e-12 width. Returns the minimizing angle too.
double torus_min_deg1(const std::function<double(double)>& profile, double* argmin = nullptr);

// Test samplers (documented seeds make runs reproducible).
// Strictly stable univariate polynomial with unit constant term: roots drawn
// with modulus in (1.05, 3); conjugate-paired when real_coeffs is set.
UniPoly random_stable_unipoly(Rng& rng, int degree, bool real_coeffs = false);

// Rejection sampler: coefficients uniform in a disk of radius 1/4 around the
// polynomial 1, accepted when stability_3var reports StrictlyStable.
MultiAffine3Poly random_stable_3var(Rng& rng, double eps_stab = kEpsStab);

}  // namespace agler
