#pragma once
// Constructive three-square decomposition for stable three-variable
// multi-affine polynomials. Writing p = a + b*z3 leaves the Hermitian
// trigonometric table t = |a|^2 - |b|^2 on the 2-torus; a 2x2 matrix
// Fejer-Riesz factorization turns t into a two-component polynomial factor
// E(z1,z2) with |E|^2 = t there, and two PSD 4x4 Gram matrices complete the
// pointwise identity
//   |p|^2 - |p~|^2 = (1-|z1|^2) SOS1 + (1-|z2|^2) SOS2 + (1-|z3|^2) |E|^2
// with SOS1, SOS2 sums of at most four squares each. A rational 3x3 matrix V
// assembled from (a, b, E) is unitary on the 2-torus and serves as an
// independent cross-check of the construction.

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>

#include "aglercert/numerics.hpp"
#include "aglercert/poly.hpp"

namespace agler {

class KummertError : public std::runtime_error {
 public:
  explicit KummertError(const std::string& what) : std::runtime_error(what) {}
};

// The trigonometric table fails the positivity precondition of the matrix
// Fejer-Riesz factorization.
class NotPositiveError : public KummertError {
 public:
  NotPositiveError(double margin, const std::string& what) : KummertError(what), margin(margin) {}
  double margin;
};

// An iteration stalled before reaching its tolerance within the step budget.
class NoConvergenceError : public KummertError {
 public:
  NoConvergenceError(double residual, const std::string& what)
      : KummertError(what), residual(residual) {}
  double residual;
};

// Evaluation of a rational matrix at a zero of one of its denominators.
class PoleError : public KummertError {
 public:
  explicit PoleError(const std::string& what) : KummertError(what) {}
};

// Polynomial c0 + c1 z1 + c2 z2 + c3 z1 z2 indexed by subset bitmask:
// bit 0 = z1, bit 1 = z2.
struct MultiAffine2Poly {
  std::array<cplx, 4> coeffs{};

  cplx eval(cplx z1, cplx z2) const;
  // Reflection at multidegree (1,1): coefficient flip plus conjugation.
  MultiAffine2Poly reflect() const;
};

MultiAffine2Poly operator+(const MultiAffine2Poly& x, const MultiAffine2Poly& y);

// Trigonometric polynomial sum of t_{m,n} z1^m z2^n over m,n in {-1,0,1}
// with t_{-m,-n} = conj(t_{m,n}) and t_{0,0} real, hence real-valued on the
// 2-torus. set() writes an entry together with its conjugate mirror, so the
// stored table is Hermitian by construction.
class TrigPoly11 {
 public:
  cplx at(int m, int n) const { return t_[idx(m, n)]; }
  void set(int m, int n, cplx v);
  // Value at a point with nonzero coordinates (negative powers are 1/z).
  cplx eval(cplx z1, cplx z2) const;
  double max_abs() const;

 private:
  static int idx(int m, int n);
  std::array<cplx, 9> t_{};
};

// Two-component polynomial factor E(z1,z2) = (A0 + A1 z1) * (1, z2)^t with
// |E|^2 = t on the 2-torus, up to the regularization shift when flagged.
struct EFactor {
  ComplexMatrix a0;          // 2x2
  ComplexMatrix a1;          // 2x2
  bool regularized = false;  // t00 was shifted by the regularization epsilon
  long iterations = 0;       // fixed-point steps spent by the factorization

  MultiAffine2Poly component(int c) const;  // c in {0, 1}
  std::array<cplx, 2> eval(cplx z1, cplx z2) const;
};

// Rational 3x3 matrix V(z1,z2) built from the split p = a + b z3 and the
// factor E; unitary on the 2-torus away from the zeros of its denominators
// a and a + reflect(b).
struct VEvaluator {
  MultiAffine2Poly a, b;
  MultiAffine2Poly at, bt;             // reflections of a and b
  std::array<MultiAffine2Poly, 2> e;   // components of E
  std::array<MultiAffine2Poly, 2> et;  // their reflections

  // Throws PoleError at zeros of a or a + reflect(b).
  ComplexMatrix eval(cplx z1, cplx z2) const;
};

struct KummertCertificate {
  EFactor e;
  HermitianMatrix g1;  // Gram over the basis 1, z2, z3, z2*z3
  HermitianMatrix g2;  // Gram over the basis 1, z1, z3, z1*z3
  ComplexMatrix h1;    // rows h with h^* h = g1 (at most four)
  ComplexMatrix h2;    // rows h with h^* h = g2 (at most four)
};

// Split p = a(z1,z2) + b(z1,z2) z3.
std::pair<MultiAffine2Poly, MultiAffine2Poly> split_ab(const MultiAffine3Poly& p);

// Coefficient table of |a|^2 - |b|^2 on the 2-torus: entry (m, n) sums
// a_alpha conj(a_beta) - b_alpha conj(b_beta) over exponent pairs with
// alpha - beta = (m, n).
TrigPoly11 t_from_ab(const MultiAffine2Poly& a, const MultiAffine2Poly& b);

// Minimum of t over the 2-torus: writing t = t0(z1) + 2 Re(t1(z1) z2), the
// minimum over z2 leaves the profile t0 - 2|t1|, minimized over the circle.
double trig_positivity_margin(const TrigPoly11& t);

// 2x2 matrix Fejer-Riesz factorization. With T(z1) = C0 + C1 z1 + C1^* conj(z1)
// assembled from t, solves X = C0 - C1^* X^-1 C1 by fixed-point iteration from
// X0 = C0; then A0 is the upper-triangular square root of X and A1 = A0^-* C1,
// so that A(z)^* A(z) = T(z) with A(z) = A0 + A1 z. Requires t >= -tol on the
// 2-torus (NotPositiveError below that). Degenerate tables that stall the
// iteration are retried with t00 shifted by 1e-10 and flagged as regularized;
// NoConvergenceError if the retry stalls as well.
EFactor fejer_riesz_2x2(const TrigPoly11& t, double tol = 1e-13, long max_iter = 100000);

// sup over equally spaced circle samples of ||A(z)^* A(z) - T(z)||_F.
double fejer_riesz_residual(const EFactor& e, const TrigPoly11& t, int samples = 512);

// Assemble the evaluator. Requires a and a + reflect(b) free of zeros in the
// open bidisk (boundary zeros are allowed and become poles of V).
VEvaluator build_v(const MultiAffine2Poly& a, const MultiAffine2Poly& b, const EFactor& e);

// max over random torus samples of ||V(z)^* V(z) - I||_F.
double v_unitarity_residual(const VEvaluator& v, int samples, std::uint64_t seed);

// max abs coefficient of reflect(E)^t E - (a reflect(a) - b reflect(b)),
// an exact polynomial identity for any valid factor.
double reflected_product_residual(const VEvaluator& v);

// Find PSD 4x4 Gram matrices G1 (basis 1, z2, z3, z2*z3) and G2 (basis
// 1, z1, z3, z1*z3) matching every z^alpha conj(z)^beta coefficient of
//   |p|^2 - |p~|^2 - (1-|z3|^2) |E|^2
//     = (1-|z1|^2) v1^* G1 v1 + (1-|z2|^2) v2^* G2 v2.
// A max-margin point of the affine solution family is located first by a
// barrier method; alternating projections with Dykstra correction between the
// affine set and the product PSD cone then finish to a point with constraint
// residual <= tol and cone violation <= tol (NoConvergenceError past
// max_iter). Requires stable p.
std::pair<HermitianMatrix, HermitianMatrix> solve_sos12(const MultiAffine3Poly& p,
                                                        const EFactor& e, double tol = 1e-10,
                                                        long max_iter = 100000);

// Full pipeline: split, build and factor the trigonometric table (with an
// enlarged fixed-point budget, since near-boundary tables converge slowly),
// solve for the Gram matrices, and factor them into rows.
KummertCertificate solve_kummert(const MultiAffine3Poly& p, double tol = 1e-10,
                                 long max_iter = 100000);

// Max relative residual of the decomposition identity over sampled points,
// first half on the 3-torus and second half in the polydisk; SOS3 is
// evaluated as |E(z1,z2)|^2.
double verify_kummert(const MultiAffine3Poly& p, const KummertCertificate& cert, int samples,
                      std::uint64_t seed);

}  // namespace agler
