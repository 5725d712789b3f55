#pragma once
// Core certification: the coefficient tensor B^i_{j,k} solved from a
// triangular recursion, the 2^{d-1} x 2^{d-1} subset-indexed matrix built
// from it, the positive-semidefiniteness test that decides the denominator
// property, sum-of-squares certificate extraction/verification, the radius
// scan, and the closed-form degree-4 specializations.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "aglercert/cd.hpp"
#include "aglercert/numerics.hpp"
#include "aglercert/poly.hpp"

namespace agler {

class CertError : public std::runtime_error {
 public:
  explicit CertError(const std::string& what) : std::runtime_error(what) {}
};

// Values B^i_{j,k} for 0 <= j,k <= d-1 and max(0, j+k-d+1) <= i <= min(j,k);
// reads outside that range return 0. Satisfies the conjugate pairing
// B^i_{k,j} = conj(B^i_{j,k}) and the reflection symmetry
// B^i_{j,k} = B^{d-1-j-k+i}_{d-1-k,d-1-j}.
struct BTensor {
  int d = 0;
  std::vector<cplx> data;  // dense d x d x d cube, zero-filled out of range

  static bool in_range(int d, int i, int j, int k);
  cplx at(int i, int j, int k) const;
  void set(int i, int j, int k, cplx v);
};

// Triangular recursion, computed in increasing i:
//   B^i_{j,k} = (L(j,k) + i * B^{i-1}_{j-1,k-1}) / (d - j - k + i),
//   L(j,k) = binom(d,j)^-1 binom(d,k)^-1 (p_j conj(p_k) - conj(p_{d-j}) p_{d-k}).
// The divisor is always >= 1, so the solution exists and is unique.
BTensor solve_b_tensor(const SymMultiAffinePoly& p);

// Same recursion driven by the one-variable Gram matrix of the diagonal
// restriction: L(j,k) = binom(d,j)^-1 binom(d,k)^-1 (G[j][k] - G[j-1][k-1])
// with index -1 reading as 0. Agrees with solve_b_tensor up to rounding.
BTensor solve_b_tensor_from_gram(const CDGram& g, int d);

struct AglerMatrix {
  int d = 0;
  HermitianMatrix m;  // 2^{d-1} x 2^{d-1}, subsets of [d-1] as ascending bitmasks
};

// Entry (alpha, beta) = B^{|alpha & beta|}_{|alpha|, |beta|}. The cap keeps
// the 2^{d-1} x 2^{d-1} eigenproblem within the time budget.
AglerMatrix build_agler_matrix(const BTensor& t, int dcap = 12);

enum class CertStatus { AglerDenominator, Boundary, NotCertified };

std::string to_string(CertStatus s);

struct CertReport {
  CertStatus status = CertStatus::NotCertified;
  double min_eigenvalue = 0.0;
  double matrix_norm = 0.0;  // spectral norm of the subset matrix
  StabilityReport stability;
  std::optional<double> residual;  // filled when a certificate was verified
};

// Decides the denominator property for a stable p: builds the subset matrix
// and classifies its minimum eigenvalue against the band tol * max(1, norm).
// Above the band: AglerDenominator; inside: Boundary; below: NotCertified.
// Unstable input is an error (the test presupposes stability).
CertReport certify(const SymMultiAffinePoly& p, double tol = 1e-9);

// Vector coefficients of B(w) = sum_alpha B_alpha w^alpha over subsets of
// [d-1], with <B_alpha, B_beta> reproducing the matrix entries.
struct SOSCertificate {
  int d = 0;
  int rank = 0;
  std::vector<std::vector<cplx>> vectors;  // vectors[mask] in C^rank
};

// Factor the (clipped) matrix as Y*Y and read B_alpha off the conjugated
// column alpha of Y.
SOSCertificate extract_certificate(const AglerMatrix& m, double tol = 1e-10);

// Max over `samples` points (half on the torus, half uniform in the
// polydisk) of |LHS - RHS| / max(1, |LHS|, |RHS|) where
//   LHS = |p(z)|^2 - |reflect(p)(z)|^2,
//   RHS = sum_j (1 - |z_j|^2) * |B(z with coordinate j deleted)|^2.
double verify_certificate(const SymMultiAffinePoly& p, const SOSCertificate& cert, int samples,
                          std::uint64_t seed);

struct RadiusScanRow {
  double r = 0.0;
  CertStatus status = CertStatus::NotCertified;
  double min_eigenvalue = 0.0;
};

struct RadiusResult {
  double radius = 0.0;
  std::vector<RadiusScanRow> scan;
};

// Largest certified scaling radius: certify z -> p(r z) (weights p_j r^j) on
// a `steps`-point grid over [r_lo, r_hi], then bisect at the highest
// certified-to-uncertified transition down to width tol. The scan table is
// returned so non-monotone behavior stays visible. Requires p(0) != 0 and
// r_hi within the stability radius.
RadiusResult agler_radius(const SymMultiAffinePoly& p, double r_lo, double r_hi, int steps,
                          double tol);

struct Degree4ClosedForm {
  double lhs = 0.0;  // 8(|p0|^2 - |p4|^2) - (|p1|^2 - |p3|^2)
  double rhs = 0.0;  // 2|p2 conj(p1) - conj(p2) p3 - 2(p1 conj(p0) - conj(p3) p4)|
  bool pass = false;
};

// Scalar inequality equivalent to the d = 4 matrix test.
Degree4ClosedForm degree4_closed_form(const SymMultiAffinePoly& p, double tol = 1e-9);

struct Degree4Blocks {
  // Cardinality blocks of the subset matrix in the index order
  // {}, {1},{2},{3}, {1,2},{2,3},{1,3}, {1,2,3}: s[j][k] pairs size-j rows
  // with size-k columns.
  std::array<std::array<ComplexMatrix, 4>, 4> s;
  ComplexMatrix conjugated;   // R B R^* in the order above, R = 2 diag(1, C, C, 1)
  ComplexMatrix block_a;      // 4x4 leading block; equals the diagonal's Gram matrix
  ComplexMatrix x_closed;     // closed-form 2x2 reduced matrix
  ComplexMatrix x_extracted;  // transpose of the trailing 2x2 diagonal block
  double off_block_mass = 0.0;          // conjugated-matrix mass outside diag(4,2,2)
  double block_identity_residual = 0.0; // distance to diag(A, X, X^t); ~0 for real weights
};

// d = 4 block reduction: conjugates the subset matrix by the circulant-type
// matrix built from the cube-root-of-unity DFT and regroups indices so the
// result is block diagonal with the 4x4 Gram block and the 2x2 reduced
// matrix. Throws when the off-block mass exceeds 1e-9 * ||B||_F, which would
// mean an internal inconsistency.
Degree4Blocks degree4_blocks(const SymMultiAffinePoly& p);

}  // namespace agler
