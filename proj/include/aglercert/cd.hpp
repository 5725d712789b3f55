#pragma once
// One-variable Gram construction: for a polynomial q of declared degree d
// with reflection qt_j = conj(q_{d-j}), the d x d matrix G defined here
// satisfies
//
//   |q(z)|^2 - |qt(z)|^2 = (1 - |z|^2) * sum_{j,k} G[j][k] z^j conj(z)^k,
//
// and G is positive semidefinite exactly when q has no zeros in the open
// unit disk. Factoring G = Y* Y turns the right-hand side into a sum of
// squares sum_r |h_r(z)|^2 with h_r(z) = sum_j conj(Y[r][j]) z^j.

#include "aglercert/numerics.hpp"
#include "aglercert/poly.hpp"

namespace agler {

struct CDGram {
  int d = 0;          // declared degree; the matrix is d x d
  HermitianMatrix g;  // index range 0..d-1
};

// Telescoped closed form
//   G[j][k] = sum_{m=0}^{min(j,k)} q_{j-m} conj(q_{k-m}) - conj(q_{d-j+m}) q_{d-k+m}
// with out-of-range coefficients read as zero. Requires 1 <= deg(q) <= d
// (constants are allowed too: the formula only pads with zeros).
CDGram cd_gram(const UniPoly& q, int d);

using CDFactor = PsdFactor;

// Positive-semidefinite factorization of the Gram matrix; throws NotPsdError
// when q has a zero inside the disk.
CDFactor cd_factor(const CDGram& gram, double tol = 1e-10);

// sum_{j,k} G[j][k] z^j conj(z)^k, the certificate quadratic form.
cplx cd_form(const CDGram& gram, cplx z);

}  // namespace agler
