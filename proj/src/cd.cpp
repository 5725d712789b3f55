#include "aglercert/cd.hpp"

#include <algorithm>

namespace agler {

CDGram cd_gram(const UniPoly& q, int d) {
  if (d < 1) throw PolyError("cd_gram: declared degree must be positive");
  if (q.degree() > d) throw PolyError("cd_gram: declared degree below actual degree");
  auto coeff = [&q, d](int j) -> cplx {
    if (j < 0 || j > d || j >= static_cast<int>(q.coeffs.size())) return cplx(0.0, 0.0);
    return q.coeffs[static_cast<std::size_t>(j)];
  };
  CDGram out;
  out.d = d;
  out.g = HermitianMatrix(d);
  for (int j = 0; j < d; ++j) {
    for (int k = j; k < d; ++k) {
      cplx acc(0.0, 0.0);
      for (int m = 0; m <= std::min(j, k); ++m) {
        acc += coeff(j - m) * std::conj(coeff(k - m)) -
               std::conj(coeff(d - j + m)) * coeff(d - k + m);
      }
      out.g.set(j, k, acc);
    }
  }
  return out;
}

CDFactor cd_factor(const CDGram& gram, double tol) { return psd_factor(gram.g, tol); }

cplx cd_form(const CDGram& gram, cplx z) {
  // Horner in both z and conj(z): sum_j z^j (sum_k G[j][k] conj(z)^k).
  cplx acc(0.0, 0.0);
  for (int j = gram.d - 1; j >= 0; --j) {
    cplx row(0.0, 0.0);
    for (int k = gram.d - 1; k >= 0; --k) row = row * std::conj(z) + gram.g(j, k);
    acc = acc * z + row;
  }
  return acc;
}

}  // namespace agler
