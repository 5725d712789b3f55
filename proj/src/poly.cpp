#include "aglercert/poly.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

namespace agler {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Phase factor z/|z|, or 1 for z = 0.
cplx unit(cplx z) {
  double a = std::abs(z);
  return a > 0.0 ? z / a : cplx(1.0, 0.0);
}

}  // namespace

int UniPoly::degree() const {
  for (int j = static_cast<int>(coeffs.size()) - 1; j >= 0; --j) {
    if (coeffs[static_cast<std::size_t>(j)] != cplx(0.0, 0.0)) return j;
  }
  return 0;
}

cplx UniPoly::eval(cplx z) const {
  cplx acc(0.0, 0.0);
  for (std::size_t j = coeffs.size(); j-- > 0;) acc = acc * z + coeffs[j];
  return acc;
}

cplx MultiAffine3Poly::eval(cplx z1, cplx z2, cplx z3) const {
  cplx acc(0.0, 0.0);
  for (int m = 0; m < 8; ++m) {
    cplx term = coeffs[static_cast<std::size_t>(m)];
    if (m & 1) term *= z1;
    if (m & 2) term *= z2;
    if (m & 4) term *= z3;
    acc += term;
  }
  return acc;
}

MultiAffine3Poly MultiAffine3Poly::reflect() const {
  MultiAffine3Poly out;
  for (int m = 0; m < 8; ++m) {
    out.coeffs[static_cast<std::size_t>(m)] = std::conj(coeffs[static_cast<std::size_t>(7 - m)]);
  }
  return out;
}

std::string to_string(Stability s) {
  switch (s) {
    case Stability::StrictlyStable: return "StrictlyStable";
    case Stability::BoundaryStable: return "BoundaryStable";
    case Stability::Unstable: return "Unstable";
  }
  return "Unknown";
}

SymMultiAffinePoly symmetrize(const UniPoly& q, int d) {
  if (d < 1) throw PolyError("symmetrize: number of variables must be positive");
  if (q.degree() > d) throw PolyError("symmetrize: polynomial degree exceeds variable count");
  SymMultiAffinePoly p;
  p.d = d;
  p.weights.assign(static_cast<std::size_t>(d) + 1, cplx(0.0, 0.0));
  std::size_t n = std::min(q.coeffs.size(), p.weights.size());
  std::copy(q.coeffs.begin(), q.coeffs.begin() + static_cast<std::ptrdiff_t>(n),
            p.weights.begin());
  return p;
}

SymMultiAffinePoly reflect(const SymMultiAffinePoly& p) {
  SymMultiAffinePoly out;
  out.d = p.d;
  out.weights.resize(p.weights.size());
  for (std::size_t j = 0; j < p.weights.size(); ++j) {
    out.weights[j] = std::conj(p.weights[p.weights.size() - 1 - j]);
  }
  return out;
}

cplx eval_sym(const SymMultiAffinePoly& p, const std::vector<cplx>& z) {
  if (p.d < 1 || p.weights.size() != static_cast<std::size_t>(p.d) + 1) {
    throw PolyError("eval_sym: malformed polynomial");
  }
  if (p.d > 30) throw PolyError("eval_sym: too many variables for subset enumeration");
  if (z.size() != static_cast<std::size_t>(p.d)) {
    throw PolyError("eval_sym: wrong number of coordinates");
  }
  std::vector<cplx> scaled(p.weights.size());
  for (std::size_t j = 0; j < scaled.size(); ++j) {
    scaled[j] = p.weights[j] / static_cast<double>(binomial(p.d, static_cast<int>(j)));
  }
  cplx acc(0.0, 0.0);
  for (std::uint32_t mask = 0; mask < (1u << p.d); ++mask) {
    cplx prod(1.0, 0.0);
    for (int k = 0; k < p.d; ++k) {
      if (mask & (1u << k)) prod *= z[static_cast<std::size_t>(k)];
    }
    acc += scaled[static_cast<std::size_t>(std::popcount(mask))] * prod;
  }
  return acc;
}

UniPoly diagonal_restriction(const SymMultiAffinePoly& p) {
  return UniPoly{p.weights};
}

SymMultiAffinePoly scale_radius(const SymMultiAffinePoly& p, double r) {
  SymMultiAffinePoly out = p;
  double powr = 1.0;
  for (std::size_t j = 0; j < out.weights.size(); ++j) {
    out.weights[j] *= powr;
    powr *= r;
  }
  return out;
}

StabilityReport stability_univariate(const UniPoly& q, double eps_stab) {
  StabilityReport rep;
  int deg = q.degree();
  if (deg == 0) {
    cplx c0 = q.coeffs.empty() ? cplx(0.0, 0.0) : q.coeffs[0];
    if (c0 == cplx(0.0, 0.0)) {
      rep.status = Stability::Unstable;
      rep.margin = -1.0;
      rep.witness = {cplx(0.0, 0.0)};
    } else {
      rep.status = Stability::StrictlyStable;
      rep.margin = kInf;
    }
    return rep;
  }
  std::vector<cplx> trimmed(q.coeffs.begin(), q.coeffs.begin() + deg + 1);
  std::vector<cplx> roots = poly_roots(trimmed);
  std::size_t best = 0;
  for (std::size_t k = 1; k < roots.size(); ++k) {
    if (std::abs(roots[k]) < std::abs(roots[best])) best = k;
  }
  rep.margin = std::abs(roots[best]) - 1.0;
  rep.witness = {roots[best]};
  if (rep.margin > eps_stab) {
    rep.status = Stability::StrictlyStable;
  } else if (rep.margin >= -eps_stab) {
    rep.status = Stability::BoundaryStable;
  } else {
    rep.status = Stability::Unstable;
  }
  return rep;
}

StabilityReport stability_sym(const SymMultiAffinePoly& p, double eps_stab) {
  StabilityReport rep = stability_univariate(diagonal_restriction(p), eps_stab);
  if (rep.witness.size() == 1) {
    // A zero of the diagonal restriction gives a polydisk point (z,...,z).
    rep.witness.assign(static_cast<std::size_t>(p.d), rep.witness[0]);
  }
  return rep;
}

double stability_radius(const SymMultiAffinePoly& p) {
  UniPoly diag = diagonal_restriction(p);
  int deg = diag.degree();
  if (deg == 0) {
    if (diag.coeffs.empty() || diag.coeffs[0] == cplx(0.0, 0.0)) return 0.0;
    return kInf;
  }
  std::vector<cplx> trimmed(diag.coeffs.begin(), diag.coeffs.begin() + deg + 1);
  std::vector<cplx> roots = poly_roots(trimmed);
  double rmin = kInf;
  for (const cplx& r : roots) rmin = std::min(rmin, std::abs(r));
  return rmin;
}

double torus_min_deg1(double u0, cplx u1) { return u0 - 2.0 * std::abs(u1); }

double torus_min_deg1(const std::function<double(double)>& profile, double* argmin) {
  constexpr int kGrid = 4096;
  const double two_pi = Rng::two_pi();
  double best_val = kInf;
  int best_k = 0;
  for (int k = 0; k < kGrid; ++k) {
    double v = profile(two_pi * k / kGrid);
    if (v < best_val) {
      best_val = v;
      best_k = k;
    }
  }
  double lo = two_pi * (best_k - 1) / kGrid;
  double hi = two_pi * (best_k + 1) / kGrid;
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - invphi * (hi - lo);
  double x2 = lo + invphi * (hi - lo);
  double f1 = profile(x1);
  double f2 = profile(x2);
  while (hi - lo > 1e-12) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - invphi * (hi - lo);
      f1 = profile(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + invphi * (hi - lo);
      f2 = profile(x2);
    }
  }
  double xm = 0.5 * (lo + hi);
  double fm = profile(xm);
  if (best_val < fm) {
    fm = best_val;
    xm = two_pi * best_k / kGrid;
  }
  if (argmin != nullptr) *argmin = xm;
  return fm;
}

StabilityReport stability_3var(const MultiAffine3Poly& p, double eps_stab) {
  const std::array<cplx, 8>& c = p.coeffs;
  StabilityReport rep;

  bool all_zero = true;
  for (const cplx& v : c) {
    if (v != cplx(0.0, 0.0)) all_zero = false;
  }
  if (all_zero) {
    rep.status = Stability::Unstable;
    rep.margin = -1.0;
    rep.witness = {cplx(0.0, 0.0), cplx(0.0, 0.0), cplx(0.0, 0.0)};
    return rep;
  }

  // Layer 1: z1 -> p(z1, 0, 0) = c0 + c1 z1 must be zero-free on the disk.
  double m1 = std::norm(c[0]) - std::norm(c[1]);
  // Layer 2: a(z1, z2) = p(z1, z2, 0) = cc(z1) + ee(z1) z2 needs
  // |cc|^2 - |ee|^2 > 0 on the circle; that function is u0 + 2 Re(u1 z1).
  double u0 = std::norm(c[0]) + std::norm(c[1]) - std::norm(c[2]) - std::norm(c[3]);
  cplx u1 = std::conj(c[0]) * c[1] - std::conj(c[2]) * c[3];
  double m2 = torus_min_deg1(u0, u1);
  // Layer 3: with a = p(.,.,0) and b the z3-part, |a|^2 - |b|^2 on the
  // 2-torus is sum_{m,n} t_{m,n} z1^m z2^n with m,n in {-1,0,1}. For fixed
  // z1 it is t0(z1) + 2 Re(t1(z1) z2), so its z2-minimum has a 1-D profile.
  cplx t[3][3];  // t[m+1][n+1]
  for (int m = -1; m <= 1; ++m) {
    for (int n = -1; n <= 1; ++n) {
      cplx acc(0.0, 0.0);
      for (int alpha = 0; alpha < 4; ++alpha) {
        for (int beta = 0; beta < 4; ++beta) {
          int dm = (alpha & 1) - (beta & 1);
          int dn = ((alpha >> 1) & 1) - ((beta >> 1) & 1);
          if (dm != m || dn != n) continue;
          std::size_t ai = static_cast<std::size_t>(alpha);
          std::size_t bi = static_cast<std::size_t>(beta);
          acc += c[ai] * std::conj(c[bi]) - c[ai + 4] * std::conj(c[bi + 4]);
        }
      }
      t[m + 1][n + 1] = acc;
    }
  }
  auto t_row = [&t](int n, cplx z1) {
    return t[0][n + 1] * std::conj(z1) + t[1][n + 1] + t[2][n + 1] * z1;
  };
  auto profile = [&t_row](double theta) {
    cplx z1 = std::polar(1.0, theta);
    return t_row(0, z1).real() - 2.0 * std::abs(t_row(1, z1));
  };
  double theta3 = 0.0;
  double m3 = torus_min_deg1(profile, &theta3);

  rep.margin = std::min({m1, m2, m3});
  if (rep.margin > eps_stab) {
    rep.status = Stability::StrictlyStable;
  } else if (rep.margin >= -eps_stab) {
    rep.status = Stability::BoundaryStable;
  } else {
    rep.status = Stability::Unstable;
  }

  // Witness at the binding layer. When the margin is nonpositive the
  // constructed point is an actual zero of the corresponding restriction.
  // Ties within rounding noise prefer the lowest layer, whose witness is
  // exact; a minimizer found by the 1-D search in a degenerate flat valley
  // is only accurate to the square root of the evaluation noise.
  double scale = 0.0;
  for (const cplx& v : c) scale += std::norm(v);
  double slack = 1e-12 * std::max(1.0, scale);
  if (m1 <= rep.margin + slack) {
    cplx z1 = (std::norm(c[1]) > 0.0 && m1 <= 0.0) ? -c[0] / c[1]
                                                   : -unit(c[0] * std::conj(c[1]));
    rep.witness = {z1, cplx(0.0, 0.0), cplx(0.0, 0.0)};
  } else if (m2 <= rep.margin + slack) {
    cplx z1 = -unit(std::conj(u1));
    cplx cc = c[0] + c[1] * z1;
    cplx ee = c[2] + c[3] * z1;
    cplx z2 = (std::norm(ee) > 0.0 && m2 <= 0.0) ? -cc / ee : -unit(cc * std::conj(ee));
    rep.witness = {z1, z2, cplx(0.0, 0.0)};
  } else {
    cplx z1 = std::polar(1.0, theta3);
    cplx z2 = -unit(std::conj(t_row(1, z1)));
    cplx a = p.eval(z1, z2, cplx(0.0, 0.0));
    cplx b = c[4] + c[5] * z1 + c[6] * z2 + c[7] * z1 * z2;
    cplx z3 = (std::norm(b) > 0.0 && m3 <= 0.0) ? -a / b : -unit(a * std::conj(b));
    rep.witness = {z1, z2, z3};
  }
  return rep;
}

UniPoly random_stable_unipoly(Rng& rng, int degree, bool real_coeffs) {
  if (degree < 0) throw PolyError("random_stable_unipoly: negative degree");
  std::vector<cplx> roots;
  roots.reserve(static_cast<std::size_t>(degree));
  if (real_coeffs) {
    const double pi = Rng::two_pi() / 2.0;
    for (int k = 0; k < degree / 2; ++k) {
      double r = rng.uniform(1.05, 3.0);
      double theta = rng.uniform(0.0, pi);
      roots.push_back(std::polar(r, theta));
      roots.push_back(std::polar(r, -theta));
    }
    if (degree % 2 != 0) {
      double r = rng.uniform(1.05, 3.0);
      roots.push_back(rng.uniform() < 0.5 ? -r : r);
    }
  } else {
    for (int k = 0; k < degree; ++k) {
      double r = rng.uniform(1.05, 3.0);
      roots.push_back(std::polar(r, rng.uniform(0.0, Rng::two_pi())));
    }
  }
  // q(z) = prod_k (1 - z / r_k), so q(0) = 1 and all roots lie outside the disk.
  std::vector<cplx> coeffs{cplx(1.0, 0.0)};
  for (const cplx& r : roots) {
    std::vector<cplx> next(coeffs.size() + 1, cplx(0.0, 0.0));
    for (std::size_t j = 0; j < coeffs.size(); ++j) {
      next[j] += coeffs[j];
      next[j + 1] -= coeffs[j] / r;
    }
    coeffs = std::move(next);
  }
  if (real_coeffs) {
    for (cplx& v : coeffs) v = cplx(v.real(), 0.0);
  }
  return UniPoly{std::move(coeffs)};
}

MultiAffine3Poly random_stable_3var(Rng& rng, double eps_stab) {
  for (int attempt = 0; attempt < 1000; ++attempt) {
    MultiAffine3Poly p;
    p.coeffs[0] = cplx(1.0, 0.0) + rng.disk(0.25);
    for (std::size_t m = 1; m < 8; ++m) p.coeffs[m] = rng.disk(0.25);
    if (stability_3var(p, eps_stab).status == Stability::StrictlyStable) return p;
  }
  throw PolyError("random_stable_3var: rejection sampling failed to converge");
}

}  // namespace agler
