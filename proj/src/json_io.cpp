#include "aglercert/json_io.hpp"

#include <fstream>
#include <limits>
#include <sstream>
#include <vector>

namespace agler {

namespace {

const Json& require(const Json& j, const char* key, const std::string& what) {
  if (!j.is_object()) throw JsonError(what + ": expected an object");
  auto it = j.find(key);
  if (it == j.end()) throw JsonError(what + ": missing key \"" + key + "\"");
  return *it;
}

double number_from_json(const Json& j, const std::string& what) {
  if (j.is_null()) return std::numeric_limits<double>::infinity();  // non-finite round trip
  if (!j.is_number()) throw JsonError(what + ": expected a number");
  return j.get<double>();
}

int int_from_json(const Json& j, const std::string& what) {
  if (!j.is_number_integer()) throw JsonError(what + ": expected an integer");
  return j.get<int>();
}

Json cvec_to_json(const std::vector<cplx>& v) {
  Json out = Json::array();
  for (cplx c : v) out.push_back(complex_to_json(c));
  return out;
}

std::vector<cplx> cvec_from_json(const Json& j, const std::string& what) {
  if (!j.is_array()) throw JsonError(what + ": expected an array");
  std::vector<cplx> out;
  out.reserve(j.size());
  for (const Json& e : j) out.push_back(complex_from_json(e, what));
  return out;
}

CertStatus cert_status_from_json(const Json& j, const std::string& what) {
  if (!j.is_string()) throw JsonError(what + ": expected a status string");
  std::string s = j.get<std::string>();
  for (CertStatus c :
       {CertStatus::AglerDenominator, CertStatus::Boundary, CertStatus::NotCertified}) {
    if (s == to_string(c)) return c;
  }
  throw JsonError(what + ": unknown status \"" + s + "\"");
}

HermitianMatrix hermitian_from_rows(const ComplexMatrix& m, const std::string& what) {
  if (m.rows() != m.cols()) throw JsonError(what + ": expected a square matrix");
  int n = m.rows();
  double scale = 1.0;
  for (int j = 0; j < n; ++j) {
    for (int k = 0; k < n; ++k) scale = std::max(scale, std::abs(m(j, k)));
  }
  HermitianMatrix h(n);
  for (int j = 0; j < n; ++j) {
    for (int k = j; k < n; ++k) {
      if (std::abs(m(k, j) - std::conj(m(j, k))) > 1e-12 * scale) {
        throw JsonError(what + ": matrix is not Hermitian");
      }
      h.set(j, k, m(j, k));
    }
  }
  return h;
}

ComplexMatrix fixed_size_matrix(const Json& j, int rows, int cols, const std::string& what) {
  ComplexMatrix m = matrix_from_json(j, what);
  if (m.rows() != rows || m.cols() != cols) {
    throw JsonError(what + ": expected a " + std::to_string(rows) + "x" + std::to_string(cols) +
                    " matrix");
  }
  return m;
}

}  // namespace

Json complex_to_json(cplx v) { return Json::array({v.real(), v.imag()}); }

cplx complex_from_json(const Json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    throw JsonError(what + ": expected a two-element array [re, im]");
  }
  return cplx(j[0].get<double>(), j[1].get<double>());
}

Json unipoly_to_json(const UniPoly& p) { return Json{{"coeffs", cvec_to_json(p.coeffs)}}; }

UniPoly unipoly_from_json(const Json& j) {
  UniPoly p;
  p.coeffs = cvec_from_json(require(j, "coeffs", "polynomial"), "polynomial coefficient");
  if (p.coeffs.empty()) throw JsonError("polynomial: \"coeffs\" must be non-empty");
  return p;
}

Json sym_poly_to_json(const SymMultiAffinePoly& p) {
  return Json{{"d", p.d}, {"weights", cvec_to_json(p.weights)}};
}

SymMultiAffinePoly sym_poly_from_json(const Json& j) {
  SymMultiAffinePoly p;
  p.d = int_from_json(require(j, "d", "symmetric polynomial"), "symmetric polynomial \"d\"");
  p.weights =
      cvec_from_json(require(j, "weights", "symmetric polynomial"), "symmetric polynomial weight");
  if (p.d < 1 || p.weights.size() != static_cast<std::size_t>(p.d) + 1) {
    throw JsonError("symmetric polynomial: expected d >= 1 and exactly d + 1 weights");
  }
  return p;
}

Json poly3_to_json(const MultiAffine3Poly& p) {
  Json coeffs = Json::array();
  for (cplx c : p.coeffs) coeffs.push_back(complex_to_json(c));
  return Json{{"coeffs", coeffs}};
}

MultiAffine3Poly poly3_from_json(const Json& j) {
  std::vector<cplx> v =
      cvec_from_json(require(j, "coeffs", "3-variable polynomial"), "3-variable coefficient");
  if (v.size() != 8) throw JsonError("3-variable polynomial: expected exactly 8 coefficients");
  MultiAffine3Poly p;
  for (std::size_t m = 0; m < 8; ++m) p.coeffs[m] = v[m];
  return p;
}

Json hermitian_to_json(const HermitianMatrix& m) {
  Json entries = Json::array();
  for (int j = 0; j < m.size(); ++j) {
    for (int k = 0; k < m.size(); ++k) entries.push_back(complex_to_json(m(j, k)));
  }
  return Json{{"n", m.size()}, {"entries", entries}};
}

HermitianMatrix hermitian_from_json(const Json& j) {
  int n = int_from_json(require(j, "n", "Hermitian matrix"), "Hermitian matrix \"n\"");
  std::vector<cplx> entries =
      cvec_from_json(require(j, "entries", "Hermitian matrix"), "Hermitian matrix entry");
  if (n < 0 || entries.size() != static_cast<std::size_t>(n) * static_cast<std::size_t>(n)) {
    throw JsonError("Hermitian matrix: expected n * n entries");
  }
  ComplexMatrix m(n, n);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) m(r, c) = entries[static_cast<std::size_t>(r) * n + c];
  }
  return hermitian_from_rows(m, "Hermitian matrix");
}

Json matrix_to_json(const ComplexMatrix& m) {
  Json rows = Json::array();
  for (int r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(complex_to_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

ComplexMatrix matrix_from_json(const Json& j, const std::string& what) {
  if (!j.is_array()) throw JsonError(what + ": expected an array of rows");
  int rows = static_cast<int>(j.size());
  int cols = rows > 0 && j[0].is_array() ? static_cast<int>(j[0].size()) : 0;
  ComplexMatrix m(rows, cols);
  for (int r = 0; r < rows; ++r) {
    const Json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || static_cast<int>(row.size()) != cols) {
      throw JsonError(what + ": rows must be arrays of equal length");
    }
    for (int c = 0; c < cols; ++c) {
      m(r, c) = complex_from_json(row[static_cast<std::size_t>(c)], what + " entry");
    }
  }
  return m;
}

Json stability_to_json(const StabilityReport& r) {
  return Json{
      {"status", to_string(r.status)}, {"margin", r.margin}, {"witness", cvec_to_json(r.witness)}};
}

StabilityReport stability_from_json(const Json& j) {
  StabilityReport r;
  const Json& status = require(j, "status", "stability report");
  if (!status.is_string()) throw JsonError("stability report: expected a status string");
  std::string s = status.get<std::string>();
  bool found = false;
  for (Stability v : {Stability::StrictlyStable, Stability::BoundaryStable, Stability::Unstable}) {
    if (s == to_string(v)) {
      r.status = v;
      found = true;
    }
  }
  if (!found) throw JsonError("stability report: unknown status \"" + s + "\"");
  r.margin = number_from_json(require(j, "margin", "stability report"), "stability margin");
  r.witness = cvec_from_json(require(j, "witness", "stability report"), "stability witness");
  return r;
}

Json report_to_json(const CertReport& r) {
  Json out{{"status", to_string(r.status)},
           {"min_eigenvalue", r.min_eigenvalue},
           {"matrix_norm", r.matrix_norm},
           {"stability", stability_to_json(r.stability)}};
  if (r.residual) out["residual"] = *r.residual;
  return out;
}

CertReport report_from_json(const Json& j) {
  CertReport r;
  r.status = cert_status_from_json(require(j, "status", "report"), "report");
  r.min_eigenvalue =
      number_from_json(require(j, "min_eigenvalue", "report"), "report \"min_eigenvalue\"");
  r.matrix_norm = number_from_json(require(j, "matrix_norm", "report"), "report \"matrix_norm\"");
  r.stability = stability_from_json(require(j, "stability", "report"));
  if (j.contains("residual")) {
    r.residual = number_from_json(j.at("residual"), "report \"residual\"");
  }
  return r;
}

Json certificate_to_json(const SOSCertificate& c) {
  Json vectors = Json::object();
  for (std::size_t mask = 0; mask < c.vectors.size(); ++mask) {
    vectors[std::to_string(mask)] = cvec_to_json(c.vectors[mask]);
  }
  return Json{{"d", c.d}, {"rank", c.rank}, {"vectors", vectors}};
}

SOSCertificate certificate_from_json(const Json& j) {
  SOSCertificate c;
  c.d = int_from_json(require(j, "d", "certificate"), "certificate \"d\"");
  c.rank = int_from_json(require(j, "rank", "certificate"), "certificate \"rank\"");
  if (c.d < 1 || c.d > 20 || c.rank < 0) {
    throw JsonError("certificate: \"d\" out of range or negative rank");
  }
  const Json& vectors = require(j, "vectors", "certificate");
  if (!vectors.is_object()) throw JsonError("certificate: \"vectors\" must be an object");
  std::size_t count = std::size_t{1} << (c.d - 1);
  if (vectors.size() != count) {
    throw JsonError("certificate: expected one vector per subset (" + std::to_string(count) + ")");
  }
  c.vectors.assign(count, {});
  for (const auto& [key, value] : vectors.items()) {
    std::size_t mask = 0;
    try {
      mask = std::stoul(key);
    } catch (const std::exception&) {
      throw JsonError("certificate: vector key \"" + key + "\" is not a subset bitmask");
    }
    if (mask >= count) throw JsonError("certificate: vector key \"" + key + "\" out of range");
    std::vector<cplx> v = cvec_from_json(value, "certificate vector");
    if (v.size() != static_cast<std::size_t>(c.rank)) {
      throw JsonError("certificate: vector \"" + key + "\" does not have rank entries");
    }
    c.vectors[mask] = std::move(v);
  }
  return c;
}

Json kummert_to_json(const KummertCertificate& c) {
  return Json{{"E", Json{{"A0", matrix_to_json(c.e.a0)}, {"A1", matrix_to_json(c.e.a1)}}},
              {"G1", matrix_to_json(c.g1.to_complex())},
              {"G2", matrix_to_json(c.g2.to_complex())},
              {"H1", matrix_to_json(c.h1)},
              {"H2", matrix_to_json(c.h2)}};
}

KummertCertificate kummert_from_json(const Json& j) {
  KummertCertificate c;
  const Json& e = require(j, "E", "certificate");
  c.e.a0 = fixed_size_matrix(require(e, "A0", "certificate \"E\""), 2, 2, "certificate \"A0\"");
  c.e.a1 = fixed_size_matrix(require(e, "A1", "certificate \"E\""), 2, 2, "certificate \"A1\"");
  c.g1 = hermitian_from_rows(
      fixed_size_matrix(require(j, "G1", "certificate"), 4, 4, "certificate \"G1\""),
      "certificate \"G1\"");
  c.g2 = hermitian_from_rows(
      fixed_size_matrix(require(j, "G2", "certificate"), 4, 4, "certificate \"G2\""),
      "certificate \"G2\"");
  c.h1 = matrix_from_json(require(j, "H1", "certificate"), "certificate \"H1\"");
  c.h2 = matrix_from_json(require(j, "H2", "certificate"), "certificate \"H2\"");
  if (c.h1.rows() > 0 && c.h1.cols() != 4) throw JsonError("certificate \"H1\": expected 4 columns");
  if (c.h2.rows() > 0 && c.h2.cols() != 4) throw JsonError("certificate \"H2\": expected 4 columns");
  return c;
}

Json radius_to_json(const RadiusResult& r) {
  Json scan = Json::array();
  for (const RadiusScanRow& row : r.scan) {
    scan.push_back(Json{{"r", row.r},
                        {"status", to_string(row.status)},
                        {"min_eigenvalue", row.min_eigenvalue}});
  }
  return Json{{"radius", r.radius}, {"scan", scan}};
}

RadiusResult radius_from_json(const Json& j) {
  RadiusResult r;
  r.radius = number_from_json(require(j, "radius", "radius result"), "radius value");
  const Json& scan = require(j, "scan", "radius result");
  if (!scan.is_array()) throw JsonError("radius result: \"scan\" must be an array");
  for (const Json& row : scan) {
    RadiusScanRow out;
    out.r = number_from_json(require(row, "r", "radius scan row"), "radius scan \"r\"");
    out.status = cert_status_from_json(require(row, "status", "radius scan row"), "radius scan row");
    out.min_eigenvalue = number_from_json(require(row, "min_eigenvalue", "radius scan row"),
                                          "radius scan \"min_eigenvalue\"");
    r.scan.push_back(out);
  }
  return r;
}

Json degree4_to_json(const Degree4ClosedForm& r) {
  return Json{{"lhs", r.lhs}, {"rhs", r.rhs}, {"pass", r.pass}};
}

Degree4ClosedForm degree4_from_json(const Json& j) {
  Degree4ClosedForm r;
  r.lhs = number_from_json(require(j, "lhs", "closed form"), "closed form \"lhs\"");
  r.rhs = number_from_json(require(j, "rhs", "closed form"), "closed form \"rhs\"");
  const Json& pass = require(j, "pass", "closed form");
  if (!pass.is_boolean()) throw JsonError("closed form: \"pass\" must be a boolean");
  r.pass = pass.get<bool>();
  return r;
}

Json parse_json(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& err) {
    throw JsonError(std::string("parse error: ") + err.what());
  }
}

Json load_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw JsonError("cannot open \"" + path + "\" for reading");
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return Json::parse(buf.str());
  } catch (const Json::parse_error& err) {
    throw JsonError("parse error in \"" + path + "\": " + err.what());
  }
}

void save_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw JsonError("cannot open \"" + path + "\" for writing");
  out << j.dump(2) << '\n';
  if (!out) throw JsonError("failed writing \"" + path + "\"");
}

}  // namespace agler
