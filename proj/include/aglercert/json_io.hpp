#pragma once
// JSON encodings for the library's value types. Complex numbers are
// two-element arrays [re, im]. Hermitian matrices use {"n", "entries"} with
// a row-major entry list; general (possibly rectangular) matrices are nested
// arrays of rows. Emitted numbers round-trip bit-identically through the
// parser. Parse failures throw JsonError naming the offending field.

#include <cstdint>
#include <string>

#include <json.hpp>

#include "aglercert/certify.hpp"
#include "aglercert/kummert.hpp"
#include "aglercert/numerics.hpp"
#include "aglercert/poly.hpp"

namespace agler {

using Json = nlohmann::json;

class JsonError : public std::runtime_error {
 public:
  explicit JsonError(const std::string& what) : std::runtime_error(what) {}
};

Json complex_to_json(cplx v);
cplx complex_from_json(const Json& j, const std::string& what = "complex number");

// {"coeffs": [[re, im], ...]} ascending powers; at least one coefficient.
Json unipoly_to_json(const UniPoly& p);
UniPoly unipoly_from_json(const Json& j);

// {"d": int, "weights": [[re, im], ...]} with exactly d + 1 weights.
Json sym_poly_to_json(const SymMultiAffinePoly& p);
SymMultiAffinePoly sym_poly_from_json(const Json& j);

// {"coeffs": [[re, im] x 8]} indexed by variable-subset bitmask.
Json poly3_to_json(const MultiAffine3Poly& p);
MultiAffine3Poly poly3_from_json(const Json& j);

// {"n": int, "entries": [[re, im], ...]} row-major, n * n entries.
Json hermitian_to_json(const HermitianMatrix& m);
HermitianMatrix hermitian_from_json(const Json& j);

// Nested rows: [[[re, im], ...], ...]; rows must have equal length.
Json matrix_to_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const Json& j, const std::string& what = "matrix");

// {"status": str, "margin": float, "witness": [[re, im], ...]}.
Json stability_to_json(const StabilityReport& r);
StabilityReport stability_from_json(const Json& j);

// {"status", "min_eigenvalue", "matrix_norm", "stability", "residual"?};
// "residual" is present only when a certificate was verified.
Json report_to_json(const CertReport& r);
CertReport report_from_json(const Json& j);

// {"d": int, "rank": int, "vectors": {"<bitmask>": [[re, im], ...]}} with one
// length-rank vector per subset of [d-1].
Json certificate_to_json(const SOSCertificate& c);
SOSCertificate certificate_from_json(const Json& j);

// {"E": {"A0": 2x2, "A1": 2x2}, "G1": 4x4, "G2": 4x4, "H1": rows, "H2": rows}
// with every matrix encoded as nested rows.
Json kummert_to_json(const KummertCertificate& c);
KummertCertificate kummert_from_json(const Json& j);

// {"radius": float, "scan": [{"r", "status", "min_eigenvalue"}, ...]}.
Json radius_to_json(const RadiusResult& r);
RadiusResult radius_from_json(const Json& j);

// {"lhs": float, "rhs": float, "pass": bool}.
Json degree4_to_json(const Degree4ClosedForm& r);
Degree4ClosedForm degree4_from_json(const Json& j);

// Parse text; the error message includes the byte position of the defect.
Json parse_json(const std::string& text);

// File wrappers: load parses the whole file, save writes 2-space-indented
// JSON with a trailing newline.
Json load_json_file(const std::string& path);
void save_json_file(const std::string& path, const Json& j);

}  // namespace agler
