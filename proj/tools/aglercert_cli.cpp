// Command-line front end: JSON in, JSON out, for the certification library.
//
// Subcommands: symmetrize, check, certificate, verify, radius, degree4,
// kummert, paper-examples. Every report printed to stdout echoes the run
// configuration, including the RNG seed, so runs are reproducible from their
// own output. Exit codes: 0 = certified / verified / computed, 1 = not
// certified (or verification failed), 2 = error (bad input, instability
// where stability is required, solver failure).
//
// Files written with --out never contain timing data, so identical
// configuration and seed produce byte-identical files.

#include <chrono>
#include <cstdint>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "aglercert/json_io.hpp"

namespace {

using namespace agler;

struct Options {
  std::string input;
  std::string out;
  std::string certificate;
  double tol = 1e-9;
  int samples = 200;
  std::uint64_t seed = 1;
  int dmax = 11;
  int degree = 0;
  double rlo = 0.0;
  double rhi = 1.0;
  int steps = 64;
  bool force = false;
};

Json base_config(const std::string& command, const Options& o) {
  Json cfg{{"command", command}, {"tol", o.tol}, {"seed", o.seed}};
  if (!o.input.empty()) cfg["input"] = o.input;
  if (!o.out.empty()) cfg["out"] = o.out;
  return cfg;
}

void emit(const Json& report) { std::cout << report.dump(2) << '\n'; }

int certified_exit(CertStatus s) { return s == CertStatus::NotCertified ? 1 : 0; }

// Shared body of `check` and `certificate`: stability gate, PSD test,
// certificate extraction and verification.
int run_certification(const std::string& command, const Options& o, bool want_certificate) {
  SymMultiAffinePoly p = sym_poly_from_json(load_json_file(o.input));
  Json cfg = base_config(command, o);
  cfg["samples"] = o.samples;

  StabilityReport stab = stability_sym(p);
  if (stab.status == Stability::Unstable) {
    CertReport rep;
    rep.status = CertStatus::NotCertified;
    rep.stability = stab;
    emit(Json{{"config", cfg}, {"report", report_to_json(rep)}});
    std::cerr << "error: input polynomial is unstable (margin " << stab.margin << ")\n";
    return 2;
  }

  CertReport rep = certify(p, o.tol);
  Json out{{"config", cfg}};
  if (rep.status != CertStatus::NotCertified) {
    SOSCertificate cert = extract_certificate(build_agler_matrix(solve_b_tensor(p)));
    rep.residual = verify_certificate(p, cert, o.samples, o.seed);
    Json cert_json = certificate_to_json(cert);
    if (!o.out.empty()) {
      save_json_file(o.out, cert_json);
    } else if (want_certificate) {
      out["certificate"] = cert_json;
    }
  }
  out["report"] = report_to_json(rep);
  emit(out);
  return certified_exit(rep.status);
}

int cmd_symmetrize(const Options& o) {
  UniPoly q = unipoly_from_json(load_json_file(o.input));
  SymMultiAffinePoly p = symmetrize(q, o.degree);
  Json cfg = base_config("symmetrize", o);
  cfg["degree"] = o.degree;
  Json result = sym_poly_to_json(p);
  if (!o.out.empty()) save_json_file(o.out, result);
  emit(Json{{"config", cfg}, {"result", result}});
  return 0;
}

int cmd_verify(const Options& o) {
  Json poly_json = load_json_file(o.input);
  Json cert_json = load_json_file(o.certificate);
  Json cfg = base_config("verify", o);
  cfg["samples"] = o.samples;
  cfg["certificate"] = o.certificate;

  double residual = 0.0;
  if (cert_json.contains("E")) {
    residual = verify_kummert(poly3_from_json(poly_json), kummert_from_json(cert_json), o.samples,
                              o.seed);
  } else if (cert_json.contains("vectors")) {
    residual = verify_certificate(sym_poly_from_json(poly_json),
                                  certificate_from_json(cert_json), o.samples, o.seed);
  } else {
    throw JsonError("certificate: expected \"vectors\" or \"E\"");
  }
  bool pass = residual <= o.tol;
  Json out{{"config", cfg}, {"residual", residual}, {"pass", pass}};
  if (!o.out.empty()) save_json_file(o.out, out);
  emit(out);
  return pass ? 0 : 1;
}

int cmd_radius(const Options& o) {
  SymMultiAffinePoly p = sym_poly_from_json(load_json_file(o.input));
  RadiusResult r = agler_radius(p, o.rlo, o.rhi, o.steps, o.tol);
  Json cfg = base_config("radius", o);
  cfg["rlo"] = o.rlo;
  cfg["rhi"] = o.rhi;
  cfg["steps"] = o.steps;
  Json result = radius_to_json(r);
  if (!o.out.empty()) save_json_file(o.out, result);
  emit(Json{{"config", cfg}, {"result", result}});
  return r.radius > 0.0 ? 0 : 1;
}

int cmd_degree4(const Options& o) {
  SymMultiAffinePoly p = sym_poly_from_json(load_json_file(o.input));
  Degree4ClosedForm r = degree4_closed_form(p, o.tol);
  Json result = degree4_to_json(r);
  if (!o.out.empty()) save_json_file(o.out, result);
  emit(Json{{"config", base_config("degree4", o)}, {"result", result}});
  return r.pass ? 0 : 1;
}

int cmd_kummert(const Options& o) {
  constexpr double kResidualPass = 1e-6;
  MultiAffine3Poly p = poly3_from_json(load_json_file(o.input));
  KummertCertificate cert = solve_kummert(p, o.tol);
  double residual = verify_kummert(p, cert, o.samples, o.seed);
  Json cfg = base_config("kummert", o);
  cfg["samples"] = o.samples;
  Json cert_json = kummert_to_json(cert);
  Json out{{"config", cfg},
           {"report", Json{{"residual", residual},
                           {"regularized", cert.e.regularized},
                           {"iterations", cert.e.iterations}}}};
  if (!o.out.empty()) {
    save_json_file(o.out, cert_json);
  } else {
    out["certificate"] = cert_json;
  }
  emit(out);
  return residual <= kResidualPass ? 0 : 1;
}

int cmd_paper_examples(const Options& o) {
  if (o.dmax < 3) throw CertError("paper-examples: --dmax must be at least 3");
  if (o.dmax > 11 && !o.force) {
    throw CertError("paper-examples: --dmax above 11 needs --force (expect long runtimes)");
  }
  UniPoly one_minus_z;
  one_minus_z.coeffs = {cplx(1.0, 0.0), cplx(-1.0, 0.0)};

  Json rows = Json::array();
  bool all_certified = true;
  for (int d = 3; d <= o.dmax; ++d) {
    SymMultiAffinePoly p = symmetrize(one_minus_z, d);
    auto t0 = std::chrono::steady_clock::now();
    CertReport rep = certify(p, o.tol);
    auto t1 = std::chrono::steady_clock::now();
    double ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
    rows.push_back(Json{{"d", d},
                        {"status", to_string(rep.status)},
                        {"min_eigenvalue", rep.min_eigenvalue},
                        {"runtime_ms", ms}});
    all_certified = all_certified && rep.status != CertStatus::NotCertified;
  }
  Json cfg = base_config("paper-examples", o);
  cfg["dmax"] = o.dmax;
  if (!o.out.empty()) {
    // The file copy omits runtimes so repeated runs are byte-identical.
    Json stable_rows = rows;
    for (Json& row : stable_rows) row.erase("runtime_ms");
    save_json_file(o.out, Json{{"config", cfg}, {"rows", stable_rows}});
  }
  emit(Json{{"config", cfg}, {"rows", rows}});
  return all_certified ? 0 : 1;
}

void add_common(CLI::App* cmd, Options& o, bool with_samples) {
  cmd->add_option("--tol", o.tol, "Numerical tolerance for this command");
  cmd->add_option("--seed", o.seed, "RNG seed recorded in the output");
  cmd->add_option("--out", o.out, "Write the primary result to this file");
  if (with_samples) {
    cmd->add_option("--samples", o.samples, "Sample points for residual checks");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Certification toolkit for stable polynomials on the polydisk"};
  app.require_subcommand(1);
  Options o;

  CLI::App* symmetrize = app.add_subcommand(
      "symmetrize", "Symmetrize a one-variable polynomial to a multi-affine one");
  symmetrize->add_option("input", o.input, "One-variable polynomial JSON")->required();
  symmetrize->add_option("--degree", o.degree, "Target number of variables")->required();
  add_common(symmetrize, o, false);

  CLI::App* check =
      app.add_subcommand("check", "Decide the denominator property for a symmetric polynomial");
  check->add_option("input", o.input, "Symmetric polynomial JSON")->required();
  add_common(check, o, true);

  CLI::App* certificate = app.add_subcommand(
      "certificate", "Produce and verify a sum-of-squares certificate");
  certificate->add_option("input", o.input, "Symmetric polynomial JSON")->required();
  add_common(certificate, o, true);

  CLI::App* verify = app.add_subcommand("verify", "Check a certificate against a polynomial");
  verify->add_option("input", o.input, "Polynomial JSON")->required();
  verify->add_option("--certificate", o.certificate, "Certificate JSON")->required();
  add_common(verify, o, true);

  CLI::App* radius = app.add_subcommand("radius", "Scan for the largest certified scaling radius");
  radius->add_option("input", o.input, "Symmetric polynomial JSON")->required();
  radius->add_option("--rlo", o.rlo, "Scan start");
  radius->add_option("--rhi", o.rhi, "Scan end");
  radius->add_option("--steps", o.steps, "Grid points in the scan");
  add_common(radius, o, false);

  CLI::App* degree4 = app.add_subcommand(
      "degree4", "Closed-form scalar test equivalent to the 4-variable matrix test");
  degree4->add_option("input", o.input, "Symmetric polynomial JSON (d = 4)")->required();
  add_common(degree4, o, false);

  CLI::App* kummert = app.add_subcommand(
      "kummert", "Constructive three-variable decomposition certificate");
  kummert->add_option("input", o.input, "Three-variable polynomial JSON")->required();
  add_common(kummert, o, true);

  CLI::App* paper = app.add_subcommand(
      "paper-examples", "Certify the symmetrizations of 1 - z for d = 3..dmax");
  paper->add_option("--dmax", o.dmax, "Largest number of variables (cap 11)");
  paper->add_flag("--force", o.force, "Allow --dmax above 11");
  add_common(paper, o, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  // Commands whose --tol means something other than the PSD band get their
  // own default when the flag was not supplied.
  auto tol_default = [&o](CLI::App* cmd, double value) {
    if (cmd->parsed() && cmd->get_option("--tol")->count() == 0) o.tol = value;
  };
  tol_default(verify, 1e-8);   // residual pass threshold
  tol_default(radius, 1e-6);   // bisection interval width
  tol_default(kummert, 1e-10); // solver constraint residual

  try {
    if (symmetrize->parsed()) return cmd_symmetrize(o);
    if (check->parsed()) return run_certification("check", o, false);
    if (certificate->parsed()) return run_certification("certificate", o, true);
    if (verify->parsed()) return cmd_verify(o);
    if (radius->parsed()) return cmd_radius(o);
    if (degree4->parsed()) return cmd_degree4(o);
    if (kummert->parsed()) return cmd_kummert(o);
    if (paper->parsed()) return cmd_paper_examples(o);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
