// Drives the installed command-line binary end to end through temporary
// JSON files. CLI_BINARY_PATH is injected by the build system.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#if defined(__unix__) || defined(__APPLE__)
#include <sys/wait.h>
#endif

#include "aglercert/json_io.hpp"

using namespace agler;
namespace fs = std::filesystem;

namespace {

fs::path work_dir() {
  static fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "aglercert_cli_tests";
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string path_of(const std::string& name) { return (work_dir() / name).string(); }

int run_cli(const std::string& args, const std::string& stdout_name = "stdout.json") {
  std::string cmd = std::string(CLI_BINARY_PATH) + " " + args + " > " + path_of(stdout_name) +
                    " 2> " + path_of("stderr.txt");
  int rc = std::system(cmd.c_str());
#if defined(__unix__) || defined(__APPLE__)
  if (WIFEXITED(rc)) return WEXITSTATUS(rc);
#endif
  return rc;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

Json stdout_json(const std::string& name = "stdout.json") {
  return load_json_file(path_of(name));
}

}  // namespace

TEST_CASE("symmetrize command") {
  write_text(path_of("uni.json"), "{\"coeffs\": [[1,0],[-1,0]]}\n");
  int rc = run_cli("symmetrize " + path_of("uni.json") + " --degree 4 --out " + path_of("sym4.json"));
  CHECK(rc == 0);
  Json report = stdout_json();
  CHECK(report["config"]["command"] == "symmetrize");
  CHECK(report["config"].contains("seed"));
  SymMultiAffinePoly p = sym_poly_from_json(load_json_file(path_of("sym4.json")));
  CHECK(p.d == 4);
  REQUIRE(p.weights.size() == 5);
  CHECK(p.weights[0] == cplx(1.0, 0.0));
  CHECK(p.weights[1] == cplx(-1.0, 0.0));
  CHECK(p.weights[2] == cplx(0.0, 0.0));

  // Degree below the input degree and malformed input both fail cleanly.
  CHECK(run_cli("symmetrize " + path_of("uni.json") + " --degree 0") == 2);
  write_text(path_of("broken.json"), "{\"coeffs\": [[1,0],");
  CHECK(run_cli("symmetrize " + path_of("broken.json") + " --degree 4") == 2);
  CHECK(slurp(path_of("stderr.txt")).find("parse error") != std::string::npos);
}

TEST_CASE("check command certifies the boundary example and rejects unstable input") {
  write_text(path_of("uni.json"), "{\"coeffs\": [[1,0],[-1,0]]}\n");
  REQUIRE(run_cli("symmetrize " + path_of("uni.json") + " --degree 4 --out " + path_of("sym4.json")) == 0);

  int rc = run_cli("check " + path_of("sym4.json"));
  CHECK(rc == 0);
  Json report = stdout_json();
  CertReport rep = report_from_json(report["report"]);
  CHECK(rep.status != CertStatus::NotCertified);
  CHECK(std::abs(rep.min_eigenvalue) <= 1e-8 * std::max(1.0, rep.matrix_norm));
  REQUIRE(rep.residual.has_value());
  CHECK(*rep.residual <= 1e-8);

  // The constant polynomial at d = 5 is an interior certified case.
  write_text(path_of("one5.json"), "{\"d\": 5, \"weights\": [[1,0],[0,0],[0,0],[0,0],[0,0],[0,0]]}\n");
  CHECK(run_cli("check " + path_of("one5.json")) == 0);
  Json one_report = stdout_json();
  CHECK(one_report["report"]["status"] == "AglerDenominator");

  // 1 - 2z has a diagonal root at 1/2: unstable, exit 2, report still printed.
  write_text(path_of("bad.json"), "{\"d\": 3, \"weights\": [[1,0],[-2,0],[0,0],[0,0]]}\n");
  CHECK(run_cli("check " + path_of("bad.json")) == 2);
  Json bad_report = stdout_json();
  CHECK(bad_report["report"]["stability"]["status"] == "Unstable");
}

TEST_CASE("certificate and verify commands round trip through files") {
  write_text(path_of("one4.json"), "{\"d\": 4, \"weights\": [[1,0],[0,0],[0,0],[0,0],[0,0]]}\n");
  int rc = run_cli("certificate " + path_of("one4.json") + " --out " + path_of("cert4.json"));
  CHECK(rc == 0);
  SOSCertificate cert = certificate_from_json(load_json_file(path_of("cert4.json")));
  CHECK(cert.d == 4);
  CHECK(cert.rank >= 1);

  CHECK(run_cli("verify " + path_of("one4.json") + " --certificate " + path_of("cert4.json")) == 0);
  Json ok = stdout_json();
  CHECK(ok["pass"] == true);
  CHECK(ok["residual"].get<double>() <= 1e-8);

  // Doubling one coefficient vector breaks verification.
  Json broken = load_json_file(path_of("cert4.json"));
  for (Json& entry : broken["vectors"]["1"]) {
    entry[0] = entry[0].get<double>() * 3.0 + 1.0;
  }
  save_json_file(path_of("cert4_broken.json"), broken);
  CHECK(run_cli("verify " + path_of("one4.json") + " --certificate " + path_of("cert4_broken.json")) == 1);
  Json fail = stdout_json();
  CHECK(fail["pass"] == false);
  CHECK(fail["residual"].get<double>() > 1e-2);

  // Without --out the certificate is embedded in the stdout report.
  CHECK(run_cli("certificate " + path_of("one4.json")) == 0);
  Json embedded = stdout_json();
  CHECK(embedded.contains("certificate"));
  CHECK(embedded["certificate"]["d"] == 4);
}

TEST_CASE("radius and degree4 commands") {
  write_text(path_of("one3.json"), "{\"d\": 3, \"weights\": [[1,0],[0,0],[0,0],[0,0]]}\n");
  int rc = run_cli("radius " + path_of("one3.json") + " --steps 8");
  CHECK(rc == 0);
  RadiusResult r = radius_from_json(stdout_json()["result"]);
  CHECK(r.radius == doctest::Approx(1.0).epsilon(1e-9));
  REQUIRE(r.scan.size() == 8);
  for (const RadiusScanRow& row : r.scan) CHECK(row.status != CertStatus::NotCertified);

  write_text(path_of("sym4.json"),
             "{\"d\": 4, \"weights\": [[1,0],[-1,0],[0,0],[0,0],[0,0]]}\n");
  CHECK(run_cli("degree4 " + path_of("sym4.json")) == 0);
  Degree4ClosedForm cf = degree4_from_json(stdout_json()["result"]);
  CHECK(cf.lhs == doctest::Approx(7.0).epsilon(1e-12));
  CHECK(cf.rhs == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(cf.pass);
}

TEST_CASE("kummert command produces a verifiable certificate deterministically") {
  write_text(path_of("p3.json"),
             "{\"coeffs\": [[1,0],[-0.3333333333333333,0],[-0.3333333333333333,0],[0,0],"
             "[-0.3333333333333333,0],[0,0],[0,0],[0,0]]}\n");
  int rc = run_cli("kummert " + path_of("p3.json") + " --out " + path_of("kcert.json"));
  CHECK(rc == 0);
  Json report = stdout_json();
  CHECK(report["report"]["residual"].get<double>() <= 1e-6);
  CHECK(report["config"]["seed"] == 1);

  CHECK(run_cli("verify " + path_of("p3.json") + " --certificate " + path_of("kcert.json") +
                " --tol 1e-6") == 0);

  // Same config, same seed: byte-identical certificate files.
  REQUIRE(run_cli("kummert " + path_of("p3.json") + " --out " + path_of("kcert2.json")) == 0);
  CHECK(slurp(path_of("kcert.json")) == slurp(path_of("kcert2.json")));

  // An unstable input is an error.
  write_text(path_of("p3bad.json"),
             "{\"coeffs\": [[1,0],[0,0],[0,0],[0,0],[-2,0],[0,0],[0,0],[0,0]]}\n");
  CHECK(run_cli("kummert " + path_of("p3bad.json")) == 2);
}

TEST_CASE("paper-examples command") {
  int rc = run_cli("paper-examples --dmax 4 --out " + path_of("rows.json"));
  CHECK(rc == 0);
  Json report = stdout_json();
  REQUIRE(report["rows"].size() == 2);
  for (const Json& row : report["rows"]) {
    CHECK(row["status"] != "NotCertified");
    CHECK(row.contains("runtime_ms"));  // stdout rows are timed...
  }
  Json file = load_json_file(path_of("rows.json"));
  for (const Json& row : file["rows"]) {
    CHECK_FALSE(row.contains("runtime_ms"));  // ...file rows are reproducible
  }

  // Beyond the table needs an explicit opt-in.
  CHECK(run_cli("paper-examples --dmax 12") == 2);
}
