#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdint>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

#include "meromat/errors.hpp"
#include "meromat/io.hpp"
#include "meromat/specdensity.hpp"
#include "support.hpp"

using namespace meromat;
using testsupport::cmat;
using testsupport::mdiff;

namespace {

namespace fs = std::filesystem;

fs::path scratch_dir() {
  static fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "meromat_io_tests";
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string scratch(const std::string& name) { return (scratch_dir() / name).string(); }

int run_cli(const std::string& args) {
  std::string cmd = std::string(MEROMAT_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

bool bits_equal(double a, double b) {
  std::uint64_t ba, bb;
  std::memcpy(&ba, &a, sizeof(a));
  std::memcpy(&bb, &b, sizeof(b));
  return ba == bb;
}

nlohmann::json period2_hmm_json() {
  return {{"T", {{"dim", 2}, {"entries", {{0.0, 0.0}, {1.0, 0.0}, {1.0, 0.0}, {0.0, 0.0}}}}},
          {"means", {{1.0, 0.0}, {-1.0, 0.0}}},
          {"second_moments", {1.0, 1.0}}};
}

}  // namespace

TEST_CASE("matrix JSON round trip is bit exact") {
  std::mt19937_64 rng(404);
  std::uniform_real_distribution<double> mant(-1.0, 1.0);
  std::uniform_int_distribution<int> expo(-300, 300);

  ComplexMatrix M(4, 4);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      M(i, j) = Complex(std::ldexp(mant(rng), expo(rng)), std::ldexp(mant(rng), expo(rng)));

  std::string path = scratch("roundtrip.json");
  write_json_file(path, matrix_to_json(M));
  ComplexMatrix back = read_matrix_json(path);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      CHECK(bits_equal(M(i, j).real(), back(i, j).real()));
      CHECK(bits_equal(M(i, j).imag(), back(i, j).imag()));
    }
}

TEST_CASE("matrix JSON rejects malformed payloads") {
  CHECK_THROWS_AS(matrix_from_json(nlohmann::json{{"dim", 2}, {"entries", {1, 2}}}),
                  Error);
  CHECK_THROWS_AS(matrix_from_json(nlohmann::json{{"entries", nlohmann::json::array()}}),
                  Error);
  try {
    matrix_from_json(nlohmann::json{{"dim", 0}, {"entries", nlohmann::json::array()}});
    FAIL("expected ParseError");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ParseError);
  }
}

TEST_CASE("HMM JSON carries the emission sampler spec") {
  nlohmann::json j = period2_hmm_json();
  j["emissions"] = {{"type", "gaussian"}};
  HiddenMarkovModel hmm = hmm_from_json(j);
  CHECK(hmm.states() == 2);
  REQUIRE(hmm.emissions.has_value());
  CHECK(hmm.emissions->type == EmissionType::Gaussian);

  auto round = hmm_from_json(hmm_to_json(hmm));
  CHECK(mdiff(round.T.matrix(), hmm.T.matrix()) == 0.0);
  CHECK((round.means - hmm.means).norm() == 0.0);

  j["emissions"]["type"] = "cauchy";
  CHECK_THROWS_AS(hmm_from_json(j), Error);
}

TEST_CASE("Laurent JSON format") {
  nlohmann::json j = nlohmann::json::array(
      {{{"lambda", {2.0, 0.0}}, {"coeffs", {{0.5, 0.0}, {-0.25, 0.0}}}}});
  LocalFunctionData data = laurent_from_json(j);
  REQUIRE(data.entries.size() == 1);
  CHECK(data.entries[0].lambda == Complex(2.0, 0.0));
  REQUIRE(data.entries[0].coeffs.size() == 2);
  CHECK(data.entries[0].coeffs[1] == Complex(-0.25, 0.0));
}

TEST_CASE("CSV formatting survives a parse round trip") {
  CsvTable table;
  table.header = {"a", "b"};
  table.rows.push_back({1.0 / 3.0, 6.02214076e23});
  table.rows.push_back({-0.0, 5e-324});
  std::string path = scratch("table.csv");
  write_csv(path, table);
  auto rows = read_csv(path);
  REQUIRE(rows.size() == 2);
  CHECK(bits_equal(rows[0][0], 1.0 / 3.0));
  CHECK(bits_equal(rows[0][1], 6.02214076e23));
  CHECK(bits_equal(rows[1][1], 5e-324));
}

TEST_CASE("cli: decompose reports the Jordan structure") {
  ComplexMatrix A = cmat(2, {2.0, 1.0, 0.0, 2.0});
  std::string in = scratch("shear.json");
  std::string out = scratch("shear_report.json");
  write_json_file(in, matrix_to_json(A));

  REQUIRE(run_cli("--out " + out + " decompose " + in) == 0);
  nlohmann::json report = read_json_file(out);
  REQUIRE(report["spectrum"].size() == 1);
  CHECK(report["spectrum"][0]["algebraic"] == 2);
  CHECK(report["spectrum"][0]["geometric"] == 1);
  CHECK(report["spectrum"][0]["index"] == 2);
  CHECK(std::abs(report["spectrum"][0]["lambda"][0].get<double>() - 2.0) < 1e-12);

  // Identity: the sole projector is the identity matrix.
  std::string id_in = scratch("identity.json");
  std::string id_out = scratch("identity_report.json");
  write_json_file(id_in, matrix_to_json(ComplexMatrix::Identity(3, 3)));
  REQUIRE(run_cli("--out " + id_out + " decompose " + id_in) == 0);
  nlohmann::json id_report = read_json_file(id_out);
  ComplexMatrix P = matrix_from_json(id_report["projectors"][0]);
  CHECK(mdiff(P, ComplexMatrix::Identity(3, 3)) < 1e-12);
}

TEST_CASE("cli: decompose flags the defective counting generator") {
  ComplexMatrix G = ComplexMatrix::Zero(4, 4);
  for (int i = 0; i < 4; ++i) {
    G(i, i) = -1.0;
    if (i < 3) G(i, i + 1) = 1.0;
  }
  std::string in = scratch("poisson_g.json");
  std::string out = scratch("poisson_report.json");
  write_json_file(in, matrix_to_json(G));
  REQUIRE(run_cli("--out " + out + " decompose " + in) == 0);
  nlohmann::json report = read_json_file(out);
  CHECK(report["spectrum"][0]["index"] == 4);
}

TEST_CASE("cli: funcalc functions and the drazin shift flag") {
  ComplexMatrix A = cmat(2, {2.0, 1.0, 0.0, 2.0});
  std::string in = scratch("fc_in.json");
  std::string out = scratch("fc_out.json");
  write_json_file(in, matrix_to_json(A));
  REQUIRE(run_cli("--out " + out + " funcalc " + in + " --fn power:3") == 0);
  CHECK(mdiff(read_matrix_json(out), cmat(2, {8.0, 12.0, 0.0, 8.0})) < 1e-10);

  ComplexMatrix D = ComplexMatrix::Zero(2, 2);
  D(0, 0) = 2.0;
  std::string din = scratch("diag20.json");
  write_json_file(din, matrix_to_json(D));
  REQUIRE(run_cli("--out " + out + " funcalc " + din + " --fn drazin") == 0);
  ComplexMatrix expect = ComplexMatrix::Zero(2, 2);
  expect(0, 0) = 0.5;
  CHECK(mdiff(read_matrix_json(out), expect) < 1e-12);
  REQUIRE(run_cli("--out " + out + " funcalc " + din + " --fn drazin --c 2,1") == 0);
  CHECK(mdiff(read_matrix_json(out), expect) < 1e-12);

  std::string zin = scratch("zero.json");
  write_json_file(zin, matrix_to_json(ComplexMatrix::Zero(2, 2)));
  REQUIRE(run_cli("--out " + out + " funcalc " + zin + " --fn exp") == 0);
  CHECK(mdiff(read_matrix_json(out), ComplexMatrix::Identity(2, 2)) < 1e-12);

  // Laurent data drives the meromorphic route.
  std::string lpath = scratch("laurent.json");
  write_json_file(
      lpath, nlohmann::json::array(
                 {{{"lambda", {2.0, 0.0}}, {"coeffs", {{0.5, 0.0}, {-0.25, 0.0}}}}}));
  REQUIRE(run_cli("--out " + out + " funcalc " + in + " --laurent " + lpath) == 0);
  CHECK(mdiff(read_matrix_json(out), cmat(2, {0.5, -0.25, 0.0, 0.5})) < 1e-12);
}

TEST_CASE("cli: resolvent subcommand") {
  ComplexMatrix A = ComplexMatrix::Zero(2, 2);
  A(0, 0) = 1.0;
  A(1, 1) = 2.0;
  std::string in = scratch("res_in.json");
  std::string out = scratch("res_out.json");
  write_json_file(in, matrix_to_json(A));
  REQUIRE(run_cli("--out " + out + " resolvent " + in + " --z 3") == 0);
  ComplexMatrix expect = ComplexMatrix::Zero(2, 2);
  expect(0, 0) = 0.5;
  expect(1, 1) = 1.0;
  CHECK(mdiff(read_matrix_json(out), expect) < 1e-12);
}

TEST_CASE("cli: poisson pmf column") {
  std::string out = scratch("pmf.csv");
  REQUIRE(run_cli("--out " + out + " poisson --N 8 --r 1 --t 1") == 0);
  auto rows = read_csv(out);
  REQUIRE(rows.size() == 9);
  CHECK(std::abs(rows[0][1] - 0.367879441171442) < 1e-9);
  CHECK(std::abs(rows[1][1] - 0.367879441171442) < 1e-9);
  CHECK(std::abs(rows[2][1] - 0.183939720585721) < 1e-9);
}

TEST_CASE("cli: greenkubo constant observable vanishes") {
  ComplexMatrix G = cmat(2, {-1.0, 1.0, 1.0, -1.0});
  std::string gin = scratch("gk_g.json");
  std::string obs = scratch("gk_obs.json");
  std::string out = scratch("gk_out.csv");
  write_json_file(gin, matrix_to_json(G));
  ComplexVector A = ComplexVector::Constant(2, Complex(2.5, 0.0));
  write_json_file(obs, vector_to_json(A));
  REQUIRE(run_cli("--out " + out + " greenkubo " + gin + " --observable " + obs) == 0);
  auto rows = read_csv(out);
  REQUIRE(rows.size() == 1);
  CHECK(std::abs(rows[0][0]) < 1e-12);
  CHECK(std::abs(rows[0][1]) < 1e-12);
}

TEST_CASE("cli: power spectrum CSV pair for the period-2 model") {
  std::string hmm = scratch("p2.json");
  write_json_file(hmm, period2_hmm_json());
  std::string out = scratch("p2_power.csv");
  REQUIRE(run_cli("--out " + out + " power " + hmm + " --grid 64") == 0);

  auto cont = read_csv(out);
  REQUIRE(cont.size() == 64);
  for (const auto& row : cont) CHECK(std::abs(row[1]) < 1e-9);

  auto lines = read_csv(scratch("p2_power.lines.csv"));
  REQUIRE(lines.size() == 1);
  CHECK(std::abs(lines[0][0] - std::numbers::pi) < 1e-9);
  CHECK(std::abs(lines[0][1] - 2.0 * std::numbers::pi) < 1e-9);
}

TEST_CASE("cli: simulate is deterministic and scan finds the period-2 line") {
  std::string hmm = scratch("p2b.json");
  write_json_file(hmm, period2_hmm_json());
  std::string s1 = scratch("series1.csv");
  std::string s2 = scratch("series2.csv");
  REQUIRE(run_cli("--out " + s1 + " simulate " + hmm + " --n 2048 --seed 9") == 0);
  REQUIRE(run_cli("--out " + s2 + " simulate " + hmm + " --n 2048 --seed 9") == 0);

  std::ifstream f1(s1), f2(s2);
  std::string c1((std::istreambuf_iterator<char>(f1)), {});
  std::string c2((std::istreambuf_iterator<char>(f2)), {});
  CHECK(c1 == c2);

  std::string out = scratch("scan.csv");
  REQUIRE(run_cli("--out " + out + " scan " + s1 + " --radius 1.05 --grid 512") == 0);
  auto rows = read_csv(out);
  REQUIRE(!rows.empty());
  CHECK(std::abs(rows[0][0] - std::numbers::pi) < 0.05);
}

TEST_CASE("cli: acf emits the alternating autocorrelation") {
  std::string hmm = scratch("p2c.json");
  write_json_file(hmm, period2_hmm_json());
  std::string out = scratch("acf.csv");
  REQUIRE(run_cli("--out " + out + " acf " + hmm + " --max-lag 5") == 0);
  auto rows = read_csv(out);
  REQUIRE(rows.size() == 6);
  for (int tau = 0; tau <= 5; ++tau)
    CHECK(std::abs(rows[tau][1] - (tau % 2 == 0 ? 1.0 : -1.0)) < 1e-10);
}

TEST_CASE("cli: exit codes") {
  // 2: unreadable/malformed input
  std::string bad = scratch("bad_hmm.json");
  std::ofstream(bad) << "{\"T\": 12}\n";
  CHECK(run_cli("power " + bad) == 2);
  CHECK(run_cli("decompose " + scratch("does_not_exist.json")) == 2);

  // 4: unsupported function name
  std::string in = scratch("ok_matrix.json");
  write_json_file(in, matrix_to_json(ComplexMatrix::Identity(2, 2)));
  CHECK(run_cli("funcalc " + in + " --fn quux") == 4);

  // 2: resolvent evaluated on the spectrum
  CHECK(run_cli("resolvent " + in + " --z 1") == 2);

  // 0 with --help
  CHECK(run_cli("--help") == 0);
}
