#include <gtest/gtest.h>
#include <sys/wait.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <numbers>
#include <sstream>
#include <string>

#include "tomo/io.hpp"
#include "tomo/verify.hpp"

using namespace tomo;
namespace fs = std::filesystem;

namespace {

struct Run {
  int status = -1;
  std::string out;
};

// Runs the CLI with stderr folded into the captured output.
Run run(const std::string& exe, const std::string& args) {
  const std::string cmd = std::string(exe) + " " + args + " 2>&1";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.out.append(buf.data(), n);
  const int raw = pclose(pipe);
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  return r;
}

Run tomo_cli(const std::string& args) { return run(TOMO_CLI, args); }

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("tomo_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  std::string write_op(const std::string& name, const OperatorMatrix& a) const {
    io::write_operator(path(name), a);
    return path(name);
  }

  fs::path dir_;
};

std::vector<std::vector<double>> csv_rows(const std::string& text, std::size_t cols, const std::string& header) {
  return io::detail::parse_numeric_csv(text, cols, header);
}

}  // namespace

TEST_F(CliTest, SpinTomogramOfIdentityIsOne) {
  const auto op = write_op("id.json", OperatorMatrix::Identity(3, 3));
  const auto r = tomo_cli("spin tomogram --j 2 --input " + op);
  ASSERT_EQ(r.status, 0) << r.out;
  const auto rows = csv_rows(r.out, 4, io::kSpinTomogramHeader);
  EXPECT_EQ(rows.size(), 3u * 6u * 4u);
  for (const auto& row : rows) EXPECT_NEAR(row[3], 1.0, 1e-13);
}

TEST_F(CliTest, SpinHalfProjector) {
  const auto op = write_op("up.json", basis_operator(2, 1, 1));
  ASSERT_EQ(tomo_cli("spin tomogram --j 1 --input " + op + " --output " + path("w.csv")).status, 0);
  int up_rows = 0;
  for (const auto& row : csv_rows(io::read_file(path("w.csv")), 4, io::kSpinTomogramHeader)) {
    if (row[0] != 1.0) continue;
    ++up_rows;
    EXPECT_NEAR(row[3], std::pow(std::cos(row[2] / 2), 2), 1e-14);
  }
  EXPECT_EQ(up_rows, 4 * 3);
}

TEST_F(CliTest, MalformedJsonIsIoError) {
  io::write_file(path("bad.json"), "{\"dim\": 2, \"re\": [[1,");
  const auto r = tomo_cli("spin tomogram --j 1 --input " + path("bad.json"));
  EXPECT_EQ(r.status, 3);
  EXPECT_NE(r.out.find("parse error"), std::string::npos) << r.out;
  EXPECT_EQ(tomo_cli("spin tomogram --j 1 --input " + path("missing.json")).status, 3);
}

TEST_F(CliTest, SpinRoundTrip) {
  const auto a = random_hermitian(4, 77);
  const auto op = write_op("a.json", a);
  ASSERT_EQ(tomo_cli("spin tomogram --j 3 --input " + op + " --output " + path("w.csv")).status, 0);
  const auto r = tomo_cli("spin reconstruct --j 3 --input " + path("w.csv") + " --output " + path("back.json"));
  ASSERT_EQ(r.status, 0) << r.out;
  EXPECT_NE(r.out.find("calibration factor: -1"), std::string::npos) << r.out;
  EXPECT_LT(max_abs_diff(io::read_operator(path("back.json")), a), 1e-10);

  const auto id = write_op("id.json", OperatorMatrix::Identity(2, 2));
  ASSERT_EQ(tomo_cli("spin tomogram --j 1 --input " + id + " --output " + path("wi.csv")).status, 0);
  ASSERT_EQ(tomo_cli("spin reconstruct --j 1 --input " + path("wi.csv") + " --output " + path("id_back.json")).status, 0);
  EXPECT_LT(max_abs_diff(io::read_operator(path("id_back.json")), OperatorMatrix::Identity(2, 2)), 1e-10);
}

TEST_F(CliTest, CoarseGridIsValidationError) {
  const auto op = write_op("a.json", random_hermitian(3, 1));
  const auto r = tomo_cli("spin tomogram --j 2 --n-alpha 3 --n-beta 3 --input " + op);
  EXPECT_EQ(r.status, 2);
  EXPECT_NE(r.out.find("required: --n-alpha 5 --n-beta 3"), std::string::npos) << r.out;

  // A tomogram sampled on a grid too coarse for reconstruction.
  const auto g = AngularGrid(HalfInteger::from_twice(2), 5, 3);
  io::write_file(path("w.csv"), io::spin_tomogram_csv(spin_tomogram(random_hermitian(3, 2), g)));
  const auto rec = tomo_cli("spin reconstruct --j 4 --input " + path("w.csv"));
  EXPECT_EQ(rec.status, 2);
  EXPECT_NE(rec.out.find("required: --n-alpha 9 --n-beta 5"), std::string::npos) << rec.out;
}

TEST_F(CliTest, DimensionMismatchIsValidationError) {
  const auto op = write_op("a.json", random_hermitian(2, 1));
  EXPECT_EQ(tomo_cli("spin tomogram --j 2 --input " + op).status, 2);
}

TEST_F(CliTest, ArgumentErrors) {
  EXPECT_EQ(tomo_cli("spin tomogram --j 1").status, 2);
  EXPECT_EQ(tomo_cli("frobnicate").status, 2);
  EXPECT_EQ(tomo_cli("--help").status, 0);
}

TEST_F(CliTest, SpinKernelDeterministicAcrossThreads) {
  ASSERT_EQ(tomo_cli("spin kernel --j 2 --sparse --output " + path("k1.json")).status, 0);
  ASSERT_EQ(tomo_cli("--threads 3 spin kernel --j 2 --sparse --output " + path("k3.json")).status, 0);
  EXPECT_EQ(io::read_file(path("k1.json")), io::read_file(path("k3.json")));
  const auto s = spin_scheme(AngularGrid::with_defaults(HalfInteger::from_twice(2)));
  const auto k = io::kernel_from_json(io::parse_json(io::read_file(path("k1.json")), "k1"), s);
  const auto f = symbol_of(random_hermitian(3, 4), s);
  const auto g = symbol_of(random_hermitian(3, 5), s);
  EXPECT_LT(star(f, g, k, s).distance(symbol_of(operator_of(f, s) * operator_of(g, s), s)), 1e-10);
}

TEST_F(CliTest, SymplecticGroundStateTomogram) {
  // Smoothing a tomogram with a Gaussian of width s widens w0 to variance 1/2 + s^2.
  const auto r = tomo_cli("symplectic tomogram --fock 0 --n-theta 4 --x-max 4 --dx 0.05 --smoothing 0.5");
  ASSERT_EQ(r.status, 0) << r.out.substr(0, 200);
  const auto rows = csv_rows(r.out, 4, io::kSampledHeader);
  ASSERT_EQ(rows.size(), 4u * 161u);
  const double var = 0.5 + 0.25;
  double worst = 0.0;
  for (const auto& row : rows) {
    const double expected = std::exp(-0.5 * row[1] * row[1] / var) / std::sqrt(2.0 * std::numbers::pi * var);
    worst = std::max(worst, std::abs(row[2] - expected));
  }
  EXPECT_LT(worst, 1e-6);
}

TEST_F(CliTest, SymplecticSpectralRoundTrip) {
  ASSERT_EQ(tomo_cli("symplectic tomogram --fock 1 --spectral --output " + path("t.json")).status, 0);
  const auto r = tomo_cli("symplectic reconstruct --input " + path("t.json") + " --output " + path("a.json"));
  ASSERT_EQ(r.status, 0) << r.out;
  const auto a = io::read_operator(path("a.json"));
  EXPECT_LT((a - basis_operator(64, 1, 1)).topLeftCorner(8, 8).cwiseAbs().maxCoeff(), 1e-3);
}

TEST_F(CliTest, SymplecticValidation) {
  EXPECT_EQ(tomo_cli("symplectic tomogram --fock 0 --smoothing 0").status, 2);
  ASSERT_EQ(tomo_cli("symplectic tomogram --fock 0 --spectral --n-trunc 16 --n-theta 4 --output " + path("t.json")).status, 0);
  EXPECT_EQ(tomo_cli("symplectic reconstruct --epsilon 0 --input " + path("t.json")).status, 2);
  EXPECT_EQ(tomo_cli("symplectic reconstruct --epsilon -1 --input " + path("t.json")).status, 2);
  EXPECT_EQ(tomo_cli("symplectic reconstruct --n-trunc 32 --input " + path("t.json")).status, 2);
  EXPECT_EQ(tomo_cli("symplectic kernel --x1 0,1,0 --x2 0,1,0 --x 0,1,0").status, 2);
  EXPECT_EQ(tomo_cli("symplectic idempotency --point 0,1,0").status, 2);
}

TEST_F(CliTest, SymplecticKernel) {
  const auto r = tomo_cli("symplectic kernel --x1 0.1,0.5,0.5 --x2 0.2,0.5,0.5 --x 0.3,1,1");
  ASSERT_EQ(r.status, 0) << r.out;
  const auto j = io::parse_json(r.out, "stdout");
  EXPECT_EQ(j.at("constraint").get<double>(), 0.0);
  const complex d(j.at("phase_density").at("re").get<double>(), j.at("phase_density").at("im").get<double>());
  EXPECT_NEAR(std::abs(d), 1.0 / (4.0 * std::numbers::pi * std::numbers::pi), 1e-16);
}

TEST_F(CliTest, IdempotencyReport) {
  const auto r = tomo_cli("symplectic idempotency --point 0,0,1 --point 1,0,1 --output " + path("report.json"));
  ASSERT_EQ(r.status, 0) << r.out;
  const auto j = io::parse_json(io::read_file(path("report.json")), "report");
  ASSERT_EQ(j.at("points").size(), 2u);
  for (const auto& p : j.at("points")) EXPECT_LT(p.at("residual").get<double>(), 1e-3);
}

TEST_F(CliTest, EvolveMatchesConjugation) {
  const auto h = write_op("h.json", verify::pauli_z());
  const auto a = write_op("a.json", verify::pauli_x());
  const auto r = tomo_cli("evolve --j 1 --hamiltonian " + h + " --input " + a + " --time 0.7853981633974483 --output " +
                          path("f.csv"));
  ASSERT_EQ(r.status, 0) << r.out;
  const auto s = spin_scheme(AngularGrid::with_defaults(HalfInteger::from_twice(1)));
  const auto f = io::symbol_from_csv(io::read_file(path("f.csv")), s);
  const double t = std::numbers::pi / 4;
  const OperatorMatrix u = matrix_exponential(complex(0.0, t) * verify::pauli_z());
  EXPECT_LT(f.distance(symbol_of(u * verify::pauli_x() * u.adjoint(), s)), 1e-6);
}

TEST_F(CliTest, IntertwineToMatrixElements) {
  const auto a = random_hermitian(3, 12);
  const auto op = write_op("a.json", a);
  const auto r = tomo_cli("intertwine --j 2 --operator " + op + " --output " + path("m.csv"));
  ASSERT_EQ(r.status, 0) << r.out;
  const auto m = matrix_element_scheme(3);
  const auto f = io::symbol_from_csv(io::read_file(path("m.csv")), m);
  EXPECT_LT(f.distance(symbol_of(a, m)), 1e-10);

  // And back from the matrix-element symbol file.
  ASSERT_EQ(tomo_cli("intertwine --j 2 --from matrix --to spin --input " + path("m.csv") + " --output " + path("s.csv")).status, 0);
  const auto s = spin_scheme(AngularGrid::with_defaults(HalfInteger::from_twice(2)));
  EXPECT_LT(io::symbol_from_csv(io::read_file(path("s.csv")), s).distance(symbol_of(a, s)), 1e-10);
}

TEST_F(CliTest, OutputIsByteIdentical) {
  const auto op = write_op("a.json", random_hermitian(4, 3));
  const auto first = tomo_cli("spin tomogram --j 3 --input " + op);
  const auto second = tomo_cli("--threads 2 spin tomogram --j 3 --input " + op);
  ASSERT_EQ(first.status, 0);
  EXPECT_EQ(first.out, second.out);
}

TEST_F(CliTest, VerifyPassesAndReportsEveryProperty) {
  const auto r = tomo_cli("verify --report " + path("verify.json"));
  EXPECT_EQ(r.status, 0) << r.out;
  const auto j = io::parse_json(io::read_file(path("verify.json")), "verify");
  EXPECT_TRUE(j.at("passed").get<bool>());
  for (const auto& p : j.at("properties")) {
    EXPECT_TRUE(p.contains("residual"));
    EXPECT_NE(r.out.find(p.at("name").get<std::string>()), std::string::npos);
  }
}

TEST_F(CliTest, VerifyFailsWithSwappedKernelOrder) {
  const auto r = run(TOMO_CLI_SWAPPED, "verify --skip-symplectic");
  EXPECT_EQ(r.status, 1) << r.out;
  std::istringstream lines(r.out);
  std::string line;
  bool star_failed = false;
  while (std::getline(lines, line))
    if (line.rfind("star.matches_operator_product", 0) == 0) star_failed = line.find("FAIL") != std::string::npos;
  EXPECT_TRUE(star_failed) << r.out;
}
