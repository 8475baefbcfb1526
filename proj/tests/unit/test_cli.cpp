#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "cli.hpp"
#include "oracles.hpp"
#include "xhodge/field_io.hpp"
#include "xhodge/report.hpp"

using namespace xhodge;
using namespace xhodge::testing;
namespace fs = std::filesystem;

namespace {

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("xhodge_cli_" + std::to_string(::getpid()) + "_" +
                                        ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  /// Runs the CLI on a small ball grid writing into the test directory.
  int run(std::vector<std::string> args, bool grid = true) {
    out_.str({});
    err_.str({});
    if (grid) {
      for (const char* a : {"--n", "16", "--L", "4", "--obstacle", "ball(0,0,0;1)"}) args.emplace_back(a);
    }
    args.emplace_back("--out");
    args.push_back(dir_.string());
    return cli::run(args, out_, err_);
  }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::map<std::string, std::string> text_kv(const std::string& name) const {
    std::ifstream is(path(name));
    std::map<std::string, std::string> kv;
    std::string line;
    while (std::getline(is, line)) {
      const auto eq = line.find(" = ");
      if (eq != std::string::npos) kv[line.substr(0, eq)] = line.substr(eq + 3);
    }
    return kv;
  }

  fs::path dir_;
  std::ostringstream out_, err_;
};

}  // namespace

TEST_F(Cli, DecomposeZeroField) {
  ASSERT_EQ(run({"gen-field", "--kind", "zero"}), cli::kOk) << err_.str();
  ASSERT_TRUE(fs::exists(path("u.field")));
  ASSERT_EQ(run({"decompose"}), cli::kOk) << err_.str();
  for (const char* f : {"h.field", "w.field", "rot_w.field", "p.field", "grad_p.field", "parts.txt",
                        "diagnostics.txt", "diagnostics.csv"})
    EXPECT_TRUE(fs::exists(path(f))) << f;
  const FaceField h = read_field<Entity::Face>(path("h.field"));
  EXPECT_EQ(max_abs(h), 0.0);
  EXPECT_EQ(std::stod(text_kv("parts.txt").at("lambda")), 0.0);
  EXPECT_EQ(text_kv("parts.txt").at("flavor"), "normal");
}

TEST_F(Cli, LambdaChainAndVerify) {
  ASSERT_EQ(run({"gen-field", "--kind", "q0_grad"}), cli::kOk) << err_.str();
  ASSERT_EQ(run({"decompose", "--flavor", "tangential", "--far", "free", "--tol", "1e-11"}), cli::kOk) << err_.str();
  EXPECT_NEAR(std::stod(text_kv("parts.txt").at("lambda")), 1.0, 1e-8);
  EXPECT_EQ(text_kv("parts.txt").at("far"), "free");

  ASSERT_EQ(run({"verify"}, false), cli::kOk) << err_.str();
  EXPECT_NE(out_.str().find("verify_max_deviation = 0\n"), std::string::npos) << out_.str();

  // a tampered potential no longer reproduces the stored diagnostics
  FaceField u = read_field<Entity::Face>(path("u.field"));
  ScalarField p = read_field<Entity::Cell>(path("p.field"), u.topo_ptr());
  for (std::size_t c = 0; c < p.size(); ++c)
    if (u.topo().fluid(c)) p[c] += 1e-3 * double(c % 7);
  write_field(path("p.field"), p);
  EXPECT_EQ(run({"verify"}, false), cli::kSolverFailure);
  EXPECT_NE(err_.str().find("deviates"), std::string::npos) << err_.str();
}

TEST_F(Cli, DecomposeGenerateWritesCsvRow) {
  ASSERT_EQ(run({"decompose", "--generate", "--set", "field.kind=fourier", "--seed", "5", "--r-list", "2"}), cli::kOk)
      << err_.str();
  std::ifstream is(path("diagnostics.csv"));
  std::string header, row, extra;
  std::getline(is, header);
  std::getline(is, row);
  EXPECT_FALSE(std::getline(is, extra));
  EXPECT_EQ(header.rfind("scenario,flavor,far,n,L,", 0), 0u);
  EXPECT_EQ(std::count(header.begin(), header.end(), ','), std::count(row.begin(), row.end(), ','));
}

TEST_F(Cli, ExitCodes) {
  EXPECT_EQ(run({"--help"}, false), cli::kOk);
  EXPECT_EQ(run({}, false), cli::kConfigError);
  EXPECT_EQ(run({"decompose", "--no-such-flag"}), cli::kConfigError);
  EXPECT_EQ(run({"decompose", "--set", "n=abc"}), cli::kConfigError);
  EXPECT_NE(err_.str().find("not an integer"), std::string::npos) << err_.str();
  EXPECT_EQ(run({"decompose", "--set", "nonsense"}), cli::kConfigError);
  EXPECT_EQ(run({"decompose", "--flavor", "tangential", "--far", "neumann", "--generate"}), cli::kConfigError);
  EXPECT_EQ(run({"decompose", "--input", path("missing.field")}), cli::kConfigError);
  EXPECT_EQ(run({"q0", "--obstacle", "none"}, false), cli::kConfigError);
  EXPECT_NE(err_.str().find("geometry"), std::string::npos) << err_.str();
  EXPECT_EQ(run({"decompose", "--generate", "--set", "field.kind=fourier", "--max-iters", "2"}), cli::kSolverFailure);
  EXPECT_NE(err_.str().find("solver failure"), std::string::npos) << err_.str();
  EXPECT_EQ(run({"gen-field", "--kind", "teapot"}), cli::kConfigError);
}

TEST_F(Cli, ConfigFileWithOverrides) {
  const std::string cfg = path("run.cfg");
  std::ofstream(cfg) << "n = 12\nL = 3\nshape = ball\nfield.kind = uniform\nfield.axis = x\n";
  ASSERT_EQ(run({"gen-field", "--config", cfg, "--set", "n=14"}, false), cli::kOk) << err_.str();
  const FieldFileHeader h = read_header(path("u.field"));
  EXPECT_EQ(h.n, 14);
  EXPECT_EQ(h.L, 3.0);
}

TEST_F(Cli, AuxiliaryCommands) {
  ASSERT_EQ(run({"q0", "--vtk"}), cli::kOk) << err_.str();
  EXPECT_TRUE(fs::exists(path("q0.field")));
  EXPECT_TRUE(fs::exists(path("q0_grad.vtk")));
  EXPECT_FALSE(text_kv("q0.txt").empty());

  ASSERT_EQ(run({"translation-harmonics", "--axis", "x"}), cli::kOk) << err_.str();
  for (const char* f : {"q_x.field", "h_x.field", "pi_x.field", "k_x.field", "translation_x.txt"})
    EXPECT_TRUE(fs::exists(path(f))) << f;

  ASSERT_EQ(run({"classification"}), cli::kOk) << err_.str();
  EXPECT_EQ(read_header(path("classification.field")).payload, 16u * 16u * 16u);

  ASSERT_EQ(run({"probe-inequalities", "--probes", "3", "--r-list", "1.5,3"}), cli::kOk) << err_.str();
  std::ifstream is(path("inequalities.csv"));
  int lines = 0;
  for (std::string l; std::getline(is, l);) ++lines;
  EXPECT_EQ(lines, 1 + 3 * 2);
}

TEST_F(Cli, HarmonicBasisOfTheBall) {
  ASSERT_EQ(run({"harmonic-basis", "--probes", "8"}), cli::kOk) << err_.str();
  EXPECT_EQ(text_kv("harmonic_basis.txt").at("dimension"), "0");
  EXPECT_TRUE(fs::exists(path("singular_values.csv")));
  ASSERT_EQ(run({"harmonic-basis", "--probes", "8", "--flavor", "tangential", "--far", "zero"}), cli::kOk)
      << err_.str();
  EXPECT_EQ(text_kv("harmonic_basis.txt").at("dimension"), "1");
  EXPECT_TRUE(fs::exists(path("basis_0.field")));
}

TEST_F(Cli, ConvergenceTable) {
  ASSERT_EQ(run({"convergence", "--set", "grids=12:4,16:4", "--set", "field.kind=uniform"}, false), cli::kOk)
      << err_.str();
  std::ifstream is(path("convergence.csv"));
  int lines = 0;
  for (std::string l; std::getline(is, l);) ++lines;
  EXPECT_EQ(lines, 3);
}
