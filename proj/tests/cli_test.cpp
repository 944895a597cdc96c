#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include "flatlab/io.hpp"
#include "test_surfaces.hpp"

using namespace flatlab;
namespace fs = std::filesystem;

namespace {

const fs::path& scratch() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / ("flatlab_cli_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

int run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " " FLATLAB_CLI " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

const std::string small_poisson =
    "experiment poisson --stratum 1,1 --squares 20 --samples 12 --mcmc-steps 2000 --burn-in 20000 "
    "--samples-per-chain 4 --seed 3 --intervals 0:0.5,0.5:1";

}  // namespace

TEST(Cli, TorusScanMatchesLattice) {
  const auto in = scratch() / "torus.json";
  const auto out = scratch() / "torus.csv";
  write(in, serialize(test::unit_torus(true)));
  ASSERT_EQ(run("scan --in " + in.string() + " --length 5 --out " + out.string()), 0);
  int primitive = 0;
  for (int x = -5; x <= 5; ++x)
    for (int y = 0; y <= 5; ++y)
      if (x * x + y * y <= 25 && std::gcd(x, y) == 1 && (y > 0 || x > 0)) ++primitive;
  std::istringstream lines(slurp(out));
  std::string line;
  int rows = -1;
  while (std::getline(lines, line)) ++rows;
  EXPECT_EQ(rows, primitive);
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run(""), 2);
  EXPECT_EQ(run("scan --length 5"), 2);
  EXPECT_EQ(run("sample --stratum 1,x"), 1);
  const auto bad = scratch() / "bad.json";
  write(bad, "{\"exact\": true");
  EXPECT_EQ(run("classify --in " + bad.string()), 1);
}

TEST(Cli, MalformedIntervalWritesNothing) {
  const auto out = scratch() / "never.json";
  EXPECT_EQ(run("experiment poisson --stratum 1,1 --squares 20 --samples 4 --intervals 0.5:0.2 --out " +
                out.string()),
            2);
  EXPECT_FALSE(fs::exists(out));
}

TEST(Cli, RawCountsIndependentOfWorkers) {
  ASSERT_EQ(run(small_poisson + " --format csv --workers 1 --out w1.csv", "FLATLAB_OUTPUT_DIR=" + scratch().string()),
            0);
  ASSERT_EQ(run(small_poisson + " --format csv --out w3.csv",
                "FLATLAB_OUTPUT_DIR=" + scratch().string() + " FLATLAB_WORKERS=3"),
            0);
  const auto a = slurp(scratch() / "w1.csv");
  EXPECT_FALSE(a.empty());
  EXPECT_EQ(a, slurp(scratch() / "w3.csv"));
  EXPECT_EQ(a.rfind("# seed=3", 0), 0u);
}

TEST(Cli, ReportEmbedsConfiguration) {
  const auto out = scratch() / "report.json";
  ASSERT_EQ(run(small_poisson + " --out " + out.string()), 0);
  const auto doc = json::parse(slurp(out));
  EXPECT_EQ(doc["config"]["sampler"]["seed"], 3);
  EXPECT_EQ(doc["raw"].size(), 12u);
}
