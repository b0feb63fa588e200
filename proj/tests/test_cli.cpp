#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>

#include "fixtures.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path work = fs::temp_directory_path() / "ptband_cli_test";

int run(const std::string& args) {
  const std::string cmd = std::string(PTBAND_CLI_PATH) + " " + args +
                          " >" + (work / "stdout.txt").string() + " 2>" +
                          (work / "stderr.txt").string();
  const int rc = std::system(cmd.c_str());
  REQUIRE(WIFEXITED(rc));
  return WEXITSTATUS(rc);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Setup {
  Setup() {
    fs::create_directories(work);
    fixtures::isin2x().save((work / "isin2x.json").string());
    fixtures::sin2x().save((work / "sin2x.json").string());
    ptband::PotentialSpec::zero(1).save((work / "zero.json").string());
    ptband::PotentialSpec::constant(fixtures::diag({1.0, 2.0}))
        .save((work / "diag12.json").string());
    std::ofstream bad(work / "broken.json");
    bad << "{ this is not json";
  }
};
const Setup setup_once;

} // namespace

TEST_CASE("check-pt exit codes") {
  CHECK(run("check-pt --spec " + (work / "isin2x.json").string()) == 0);
  CHECK(run("check-pt --spec " + (work / "sin2x.json").string()) == 1);
  CHECK(run("check-pt --spec " + (work / "broken.json").string()) == 2);
  CHECK(run("check-pt --spec " + (work / "missing.json").string()) == 2);
  CHECK(run("check-pt") == 2); // --spec is required
}

TEST_CASE("sweep writes deterministic band tables") {
  const fs::path out1 = work / "sweep1";
  const fs::path out2 = work / "sweep2";
  const std::string base = "sweep --spec " + (work / "zero.json").string() +
                           " --K 8 --t-points 5 --window -1 40 --out ";
  REQUIRE(run(base + out1.string()) == 0);
  REQUIRE(run(base + out2.string()) == 0);

  const std::string csv = slurp(out1 / "bands.csv");
  CHECK(csv.rfind("t,re_lambda,im_lambda,mult,cluster_k,cluster_j,residual\n",
                  0) == 0);
  CHECK(csv == slurp(out2 / "bands.csv")); // bit-identical rerun

  // every row of the free sweep matches (2n+t)^2
  std::istringstream rows(csv);
  std::string line;
  std::getline(rows, line); // header
  int count = 0;
  while (std::getline(rows, line)) {
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream fields(line);
    double t, re, im;
    fields >> t >> re >> im;
    double best = 1e300;
    for (int n = -8; n <= 8; ++n)
      best = std::min(best, std::abs(re - std::pow(2.0 * n + t, 2)));
    CHECK(best < 1e-10);
    CHECK(std::abs(im) < 1e-10);
    ++count;
  }
  CHECK(count > 0);

  const nlohmann::json sj = nlohmann::json::parse(slurp(out1 / "sweep.json"));
  CHECK(sj["m"] == 1);
  CHECK(sj["K"] == 8);
  CHECK(sj["t_points"] == 5);
  CHECK(sj["slices"].size() == 5);
}

TEST_CASE("classify writes the full report") {
  const fs::path out = work / "classify1";
  REQUIRE(run("classify --spec " + (work / "diag12.json").string() +
              " --K 10 --t-points 21 --window -2 60 --out " + out.string()) ==
          0);
  const nlohmann::json rj = nlohmann::json::parse(slurp(out / "report.json"));
  for (const char* key :
       {"coverage_applicable", "real_bands", "coverage",
        "bounded_real_component", "diam", "halfline", "localization"})
    CHECK(rj.contains(key));
  CHECK(rj["localization"].contains("c_hat"));
  CHECK(rj["localization"]["violations"].empty());

  const std::string bands = slurp(out / "real_bands.csv");
  CHECK(bands.rfind("lo,hi,k,j,i,validated\n", 0) == 0);
  CHECK(fs::exists(out / "bands.csv"));
}

TEST_CASE("oracle cross-checks fundamental-solution multipliers") {
  CHECK(run("oracle --spec " + (work / "zero.json").string() +
            " --K 8 --t 0.35 --lambda " +
            std::to_string(std::pow(2.0 + 0.35, 2))) == 0);
  const std::string table = slurp(work / "stdout.txt");
  CHECK(table.find("failed") == std::string::npos);

  // default probe list: the Galerkin spectrum itself
  CHECK(run("oracle --spec " + (work / "isin2x.json").string() +
            " --K 12 --t 0.2 --window 0 30") == 0);
}

TEST_CASE("unknown flags and subcommands are input errors") {
  CHECK(run("frobnicate") == 2);
  CHECK(run("sweep --spec " + (work / "zero.json").string() +
            " --no-such-flag") == 2);
}
