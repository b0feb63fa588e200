#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "fixtures.hpp"
#include "ptband/potential.hpp"

using namespace ptband;
namespace fs = std::filesystem;
constexpr double pi = std::numbers::pi;

TEST_CASE("entrywise reality check identifies PT potentials") {
  CHECK(fixtures::isin2x().validate_pt().pt);

  const PtCheck bad = fixtures::sin2x().validate_pt();
  CHECK_FALSE(bad.pt);
  REQUIRE_FALSE(bad.offenders.empty());
  bool has_plus_one = false;
  for (const PtOffender& o : bad.offenders)
    if (o.n == 1) has_plus_one = true;
  CHECK(has_plus_one);

  CHECK(PotentialSpec::constant(fixtures::rotation_matrix()).validate_pt().pt);
}

TEST_CASE("flipping any single coefficient to imaginary flips the verdict") {
  for (unsigned seed : {11u, 12u, 13u}) {
    const PotentialSpec spec = fixtures::random_pt(2, 2, seed);
    REQUIRE(spec.validate_pt().pt);
    std::mt19937_64 rng(seed * 7u + 1u);
    auto h = spec.harmonics();
    const int n = static_cast<int>(rng() % 5) - 2;
    const int r = static_cast<int>(rng() % 2);
    const int c = static_cast<int>(rng() % 2);
    h[n](r, c) += Complex(0.0, 0.05);
    const PotentialSpec flipped(2, std::move(h));
    const PtCheck check = flipped.validate_pt();
    CHECK_FALSE(check.pt);
    REQUIRE(check.offenders.size() == 1);
    CHECK(check.offenders[0].n == n);
    CHECK(check.offenders[0].row == r);
    CHECK(check.offenders[0].col == c);
  }
}

TEST_CASE("series evaluation") {
  std::map<int, Eigen::MatrixXcd> h;
  h[0] = Eigen::MatrixXcd::Identity(2, 2);
  const PotentialSpec ident(2, std::move(h));
  CHECK((ident.evaluate(0.71) - Eigen::MatrixXcd::Identity(2, 2)).norm() ==
        doctest::Approx(0.0).epsilon(1e-14));

  const PotentialSpec q = fixtures::isin2x();
  CHECK(std::abs(q.evaluate(pi / 4.0)(0, 0) - Complex(0.0, 1.0)) < 1e-14);
  CHECK(std::abs(q.evaluate(pi / 4.0 + pi)(0, 0) - Complex(0.0, 1.0)) < 1e-12);

  for (int i = 0; i < 25; ++i) {
    const double x = -2.0 + 0.17 * i;
    CHECK((q.evaluate(x + pi) - q.evaluate(x)).norm() < 1e-12);
  }
}

TEST_CASE("averaged matrix is pi times the real mean coefficient") {
  CHECK(fixtures::isin2x().averaged_matrix().norm() == 0.0);

  const Eigen::MatrixXd rot = fixtures::rotation_matrix();
  CHECK((PotentialSpec::constant(rot).averaged_matrix() - pi * rot).norm() <
        1e-14);

  std::map<int, Eigen::MatrixXcd> h;
  Eigen::MatrixXcd c0(2, 2);
  c0 << 2.0 / pi, 0.0, 0.0, 3.0 / pi;
  h[0] = c0;
  h[1] = Eigen::MatrixXcd::Constant(2, 2, Complex(0.25, 0.0));
  h[-1] = Eigen::MatrixXcd::Constant(2, 2, Complex(-0.125, 0.0));
  const PotentialSpec spec(2, std::move(h));
  Eigen::MatrixXd want(2, 2);
  want << 2.0, 0.0, 0.0, 3.0;
  CHECK((spec.averaged_matrix() - want).norm() < 1e-12);
  CHECK((spec.mean_matrix() - want / pi).norm() < 1e-12);

  // non-PT input: the averaged matrix would not be real
  std::map<int, Eigen::MatrixXcd> hb;
  hb[0] = Eigen::MatrixXcd::Constant(1, 1, Complex(1.0, 0.5));
  const PotentialSpec bad(1, std::move(hb));
  CHECK_THROWS_AS((void)bad.averaged_matrix(), std::domain_error);
}

TEST_CASE("averaged matrix agrees with trapezoid integration") {
  const PotentialSpec spec = fixtures::random_pt(3, 3, 99u);
  const int n = 4096;
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Zero(3, 3);
  for (int i = 0; i <= n; ++i) {
    const double w = (i == 0 || i == n) ? 0.5 : 1.0;
    acc += w * spec.evaluate(pi * i / n);
  }
  acc *= pi / n;
  CHECK((acc.real() - spec.averaged_matrix()).norm() < 1e-8);
  CHECK(acc.imag().norm() < 1e-8);
}

TEST_CASE("norms: aggregate size B and tail weights q_k") {
  const PotentialNorms zero = PotentialSpec::zero(2).norms(5);
  CHECK(zero.B == 0.0);
  for (int k = 0; k <= 5; ++k) CHECK(zero.q_k(k) == 0.0);

  const PotentialNorms qn = fixtures::isin2x().norms(4);
  CHECK(qn.B == doctest::Approx(std::sqrt(pi / 2.0)).epsilon(1e-12));
  // harmonic indices probed at k = 1 are {±2, ±3, ±1}: only |s| = 1 present
  CHECK(qn.q_k(1) == doctest::Approx(std::sqrt(pi) * 0.5).epsilon(1e-12));
  CHECK(qn.q_k(2) == 0.0);
  CHECK(qn.q_k(3) == 0.0);
}

TEST_CASE("Parseval: B^2 equals the integral of the squared entry norms") {
  const PotentialSpec spec = fixtures::random_pt(2, 4, 5u);
  const PotentialNorms qn = spec.norms(2);
  const int n = 8192;
  double acc = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double w = (i == 0 || i == n) ? 0.5 : 1.0;
    acc += w * spec.evaluate(pi * i / n).squaredNorm();
  }
  acc *= pi / n;
  CHECK(acc == doctest::Approx(qn.B * qn.B).epsilon(1e-8));
}

TEST_CASE("json round trip and input validation") {
  const fs::path dir = fs::temp_directory_path() / "ptband_test_potential";
  fs::create_directories(dir);

  const PotentialSpec spec = fixtures::random_pt(2, 2, 3u);
  const fs::path file = dir / "spec.json";
  spec.save(file.string());
  const PotentialSpec back = PotentialSpec::load(file.string());
  REQUIRE(back.dim() == 2);
  for (const auto& [n, c] : spec.harmonics())
    CHECK((back.harmonic(n) - c).norm() < 1e-15);

  {
    std::ofstream bad(dir / "bad.json");
    bad << "{ not json";
  }
  CHECK_THROWS_AS((void)PotentialSpec::load((dir / "bad.json").string()),
                  std::invalid_argument);
  CHECK_THROWS_AS((void)PotentialSpec::load((dir / "missing.json").string()),
                  std::invalid_argument);

  {
    std::ofstream f(dir / "noim.json");
    f << R"({"m": 1, "harmonics": [{"n": 2, "re": [[0.5]]}]})";
  }
  const PotentialSpec noim = PotentialSpec::load((dir / "noim.json").string());
  CHECK(noim.harmonic(2)(0, 0) == Complex(0.5, 0.0));
  CHECK(noim.harmonic(1).norm() == 0.0);
}

TEST_CASE("construction rejects malformed input") {
  std::map<int, Eigen::MatrixXcd> h;
  h[0] = Eigen::MatrixXcd::Zero(2, 3);
  CHECK_THROWS_AS(PotentialSpec(2, std::move(h)), std::invalid_argument);

  std::map<int, Eigen::MatrixXcd> h2;
  h2[200] = Eigen::MatrixXcd::Zero(1, 1);
  CHECK_THROWS_AS(PotentialSpec(1, std::move(h2)), std::invalid_argument);

  std::map<int, Eigen::MatrixXcd> h3;
  CHECK_THROWS_AS(PotentialSpec(0, std::move(h3)), std::invalid_argument);
}
