#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>

#include "fixtures.hpp"
#include "ptband/localization.hpp"

using namespace ptband;
constexpr double pi = std::numbers::pi;

namespace {

BandSweep small_sweep(const PotentialSpec& spec, int K, int t_points,
                      double hi) {
  SweepConfig cfg;
  cfg.K = K;
  cfg.t_points = t_points;
  cfg.window = {-5.0, hi};
  return run_sweep(spec, cfg);
}

} // namespace

namespace {
std::set<int> resonant(int k, double t) {
  const std::vector<int> v = resonant_index_set(k, t);
  return {v.begin(), v.end()};
}
} // namespace

TEST_CASE("resonant index pairs by quasimomentum region") {
  CHECK(resonant(3, 0.5) == std::set<int>{3});
  CHECK(resonant(3, 0.1) == std::set<int>{3, -3});
  CHECK(resonant(3, 0.9) == std::set<int>{3, -4});
  CHECK(resonant(3, -0.9) == std::set<int>{3, -2});
  CHECK(resonant(3, 1.0) == std::set<int>{3, -4});
  // boundary points collapse to the single-index case
  CHECK(resonant(3, 1.0 / 3.0) == std::set<int>{3});
  CHECK(resonant(3, -2.0 / 3.0) == std::set<int>{3});
  CHECK(resonant(0, 0.1) == std::set<int>{0});
  CHECK_THROWS_AS(resonant_index_set(3, -1.0), std::domain_error);
  CHECK_THROWS_AS(resonant_index_set(3, 1.5), std::domain_error);
}

TEST_CASE("resonance partners really collide where claimed") {
  // at t = 1 the partner -k-1 hits the same unperturbed value
  const double t = 1.0;
  for (int k = 1; k <= 5; ++k)
    CHECK(std::pow(2.0 * k + t, 2) ==
          doctest::Approx(std::pow(2.0 * (-k - 1) + t, 2)));
  // at t = 0 the partner -k does
  for (int k = 1; k <= 5; ++k)
    CHECK(std::pow(2.0 * k, 2) == doctest::Approx(std::pow(-2.0 * k, 2)));
}

TEST_CASE("quadratic gap bound away from the resonant set") {
  // single-point arithmetic: k=2, t=0.5, n=1
  CHECK(std::abs(std::pow(2.0 + 0.5, 2) - std::pow(4.0 + 0.5, 2)) ==
        doctest::Approx(14.0));
  CHECK(14.0 >= 4.0 / 3.0 * (2 * 2 - 1));

  const GapBoundResult res = gap_bound_check(10, t_grid(101));
  CHECK(res.pass);
  CHECK(res.worst_margin >= 0.0);

  const GapBoundResult wide = gap_bound_check(20, t_grid(201));
  CHECK(wide.pass);
}

TEST_CASE("constants for the free potential") {
  const BandSweep sweep = small_sweep(PotentialSpec::zero(1), 8, 9, 50.0);
  const LocalizationConfig loc = estimate_constants(sweep, sweep.spec);
  CHECK(loc.B == 0.0);
  CHECK(loc.c_hat == 0.0);
  CHECK(loc.M_hat == doctest::Approx(1.0 / std::sqrt(pi)).epsilon(1e-6));
  CHECK(loc.N1_hat == 1);

  const ContainmentReport rep = disk_containment(sweep, loc);
  CHECK(rep.pass());
  CHECK(rep.max_distance < 1e-9);
  CHECK(rep.checked > 0);
}

TEST_CASE("constants and containment for a perturbed scalar potential") {
  const BandSweep sweep = small_sweep(fixtures::isin2x(), 16, 41, 400.0);
  const LocalizationConfig loc = estimate_constants(sweep, sweep.spec);
  CHECK(loc.B == doctest::Approx(std::sqrt(pi / 2.0)).epsilon(1e-12));
  CHECK(loc.M_hat >= 1.0 / std::sqrt(pi) - 1e-9);
  CHECK(loc.c_hat == doctest::Approx(loc.M_hat * loc.B));
  CHECK(loc.N1_hat >= 1);

  const ContainmentReport rep = disk_containment(sweep, loc);
  CHECK(rep.pass());

  // delta values are defined for a contiguous initial range of k
  REQUIRE_FALSE(loc.delta_k.empty());
  CHECK(loc.delta_k.begin()->first == 1);
  for (const auto& [k, d] : loc.delta_k) CHECK(d >= 0.0);
}

TEST_CASE("containment distances for constant potentials match the matrix size") {
  const PotentialSpec spec = PotentialSpec::constant(fixtures::rotation_matrix());
  const BandSweep sweep = small_sweep(spec, 10, 21, 100.0);
  const LocalizationConfig loc = estimate_constants(sweep, sweep.spec);
  const ContainmentReport rep = disk_containment(sweep, loc);
  CHECK(rep.pass());
  // every eigenvalue sits exactly |mu| = 1 away from its disk center
  CHECK(rep.max_distance == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(loc.c_hat >= 1.0);
}

TEST_CASE("eigenvalue deviations from the unperturbed lattice") {
  const BandSweep zero = small_sweep(PotentialSpec::zero(1), 8, 9, 50.0);
  const EpsilonEstimate e0 = epsilon_localization(
      zero, zero.jd, zero.spec.norms(10));
  for (const EpsilonEntry& entry : e0.entries) CHECK(entry.eps_hat < 1e-9);

  const PotentialSpec c12 = PotentialSpec::constant(fixtures::diag({1.0, 2.0}));
  const BandSweep cs = small_sweep(c12, 10, 15, 90.0);
  const EpsilonEstimate ec = epsilon_localization(cs, cs.jd, cs.spec.norms(10));
  REQUIRE_FALSE(ec.entries.empty());
  for (const EpsilonEntry& entry : ec.entries) CHECK(entry.eps_hat < 1e-8);

  const BandSweep qs = small_sweep(fixtures::isin2x(), 16, 41, 400.0);
  const EpsilonEstimate eq = epsilon_localization(qs, qs.jd, qs.spec.norms(20));
  REQUIRE_FALSE(eq.entries.empty());
  // the bound eps_hat <= c6_hat (1/k + q_k)^{1/r_j} holds by construction
  const PotentialNorms norms = qs.spec.norms(20);
  for (const EpsilonEntry& entry : eq.entries) {
    if (entry.k == 0) continue;
    const double base = 1.0 / std::abs(entry.k) + norms.q_k(std::abs(entry.k));
    CHECK(entry.eps_hat <= eq.c6_hat * base + 1e-12);
  }
}

TEST_CASE("exclusion intervals around resonant quasimomenta") {
  const JordanData jd = jordan_analyze(fixtures::diag({0.0, 2.0}));

  const std::vector<Interval> u = exclusion_sets(jd, 0, 10, 0.1);
  // the i = j piece is centered at t = 0
  bool origin_piece = false, shifted_piece = false;
  for (const Interval& iv : u) {
    if (std::abs(iv.lo - (-0.1 / 80.0)) < 1e-12 &&
        std::abs(iv.hi - (0.1 / 80.0)) < 1e-12)
      origin_piece = true;
    if (std::abs(iv.lo - (2.0 - 0.1) / 80.0) < 1e-12 &&
        std::abs(iv.hi - (2.0 + 0.1) / 80.0) < 1e-12)
      shifted_piece = true;
  }
  CHECK(origin_piece);
  CHECK(shifted_piece);
  for (const Interval& iv : u) {
    CHECK(iv.lo >= -1.0 - 1e-12);
    CHECK(iv.hi <= 1.0 + 1e-12);
  }

  // shrinking delta: total excluded length goes to zero
  double prev = 1e300;
  for (double d : {0.5, 0.05, 0.005}) {
    const double len = total_length(exclusion_sets(jd, 0, 10, d));
    CHECK(len < prev);
    prev = len;
  }
  const double tiny = total_length(exclusion_sets(jd, 0, 10, 1e-12));
  CHECK(2.0 - total_length(complement_decomposition(
                  exclusion_sets(jd, 0, 10, 1e-12))) <=
        tiny + 1e-15);

  CHECK_THROWS_AS(exclusion_sets(jd, 0, 0, 0.1), std::domain_error);
  CHECK_THROWS_AS(exclusion_sets(jd, 0, 5, -0.1), std::domain_error);
  const JordanData rot = jordan_analyze(fixtures::rotation_matrix());
  CHECK_THROWS_AS(exclusion_sets(rot, 0, 5, 0.1), std::domain_error);
}

TEST_CASE("complement of the excluded set inside (-1, 1]") {
  const std::vector<Interval> none = complement_decomposition({});
  REQUIRE(none.size() == 1);
  CHECK(none[0].lo == -1.0);
  CHECK(none[0].hi == 1.0);

  const std::vector<Interval> one =
      complement_decomposition({{-0.1, 0.1}});
  REQUIRE(one.size() == 2);
  CHECK(one[0].lo == -1.0);
  CHECK(one[0].hi == doctest::Approx(-0.1));
  CHECK(one[1].lo == doctest::Approx(0.1));
  CHECK(one[1].hi == 1.0);

  const std::vector<Interval> u{{-0.8, -0.7}, {-0.2, 0.0}, {0.5, 0.6}};
  const std::vector<Interval> comp = complement_decomposition(u);
  REQUIRE(comp.size() == 4);
  CHECK(total_length(comp) + total_length(u) == doctest::Approx(2.0));
}

TEST_CASE("localization report serializes every constant") {
  const BandSweep sweep = small_sweep(fixtures::isin2x(), 16, 21, 200.0);
  const LocalizationConfig loc = estimate_constants(sweep, sweep.spec);
  const ContainmentReport rep = disk_containment(sweep, loc);
  const nlohmann::json j = localization_report_json(loc, rep);
  for (const char* key :
       {"M_hat", "B", "c_hat", "N1_hat", "c6_hat", "eps", "delta_k",
        "checked", "max_distance", "violations"})
    CHECK(j.contains(key));
  CHECK(j["violations"].is_array());
  CHECK(j["violations"].empty());
}
