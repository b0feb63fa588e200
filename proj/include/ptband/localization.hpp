#pragma once

#include <map>
#include <vector>

#include <nlohmann/json.hpp>

#include "ptband/averaged.hpp"
#include "ptband/bloch.hpp"
#include "ptband/intervals.hpp"

namespace ptband {

// Fourier-block indices whose free eigenvalues (2n+t)^2 can resonate with
// block k at quasimomentum t.  The set is {k} plus at most one partner:
// -k near t = 0, -k-1 near t = 1 and -k+1 near t = -1; the switching points
// t = +-1/3, +-2/3 are assigned to the single-index case.
std::vector<int> resonant_index_set(int k, double t);

// Exhaustive check that every non-resonant block stays at least
// (4/3)(2|k|-1) away from (2k+t)^2, for 1 < |k| <= k_max, |n| <= 2 k_max and
// t in the supplied grid.  worst_margin = min(distance - bound).
struct GapBoundResult {
  bool pass = false;
  double worst_margin = 0.0;
  int worst_k = 0;
  int worst_n = 0;
  double worst_t = 0.0;
};
GapBoundResult gap_bound_check(int k_max, const std::vector<double>& ts);

// Empirical deviation of the computed eigenvalues from the constant-operator
// values (2k+t)^2 + mu_j, keyed by the (block, group) attribution of the
// sweep, together with a power-law fit against x_k = 1/|k| + q_k.
struct EpsilonEntry {
  int k = 0;
  int j = 0;
  double eps_hat = 0.0;
};

struct EpsilonFit {
  int j = 0;
  double slope = 0.0;
  double intercept = 0.0;
  int points = 0;
};

struct EpsilonEstimate {
  std::vector<EpsilonEntry> entries; // sorted by (k, j)
  std::vector<EpsilonFit> fits;      // per group, when >= 5 usable points
  double c6_hat = 0.0; // least C with eps_hat <= C * x_k^(1/r_j) on the data

  double eps(int k, int j) const;  // 0 when the pair carries no data
  double eps_max(int k) const;     // max over j; 0 when the block is absent
  bool has_block(int k) const;
};

EpsilonEstimate epsilon_localization(const BandSweep& sweep,
                                     const JordanData& jd,
                                     const PotentialNorms& norms,
                                     int fit_k_min = 5);

// Empirical localization constants: M_hat bounds the sup norm of normalized
// Bloch functions, B is the L2 norm of the potential over one period,
// c_hat = M_hat * B is the disk radius, delta_k drives the exclusion
// intervals and N1_hat is the least block index from which the smallness
// conditions hold through the rest of the data range.
struct LocalizationConfig {
  double M_hat = 0.0;
  double B = 0.0;
  double c_hat = 0.0;
  std::map<int, double> delta_k; // contiguous k >= 1 with full block data
  int N1_hat = -1;               // -1: conditions not attained in range
  EpsilonEstimate eps;

  // delta_k lookup, extended as nonincreasing beyond the data range.
  double delta(int k) const;
};

LocalizationConfig estimate_constants(const BandSweep& sweep,
                                      const PotentialSpec& spec);

// Every computed eigenvalue must lie within c_hat of some free eigenvalue
// (2n+t)^2; violations beyond a relative slack are collected.
struct ContainmentViolation {
  double t = 0.0;
  Complex lambda;
  double distance = 0.0;
};

struct ContainmentReport {
  int checked = 0;
  double radius = 0.0;       // c_hat in force
  double max_distance = 0.0; // worst center distance seen
  std::vector<ContainmentViolation> violations;

  bool pass() const { return violations.empty(); }
};

ContainmentReport disk_containment(const BandSweep& sweep,
                                   const LocalizationConfig& config);

// Quasimomentum intervals around the resonances of (2k+t)^2 + mu_j with the
// shifted partner blocks, for the real eigenvalue group j: three intervals
// per real group i, centered at (mu_i-mu_j)/(8k) and at
// +-1 + (mu_i-mu_j)/(4(2k+1)), of half-width delta/(8k) resp.
// delta/(4(2k+1)); clipped to (-1, 1] and merged.
std::vector<Interval> exclusion_sets(const JordanData& jd, int j, int k,
                                     double delta);

// (-1, 1] minus the given intervals, as ordered closed intervals.
std::vector<Interval> complement_decomposition(const std::vector<Interval>& u);

nlohmann::json localization_report_json(const LocalizationConfig& config,
                                        const ContainmentReport& containment);

} // namespace ptband
