#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ptband/localization.hpp"

namespace ptband {

// One certified interval of real spectrum: the image of a resonance-free
// quasimomentum interval (index i) under (2k+t)^2 + mu_j, shrunk by delta_k
// on both sides.  validated marks that every sampled point of the interval
// has a matching real eigenvalue in the sweep.
struct RealBand {
  double lo = 0.0;
  double hi = 0.0;
  int k = 0;
  int j = 0;
  int i = 0;
  bool validated = false;
};

struct CoverageEntry {
  double cutoff = 0.0;
  double covered = 0.0; // measure of band union intersect [0, cutoff]
  double gap = 0.0;     // cutoff - covered
  double ratio = 0.0;   // gap / covered
  bool defined = false; // false when the band union misses [0, cutoff]
};

// Verdict for potentials whose constant-matrix spectrum is entirely
// non-real: the real spectrum must stay inside a bounded interval, so no
// real eigenvalue may appear beyond (2 N1_hat + 1)^2 + c_hat.
struct BoundedRealResult {
  bool applicable = false; // constant matrix has no real eigenvalue
  bool pass = false;
  double threshold = 0.0;
  bool has_hull = false;
  Interval hull{0.0, 0.0}; // hull of the real eigenvalues seen
  std::vector<Complex> violators;
};

// Spread condition on triples of odd-multiplicity real eigenvalue groups:
// d = max over triples of (min over partner assignments of the diameter of
// the three pairwise sums).  d > 0 is the gate for the half-line verdict.
struct DiamCondition {
  bool applicable = false; // at least three odd-multiplicity real groups
  double d = 0.0;
  std::array<int, 3> groups{{-1, -1, -1}};   // chosen triple (group indices)
  std::array<int, 3> partners{{-1, -1, -1}}; // minimizing assignment
  std::array<double, 3> sums{{0.0, 0.0, 0.0}};
};

// Half-line statement: beyond H_hat the validated band union covers every
// grid point of [H_hat, lambda_max] at step `scan_step`.
struct HalflineVerdict {
  bool applicable = false;
  std::string status = "not-applicable";
  bool verified = false;
  double d = 0.0;
  int k_threshold = -1; // least k with 4 beta_k < d through the data range
  bool exclusion_intersection_empty = false;
  std::map<int, double> beta_k;
  std::optional<double> H_hat;
  double lambda_max = 0.0;
  double scan_step = 0.05;
  std::vector<double> holes; // uncovered grid points above the last band gap
};

struct ClassificationReport {
  bool coverage_applicable = false; // real odd-multiplicity group exists
  std::vector<RealBand> bands;
  std::vector<Interval> validated_union;
  std::vector<CoverageEntry> coverage;
  BoundedRealResult bounded_real;
  DiamCondition diam;
  HalflineVerdict halfline;
};

// Band construction over all real odd-multiplicity groups j and blocks
// k >= max(1, N1_hat) whose image fits inside the sweep window.
std::vector<RealBand> extract_real_bands(const BandSweep& sweep,
                                         const LocalizationConfig& loc);

// Merged union of the validated bands.
std::vector<Interval> validated_band_union(const std::vector<RealBand>& bands);

std::vector<CoverageEntry> coverage_ratio(const std::vector<RealBand>& bands,
                                          const std::vector<double>& cutoffs);

BoundedRealResult bounded_real_component_check(const BandSweep& sweep,
                                               const LocalizationConfig& loc);

DiamCondition diam_condition(const JordanData& jd);

HalflineVerdict halfline_verdict(const std::vector<RealBand>& bands,
                                 const JordanData& jd,
                                 const LocalizationConfig& loc,
                                 const DiamCondition& diam, double lambda_max,
                                 double scan_step = 0.05);

struct ClassifyOptions {
  std::vector<double> cutoffs{100.0, 400.0, 900.0, 1600.0};
  double lambda_max = 0.0; // <= 0: use the top of the sweep window
  double scan_step = 0.05;
};

ClassificationReport classify_spectrum(const BandSweep& sweep,
                                       const LocalizationConfig& loc,
                                       const ClassifyOptions& opts = {});

nlohmann::json classification_report_json(const ClassificationReport& report);

// CSV with header lo,hi,k,j,i,validated.
std::string bands_csv(const std::vector<RealBand>& bands);

} // namespace ptband
