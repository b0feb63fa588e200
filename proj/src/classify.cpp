#include "ptband/classify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "ptband/constants.hpp"

namespace ptband {

namespace {

double square(double x) { return x * x; }

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// Sorted real parts of the real eigenvalues seen in the sweep.
std::vector<double> real_locations(const BandSweep& sweep) {
  std::vector<double> reals;
  for (const auto& slice : sweep.points)
    for (const BlochPoint& p : slice)
      if (p.is_real()) reals.push_back(p.lambda.real());
  std::sort(reals.begin(), reals.end());
  return reals;
}

bool matched(const std::vector<double>& sorted, double x, double tolerance) {
  auto it = std::lower_bound(sorted.begin(), sorted.end(), x);
  if (it != sorted.end() && *it - x <= tolerance) return true;
  if (it != sorted.begin() && x - *std::prev(it) <= tolerance) return true;
  return false;
}

} // namespace

std::vector<RealBand> extract_real_bands(const BandSweep& sweep,
                                         const LocalizationConfig& loc) {
  std::vector<RealBand> out;
  if (loc.N1_hat < 1) return out;
  const JordanData& jd = sweep.jd;
  const std::vector<double> reals = real_locations(sweep);
  const double win_hi = sweep.config.window.hi;

  for (int j = 0; j < jd.group_count(); ++j) {
    const JordanGroup& g = jd.group(j);
    if (!g.real || g.alg_mult % 2 == 0) continue;
    const double mu = g.mu.real();
    for (int k = std::max(1, loc.N1_hat);; ++k) {
      if (square(2.0 * k + 1.0) + mu > win_hi) break;
      const double dk = loc.delta(k);
      const std::vector<Interval> comp =
          complement_decomposition(exclusion_sets(jd, j, k, dk));
      for (size_t i = 0; i < comp.size(); ++i) {
        RealBand b;
        b.lo = square(2.0 * k + comp[i].lo) + mu + dk;
        b.hi = square(2.0 * k + comp[i].hi) + mu - dk;
        b.k = k;
        b.j = j;
        b.i = static_cast<int>(i);
        if (!(b.lo < b.hi)) continue;
        b.validated = true;
        for (int q = 0; q < 20; ++q) {
          const double x = b.lo + (b.hi - b.lo) * q / 19.0;
          if (!matched(reals, x, tol::band(x))) {
            b.validated = false;
            break;
          }
        }
        out.push_back(b);
      }
    }
  }
  return out;
}

std::vector<Interval> validated_band_union(const std::vector<RealBand>& bands) {
  std::vector<Interval> v;
  for (const RealBand& b : bands)
    if (b.validated) v.push_back({b.lo, b.hi});
  v = merge_union(std::move(v));
  // adjacent bands are separated by the delta_k trims; fuse gaps at noise
  // scale so junction points (often exact grid values) stay covered
  std::vector<Interval> fused;
  for (const Interval& iv : v) {
    if (!fused.empty() &&
        iv.lo - fused.back().hi <= 1e-9 * (1.0 + std::abs(iv.lo)))
      fused.back().hi = std::max(fused.back().hi, iv.hi);
    else
      fused.push_back(iv);
  }
  return fused;
}

std::vector<CoverageEntry> coverage_ratio(const std::vector<RealBand>& bands,
                                          const std::vector<double>& cutoffs) {
  const std::vector<Interval> uni = validated_band_union(bands);
  std::vector<CoverageEntry> out;
  for (double n : cutoffs) {
    CoverageEntry e;
    e.cutoff = n;
    e.covered = total_length(intersect(uni, {{0.0, n}}));
    e.gap = n - e.covered;
    e.defined = e.covered > 0.0;
    e.ratio = e.defined ? e.gap / e.covered
                        : std::numeric_limits<double>::quiet_NaN();
    out.push_back(e);
  }
  return out;
}

BoundedRealResult bounded_real_component_check(const BandSweep& sweep,
                                               const LocalizationConfig& loc) {
  BoundedRealResult res;
  res.applicable = sweep.jd.real_count == 0;
  if (!res.applicable) return res;
  res.threshold = square(2.0 * loc.N1_hat + 1.0) + loc.c_hat;

  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const auto& slice : sweep.points)
    for (const BlochPoint& p : slice) {
      if (!p.is_real()) continue;
      res.has_hull = true;
      lo = std::min(lo, p.lambda.real());
      hi = std::max(hi, p.lambda.real());
      if (p.lambda.real() > res.threshold)
        res.violators.push_back(p.lambda);
    }
  if (res.has_hull) res.hull = {lo, hi};
  res.pass = loc.N1_hat >= 1 && res.violators.empty();
  return res;
}

DiamCondition diam_condition(const JordanData& jd) {
  DiamCondition res;
  std::vector<int> odd;
  for (int j = 0; j < jd.group_count(); ++j)
    if (jd.group(j).real && jd.group(j).alg_mult % 2 == 1) odd.push_back(j);
  if (odd.size() < 3) return res;
  res.applicable = true;

  const int s = jd.real_count;
  auto mu = [&](int j) { return jd.group(j).mu.real(); };

  res.d = -1.0;
  for (size_t a = 0; a < odd.size(); ++a)
    for (size_t b = a + 1; b < odd.size(); ++b)
      for (size_t c = b + 1; c < odd.size(); ++c) {
        const std::array<int, 3> js{odd[a], odd[b], odd[c]};
        double best = std::numeric_limits<double>::infinity();
        std::array<int, 3> best_is{};
        std::array<double, 3> best_sums{};
        for (int i1 = 0; i1 < s; ++i1)
          for (int i2 = 0; i2 < s; ++i2)
            for (int i3 = 0; i3 < s; ++i3) {
              const std::array<double, 3> sums{mu(js[0]) + mu(i1),
                                               mu(js[1]) + mu(i2),
                                               mu(js[2]) + mu(i3)};
              const double diam =
                  *std::max_element(sums.begin(), sums.end()) -
                  *std::min_element(sums.begin(), sums.end());
              if (diam < best) {
                best = diam;
                best_is = {i1, i2, i3};
                best_sums = sums;
              }
            }
        if (best > res.d) {
          res.d = best;
          res.groups = js;
          res.partners = best_is;
          res.sums = best_sums;
        }
      }
  return res;
}

HalflineVerdict halfline_verdict(const std::vector<RealBand>& bands,
                                 const JordanData& jd,
                                 const LocalizationConfig& loc,
                                 const DiamCondition& diam, double lambda_max,
                                 double scan_step) {
  HalflineVerdict v;
  v.d = diam.d;
  v.lambda_max = lambda_max;
  v.scan_step = scan_step;
  if (!diam.applicable || !(diam.d > 0.0)) {
    v.status = "not-applicable";
    return v;
  }
  v.applicable = true;

  // beta_k = 2 * (largest deviation of the image of the exclusion intervals
  // from the nearest window center (2k+n)^2 + (mu_i + mu_j)/2)
  for (const auto& [k, dk] : loc.delta_k) {
    double alpha = 0.0;
    for (int p : diam.groups) {
      const double mu_p = jd.group(p).mu.real();
      for (int i = 0; i < jd.real_count; ++i) {
        const double diff = jd.group(i).mu.real() - mu_p;
        const double half_sum = (jd.group(i).mu.real() + mu_p) / 2.0;
        const double c0 = diff / (8.0 * k), w0 = dk / (8.0 * k);
        const double c1 = diff / (4.0 * (2.0 * k + 1.0));
        const double w1 = dk / (4.0 * (2.0 * k + 1.0));
        struct Piece {
          double tl, th;
          int np;
        };
        for (const Piece pc :
             {Piece{c0 - w0, c0 + w0, 0}, Piece{1.0 + c1 - w1, 1.0 + c1 + w1, 1},
              Piece{-1.0 + c1 - w1, -1.0 + c1 + w1, -1}}) {
          const double center = square(2.0 * k + pc.np) + half_sum;
          for (double tt : {pc.tl, pc.th})
            alpha = std::max(alpha,
                             std::abs(square(2.0 * k + tt) + mu_p - center));
        }
      }
    }
    v.beta_k[k] = 2.0 * alpha;
  }

  v.k_threshold = -1;
  for (auto it = v.beta_k.rbegin(); it != v.beta_k.rend(); ++it) {
    if (!(4.0 * it->second < diam.d)) break;
    v.k_threshold = it->first;
  }
  if (v.k_threshold < 0) {
    v.status = "threshold-not-reached";
    return v;
  }

  // the three families of excluded windows must have empty intersection
  std::array<std::vector<Interval>, 3> wins;
  for (int pi = 0; pi < 3; ++pi) {
    const double mu_p = jd.group(diam.groups[static_cast<size_t>(pi)]).mu.real();
    for (const auto& [k, beta] : v.beta_k) {
      if (k < v.k_threshold) continue;
      for (int i = 0; i < jd.real_count; ++i) {
        const double half_sum = (jd.group(i).mu.real() + mu_p) / 2.0;
        for (int np : {-1, 0, 1}) {
          const double c = square(2.0 * k + np) + half_sum;
          wins[static_cast<size_t>(pi)].push_back({c - beta, c + beta});
        }
      }
    }
    wins[static_cast<size_t>(pi)] =
        merge_union(std::move(wins[static_cast<size_t>(pi)]));
  }
  v.exclusion_intersection_empty =
      intersect(intersect(wins[0], wins[1]), wins[2]).empty();

  // coverage scan on the validated band union
  const std::vector<Interval> uni = validated_band_union(bands);
  const double floor_mu =
      std::max({jd.group(diam.groups[0]).mu.real(),
                jd.group(diam.groups[1]).mu.real(),
                jd.group(diam.groups[2]).mu.real()});
  const double h_floor =
      square(2.0 * v.k_threshold - 1.0) + floor_mu + loc.delta(v.k_threshold);
  double last_hole = -1.0;
  bool any_hole = false;
  const long n_grid = std::lround(std::floor(lambda_max / scan_step));
  for (long g = 0; g <= n_grid; ++g) {
    const double x = g * scan_step;
    if (covered(uni, x)) continue;
    any_hole = true;
    last_hole = x;
    if (x >= h_floor && v.holes.size() < 200) v.holes.push_back(x);
  }

  if (!any_hole)
    v.H_hat = 0.0;
  else if (last_hole + 10.0 * scan_step <= lambda_max)
    v.H_hat = last_hole + scan_step;

  if (v.H_hat.has_value()) {
    v.status = "ok";
    v.verified = v.exclusion_intersection_empty;
  } else {
    v.status = "window-too-small";
  }
  return v;
}

ClassificationReport classify_spectrum(const BandSweep& sweep,
                                       const LocalizationConfig& loc,
                                       const ClassifyOptions& opts) {
  ClassificationReport rep;
  for (int j = 0; j < sweep.jd.group_count(); ++j)
    if (sweep.jd.group(j).real && sweep.jd.group(j).alg_mult % 2 == 1)
      rep.coverage_applicable = true;

  rep.bands = extract_real_bands(sweep, loc);
  rep.validated_union = validated_band_union(rep.bands);
  rep.coverage = coverage_ratio(rep.bands, opts.cutoffs);
  rep.bounded_real = bounded_real_component_check(sweep, loc);
  rep.diam = diam_condition(sweep.jd);
  const double lambda_max =
      opts.lambda_max > 0.0 ? opts.lambda_max : sweep.config.window.hi;
  rep.halfline = halfline_verdict(rep.bands, sweep.jd, loc, rep.diam,
                                  lambda_max, opts.scan_step);
  return rep;
}

nlohmann::json classification_report_json(const ClassificationReport& report) {
  nlohmann::json bands = nlohmann::json::array();
  for (const RealBand& b : report.bands)
    bands.push_back({{"lo", b.lo},
                     {"hi", b.hi},
                     {"k", b.k},
                     {"j", b.j},
                     {"i", b.i},
                     {"validated", b.validated}});

  nlohmann::json uni = nlohmann::json::array();
  for (const Interval& iv : report.validated_union)
    uni.push_back({iv.lo, iv.hi});

  nlohmann::json coverage = nlohmann::json::array();
  for (const CoverageEntry& e : report.coverage) {
    nlohmann::json row{{"cutoff", e.cutoff},
                       {"covered", e.covered},
                       {"gap", e.gap},
                       {"defined", e.defined}};
    if (e.defined)
      row["ratio"] = e.ratio;
    else
      row["ratio"] = nullptr;
    coverage.push_back(row);
  }

  const BoundedRealResult& br = report.bounded_real;
  nlohmann::json bounded{{"applicable", br.applicable},
                         {"pass", br.pass},
                         {"threshold", br.threshold},
                         {"has_hull", br.has_hull}};
  if (br.has_hull)
    bounded["hull"] = {br.hull.lo, br.hull.hi};
  else
    bounded["hull"] = nullptr;
  nlohmann::json violators = nlohmann::json::array();
  for (Complex z : br.violators) violators.push_back({z.real(), z.imag()});
  bounded["violators"] = violators;

  const DiamCondition& dc = report.diam;
  nlohmann::json diam{{"applicable", dc.applicable},
                      {"d", dc.d},
                      {"groups", dc.groups},
                      {"partners", dc.partners},
                      {"sums", dc.sums}};

  const HalflineVerdict& hv = report.halfline;
  nlohmann::json beta = nlohmann::json::array();
  for (const auto& [k, b] : hv.beta_k)
    beta.push_back({{"k", k}, {"beta", b}});
  nlohmann::json halfline{{"applicable", hv.applicable},
                          {"status", hv.status},
                          {"verified", hv.verified},
                          {"d", hv.d},
                          {"k_threshold", hv.k_threshold},
                          {"exclusion_intersection_empty",
                           hv.exclusion_intersection_empty},
                          {"beta_k", beta},
                          {"lambda_max", hv.lambda_max},
                          {"scan_step", hv.scan_step},
                          {"holes", hv.holes}};
  if (hv.H_hat.has_value())
    halfline["H_hat"] = *hv.H_hat;
  else
    halfline["H_hat"] = nullptr;

  return {{"coverage_applicable", report.coverage_applicable},
          {"real_bands", bands},
          {"validated_union", uni},
          {"coverage", coverage},
          {"bounded_real_component", bounded},
          {"diam", diam},
          {"halfline", halfline}};
}

std::string bands_csv(const std::vector<RealBand>& bands) {
  std::string out = "lo,hi,k,j,i,validated\n";
  for (const RealBand& b : bands) {
    out += fmt17(b.lo) + "," + fmt17(b.hi) + "," + std::to_string(b.k) + "," +
           std::to_string(b.j) + "," + std::to_string(b.i) + "," +
           (b.validated ? "1" : "0") + "\n";
  }
  return out;
}

} // namespace ptband
