#include "ptband/localization.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "ptband/constants.hpp"

namespace ptband {

namespace {

constexpr double boundary_eps = 1e-14;
constexpr double cond_slack = 1e-12;

bool near_boundary(double t) {
  for (double b : {-2.0 / 3.0, -1.0 / 3.0, 1.0 / 3.0, 2.0 / 3.0})
    if (std::abs(t - b) <= boundary_eps) return true;
  return false;
}

double real_mu(const JordanData& jd, int j) {
  return jd.group(j).mu.real();
}

// Least-squares slope/intercept of y against x.
std::pair<double, double> linear_fit(const std::vector<double>& x,
                                     const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double denom = n * sxx - sx * sx;
  const double slope = denom != 0.0 ? (n * sxy - sx * sy) / denom : 0.0;
  return {slope, (sy - slope * sx) / n};
}

} // namespace

std::vector<int> resonant_index_set(int k, double t) {
  if (!(t > -1.0 && t <= 1.0))
    throw std::domain_error("resonant_index_set: t must lie in (-1, 1]");
  if (near_boundary(t)) return {k};
  std::vector<int> out{k};
  int partner = k;
  if (std::abs(t) < 1.0 / 3.0)
    partner = -k;
  else if (t > 2.0 / 3.0)
    partner = -k - 1;
  else if (t < -2.0 / 3.0)
    partner = -k + 1;
  if (partner != k) out.push_back(partner);
  return out;
}

GapBoundResult gap_bound_check(int k_max, const std::vector<double>& ts) {
  GapBoundResult res;
  res.worst_margin = std::numeric_limits<double>::infinity();
  for (double t : ts) {
    for (int k = -k_max; k <= k_max; ++k) {
      if (std::abs(k) <= 1) continue;
      const std::vector<int> a = resonant_index_set(k, t);
      const double bound = 4.0 / 3.0 * (2.0 * std::abs(k) - 1.0);
      const double ck = (2.0 * k + t) * (2.0 * k + t);
      for (int n = -2 * k_max; n <= 2 * k_max; ++n) {
        if (std::find(a.begin(), a.end(), n) != a.end()) continue;
        const double cn = (2.0 * n + t) * (2.0 * n + t);
        const double margin = std::abs(cn - ck) - bound;
        if (margin < res.worst_margin) {
          res.worst_margin = margin;
          res.worst_k = k;
          res.worst_n = n;
          res.worst_t = t;
        }
      }
    }
  }
  res.pass = res.worst_margin >= -1e-9;
  return res;
}

double EpsilonEstimate::eps(int k, int j) const {
  for (const EpsilonEntry& e : entries)
    if (e.k == k && e.j == j) return e.eps_hat;
  return 0.0;
}

double EpsilonEstimate::eps_max(int k) const {
  double out = 0.0;
  for (const EpsilonEntry& e : entries)
    if (e.k == k) out = std::max(out, e.eps_hat);
  return out;
}

bool EpsilonEstimate::has_block(int k) const {
  for (const EpsilonEntry& e : entries)
    if (e.k == k) return true;
  return false;
}

EpsilonEstimate epsilon_localization(const BandSweep& sweep,
                                     const JordanData& jd,
                                     const PotentialNorms& norms,
                                     int fit_k_min) {
  std::map<std::pair<int, int>, double> table;
  for (size_t i = 0; i < sweep.t.size(); ++i)
    for (const BlochPoint& p : sweep.points[i]) {
      if (p.cluster_j < 0 || p.cluster_j >= jd.group_count()) continue;
      const Complex center =
          unperturbed_eigenvalue(jd.group(p.cluster_j).mu, p.cluster_k, p.t);
      double& slot = table[{p.cluster_k, p.cluster_j}];
      slot = std::max(slot, std::abs(p.lambda - center));
    }

  EpsilonEstimate est;
  est.entries.reserve(table.size());
  for (const auto& [key, eps] : table)
    est.entries.push_back({key.first, key.second, eps});

  for (const EpsilonEntry& e : est.entries) {
    if (e.k == 0) continue;
    const int r = jd.group(e.j).max_chain_len;
    const double x = 1.0 / std::abs(e.k) + norms.q_k(e.k);
    est.c6_hat = std::max(est.c6_hat, e.eps_hat / std::pow(x, 1.0 / r));
  }

  for (int j = 0; j < jd.group_count(); ++j) {
    std::vector<double> lx, ly;
    for (const EpsilonEntry& e : est.entries) {
      if (e.j != j || e.k < fit_k_min || e.eps_hat <= 0.0) continue;
      lx.push_back(std::log(1.0 / e.k + norms.q_k(e.k)));
      ly.push_back(std::log(e.eps_hat));
    }
    if (lx.size() < 5) continue;
    auto [slope, intercept] = linear_fit(lx, ly);
    est.fits.push_back({j, slope, intercept, static_cast<int>(lx.size())});
  }
  return est;
}

double LocalizationConfig::delta(int k) const {
  if (delta_k.empty()) return 0.0;
  auto it = delta_k.find(k);
  if (it != delta_k.end()) return it->second;
  if (k > delta_k.rbegin()->first) return delta_k.rbegin()->second;
  return delta_k.begin()->second;
}

LocalizationConfig estimate_constants(const BandSweep& sweep,
                                      const PotentialSpec& spec) {
  bool any = false;
  double m_hat = 0.0;
  int k_abs_max = 0;
  for (const auto& slice : sweep.points)
    for (const BlochPoint& p : slice) {
      any = true;
      m_hat = std::max(m_hat, p.sup_norm);
      k_abs_max = std::max(k_abs_max, std::abs(p.cluster_k));
    }
  if (!any) throw std::invalid_argument("estimate_constants: empty sweep");
  if (m_hat <= 0.0)
    throw std::invalid_argument(
        "estimate_constants: sweep was run without sup-norm evaluation");

  LocalizationConfig cfg;
  cfg.M_hat = m_hat;
  const PotentialNorms norms = spec.norms(k_abs_max + 2);
  cfg.B = norms.B;
  cfg.c_hat = cfg.M_hat * cfg.B;
  cfg.eps = epsilon_localization(sweep, sweep.jd, norms);

  for (int k = 1;; ++k) {
    if (!cfg.eps.has_block(k) || !cfg.eps.has_block(-k) ||
        !cfg.eps.has_block(-k - 1) || !cfg.eps.has_block(-k + 1))
      break;
    cfg.delta_k[k] = 2.0 * std::max({cfg.eps.eps_max(k), cfg.eps.eps_max(-k),
                                     cfg.eps.eps_max(-k - 1),
                                     cfg.eps.eps_max(-k + 1)});
  }

  // smallness conditions on delta_k relative to the constant-matrix spectrum
  const JordanData& jd = sweep.jd;
  double mu_real_abs = 0.0;
  double min_imag = std::numeric_limits<double>::infinity();
  double min_gap = std::numeric_limits<double>::infinity();
  for (int j = 0; j < jd.group_count(); ++j) {
    const JordanGroup& g = jd.group(j);
    if (g.real)
      mu_real_abs = std::max(mu_real_abs, std::abs(g.mu.real()));
    else
      min_imag = std::min(min_imag, std::abs(g.mu.imag()));
  }
  for (int j = 0; j < jd.real_count; ++j)
    for (int i = 0; i < jd.real_count; ++i)
      if (i != j)
        min_gap = std::min(min_gap, std::abs(real_mu(jd, j) - real_mu(jd, i)));

  auto holds = [&](int k, double dk) {
    if (dk > cfg.c_hat + cond_slack) return false;
    if (4.0 / 3.0 * (2.0 * k - 1.0) + cond_slack < 3.0 * cfg.c_hat + mu_real_abs)
      return false;
    if (dk > min_imag + cond_slack) return false;
    if (dk > min_gap + cond_slack) return false;
    return true;
  };

  cfg.N1_hat = -1;
  for (auto it = cfg.delta_k.rbegin(); it != cfg.delta_k.rend(); ++it) {
    if (!holds(it->first, it->second)) break;
    cfg.N1_hat = it->first;
  }
  return cfg;
}

ContainmentReport disk_containment(const BandSweep& sweep,
                                   const LocalizationConfig& config) {
  ContainmentReport rep;
  rep.radius = config.c_hat;
  for (size_t i = 0; i < sweep.t.size(); ++i) {
    const double t = sweep.t[i];
    for (const BlochPoint& p : sweep.points[i]) {
      const double r = std::sqrt(std::max(0.0, p.lambda.real()));
      double dist = std::numeric_limits<double>::infinity();
      auto probe = [&](int n) {
        const double c = (2.0 * n + t) * (2.0 * n + t);
        dist = std::min(dist, std::abs(p.lambda - Complex(c, 0.0)));
      };
      for (int base : {static_cast<int>(std::lround((r - t) / 2.0)),
                       static_cast<int>(std::lround((-r - t) / 2.0)), 0})
        for (int off = -2; off <= 2; ++off) probe(base + off);
      ++rep.checked;
      rep.max_distance = std::max(rep.max_distance, dist);
      if (dist > config.c_hat + tol::disk_slack(std::abs(p.lambda)))
        rep.violations.push_back({t, p.lambda, dist});
    }
  }
  return rep;
}

std::vector<Interval> exclusion_sets(const JordanData& jd, int j, int k,
                                     double delta) {
  if (j < 0 || j >= jd.group_count() || !jd.group(j).real)
    throw std::domain_error(
        "exclusion_sets: j must index a real eigenvalue group");
  if (k < 1) throw std::domain_error("exclusion_sets: k must be positive");
  if (delta < 0.0) throw std::domain_error("exclusion_sets: negative width");

  std::vector<Interval> out;
  const double mu_j = real_mu(jd, j);
  for (int i = 0; i < jd.real_count; ++i) {
    const double diff = real_mu(jd, i) - mu_j;
    const double c0 = diff / (8.0 * k);
    const double w0 = delta / (8.0 * k);
    const double c1 = diff / (4.0 * (2.0 * k + 1.0));
    const double w1 = delta / (4.0 * (2.0 * k + 1.0));
    for (Interval iv : {Interval{c0 - w0, c0 + w0},
                        Interval{1.0 + c1 - w1, 1.0 + c1 + w1},
                        Interval{-1.0 + c1 - w1, -1.0 + c1 + w1}}) {
      iv.lo = std::max(iv.lo, -1.0);
      iv.hi = std::min(iv.hi, 1.0);
      if (!iv.empty()) out.push_back(iv);
    }
  }
  return merge_union(std::move(out));
}

std::vector<Interval> complement_decomposition(
    const std::vector<Interval>& u) {
  return complement_in(u, -1.0, 1.0);
}

nlohmann::json localization_report_json(const LocalizationConfig& config,
                                        const ContainmentReport& containment) {
  nlohmann::json eps = nlohmann::json::array();
  for (const EpsilonEntry& e : config.eps.entries)
    eps.push_back({{"k", e.k}, {"j", e.j}, {"eps_hat", e.eps_hat}});

  nlohmann::json fits = nlohmann::json::array();
  for (const EpsilonFit& f : config.eps.fits)
    fits.push_back(
        {{"j", f.j}, {"slope", f.slope}, {"points", f.points}});

  nlohmann::json deltas = nlohmann::json::array();
  for (const auto& [k, d] : config.delta_k)
    deltas.push_back({{"k", k}, {"delta", d}});

  nlohmann::json violations = nlohmann::json::array();
  for (const ContainmentViolation& v : containment.violations)
    violations.push_back({{"t", v.t},
                          {"re_lambda", v.lambda.real()},
                          {"im_lambda", v.lambda.imag()},
                          {"distance", v.distance}});

  return {{"M_hat", config.M_hat},
          {"B", config.B},
          {"c_hat", config.c_hat},
          {"N1_hat", config.N1_hat},
          {"c6_hat", config.eps.c6_hat},
          {"eps", eps},
          {"fits", fits},
          {"delta_k", deltas},
          {"checked", containment.checked},
          {"max_distance", containment.max_distance},
          {"violations", violations}};
}

} // namespace ptband
