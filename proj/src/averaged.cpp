#include "ptband/averaged.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <stdexcept>

#include "ptband/constants.hpp"

namespace ptband {

namespace {

// Orthonormal nullspace basis of M at a relative singular-value threshold.
Eigen::MatrixXcd nullspace(const Eigen::MatrixXcd& M, double rel_tol) {
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(M, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double smax = sv.size() ? sv(0) : 0.0;
  const double cut = rel_tol * std::max(1.0, smax);
  int null_dim = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) <= cut) ++null_dim;
  return svd.matrixV().rightCols(null_dim);
}

// Columns of cand made orthogonal to span(obstruction); returns up to `want`
// well-conditioned directions.
Eigen::MatrixXcd fresh_directions(const Eigen::MatrixXcd& cand,
                                  const Eigen::MatrixXcd& obstruction,
                                  int want) {
  Eigen::MatrixXcd rest = cand;
  if (obstruction.cols() > 0) {
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(obstruction);
    Eigen::MatrixXcd q = qr.householderQ() *
        Eigen::MatrixXcd::Identity(obstruction.rows(), obstruction.cols());
    rest -= q * (q.adjoint() * cand);
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(rest);
  Eigen::MatrixXcd q = qr.householderQ() *
      Eigen::MatrixXcd::Identity(rest.rows(), std::min(rest.rows(), rest.cols()));
  return q.leftCols(std::min<int>(want, static_cast<int>(q.cols())));
}

// Jordan chains of B = M - mu I given the algebraic multiplicity.  Standard
// staircase: pick chain tops level by level inside ker(B^p), descending.
std::vector<JordanChain> build_chains(const Eigen::MatrixXcd& M, Complex mu,
                                      int alg_mult, bool* ok) {
  const int m = static_cast<int>(M.rows());
  const Eigen::MatrixXcd B = M - mu * Eigen::MatrixXcd::Identity(m, m);
  const double rel_tol = 1e-8 * m;

  std::vector<Eigen::MatrixXcd> null_bases; // ker(B^p), p = 1, 2, ...
  Eigen::MatrixXcd Bp = B;
  int prev = 0;
  while (true) {
    Eigen::MatrixXcd N = nullspace(Bp, rel_tol);
    const int dim = static_cast<int>(N.cols());
    if (dim <= prev && !null_bases.empty()) break; // stabilized early
    null_bases.push_back(N);
    prev = dim;
    if (dim >= alg_mult || static_cast<int>(null_bases.size()) >= m) break;
    Bp = Bp * B;
  }
  const int r = static_cast<int>(null_bases.size());
  auto nullity = [&](int p) {
    return p <= 0 ? 0 : static_cast<int>(null_bases[static_cast<size_t>(p - 1)].cols());
  };
  *ok = (nullity(r) == alg_mult);

  auto weyr = [&](int p) {
    if (p < 1 || p > r) return 0;
    return nullity(p) - nullity(p - 1);
  };

  std::vector<JordanChain> chains;
  // vectors each finished chain contributes at level p (1-based levels)
  std::vector<std::vector<Eigen::VectorXcd>> at_level(static_cast<size_t>(r) + 2);
  for (int p = r; p >= 1; --p) {
    const int want = weyr(p) - weyr(p + 1);
    if (want <= 0) continue;
    Eigen::MatrixXcd obstruction(m, 0);
    {
      Eigen::MatrixXcd lower(m, 0);
      if (p >= 2) lower = null_bases[static_cast<size_t>(p - 2)];
      const auto& live = at_level[static_cast<size_t>(p)];
      obstruction.resize(m, lower.cols() + static_cast<Eigen::Index>(live.size()));
      obstruction.leftCols(lower.cols()) = lower;
      for (size_t i = 0; i < live.size(); ++i)
        obstruction.col(lower.cols() + static_cast<Eigen::Index>(i)) = live[i];
    }
    Eigen::MatrixXcd tops =
        fresh_directions(null_bases[static_cast<size_t>(p - 1)], obstruction, want);
    if (tops.cols() < want) *ok = false;
    for (int c = 0; c < tops.cols(); ++c) {
      JordanChain chain;
      chain.vectors.assign(static_cast<size_t>(p), Eigen::VectorXcd());
      chain.vectors[static_cast<size_t>(p - 1)] = tops.col(c);
      for (int q = p - 1; q >= 1; --q)
        chain.vectors[static_cast<size_t>(q - 1)] = B * chain.vectors[static_cast<size_t>(q)];
      const double lead = chain.vectors[0].norm();
      if (lead < 1e-300) {
        *ok = false;
        continue;
      }
      for (auto& v : chain.vectors) v /= lead;
      for (int lvl = 1; lvl <= p; ++lvl)
        at_level[static_cast<size_t>(lvl)].push_back(chain.vectors[static_cast<size_t>(lvl - 1)]);
      chains.push_back(std::move(chain));
    }
  }
  // longest chains first, stable order
  std::stable_sort(chains.begin(), chains.end(),
                   [](const JordanChain& a, const JordanChain& b) {
                     return a.length() > b.length();
                   });
  return chains;
}

Eigen::MatrixXcd chain_matrix(const std::vector<JordanGroup>& groups,
                              bool adjoint) {
  int cols = 0;
  for (const auto& g : groups)
    for (const auto& c : adjoint ? g.adjoint_chains : g.chains)
      cols += c.length();
  if (groups.empty()) return {};
  const int m = static_cast<int>(groups.front().chains.front().vectors.front().size());
  Eigen::MatrixXcd M(m, cols);
  int at = 0;
  for (const auto& g : groups)
    for (const auto& c : adjoint ? g.adjoint_chains : g.chains)
      for (const auto& v : c.vectors) M.col(at++) = v;
  return M;
}

} // namespace

int JordanData::nearest_group(Complex value) const {
  int best = 0;
  double d = std::numeric_limits<double>::infinity();
  for (int j = 0; j < group_count(); ++j) {
    const double dj = std::abs(groups[static_cast<size_t>(j)].mu - value);
    if (dj < d) {
      d = dj;
      best = j;
    }
  }
  return best;
}

JordanData jordan_analyze(const Eigen::MatrixXd& A) {
  if (A.rows() != A.cols() || A.rows() < 1)
    throw std::invalid_argument("jordan_analyze: matrix must be square");
  const int m = static_cast<int>(A.rows());
  if (m > 16)
    throw std::invalid_argument(
        "jordan_analyze: dimensions above 16 are not supported");

  JordanData out;
  out.m = m;
  out.cluster_tol = tol::cluster(A.norm());

  Eigen::EigenSolver<Eigen::MatrixXd> es(A);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("jordan_analyze: eigenvalue iteration failed");
  const Eigen::VectorXcd ev = es.eigenvalues();

  // Cluster raw eigenvalues at the tolerance (union-find over close pairs).
  std::vector<int> parent(static_cast<size_t>(m));
  for (int i = 0; i < m; ++i) parent[static_cast<size_t>(i)] = i;
  std::function<int(int)> find = [&](int i) {
    while (parent[static_cast<size_t>(i)] != i) i = parent[static_cast<size_t>(i)] = parent[static_cast<size_t>(parent[static_cast<size_t>(i)])];
    return i;
  };
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j)
      if (std::abs(ev(i) - ev(j)) <= out.cluster_tol)
        parent[static_cast<size_t>(find(i))] = find(j);

  std::map<int, std::vector<int>> members;
  for (int i = 0; i < m; ++i) members[find(i)].push_back(i);

  for (const auto& [root, idx] : members) {
    (void)root;
    Complex mu{0.0, 0.0};
    for (int i : idx) mu += ev(i);
    mu /= static_cast<double>(idx.size());
    JordanGroup g;
    g.real = std::abs(mu.imag()) <= out.cluster_tol;
    g.mu = g.real ? Complex(mu.real(), 0.0) : mu;
    g.alg_mult = static_cast<int>(idx.size());
    out.groups.push_back(std::move(g));
  }

  // Symmetrize conjugate pairs of representatives so pairing is exact.
  for (auto& g : out.groups) {
    if (g.real) continue;
    for (auto& h : out.groups)
      if (!h.real && std::abs(h.mu - std::conj(g.mu)) <= 2.0 * out.cluster_tol &&
          h.mu.imag() * g.mu.imag() < 0.0) {
        const Complex sym = 0.5 * (g.mu + std::conj(h.mu));
        g.mu = sym;
        h.mu = std::conj(sym);
      }
  }

  const Eigen::MatrixXcd Ac = A.cast<Complex>();
  const Eigen::MatrixXcd At = A.transpose().cast<Complex>();
  for (auto& g : out.groups) {
    bool ok1 = true, ok2 = true;
    g.chains = build_chains(Ac, g.mu, g.alg_mult, &ok1);
    g.adjoint_chains = build_chains(At, std::conj(g.mu), g.alg_mult, &ok2);
    if (!ok1 || !ok2) out.ambiguous = true;
    g.geo_mult = static_cast<int>(g.chains.size());
    g.max_chain_len = 1;
    for (const auto& c : g.chains)
      g.max_chain_len = std::max(g.max_chain_len, c.length());
    for (const auto& c : g.chains)
      g.eigen_residual =
          std::max(g.eigen_residual, (Ac * c.vectors[0] - g.mu * c.vectors[0]).norm());
    for (const auto& c : g.adjoint_chains)
      g.eigen_residual = std::max(
          g.eigen_residual, (At * c.vectors[0] - std::conj(g.mu) * c.vectors[0]).norm());
  }

  std::sort(out.groups.begin(), out.groups.end(),
            [](const JordanGroup& a, const JordanGroup& b) {
              if (a.real != b.real) return a.real;
              if (a.mu.real() != b.mu.real()) return a.mu.real() < b.mu.real();
              return a.mu.imag() < b.mu.imag();
            });
  out.real_count = static_cast<int>(
      std::count_if(out.groups.begin(), out.groups.end(),
                    [](const JordanGroup& g) { return g.real; }));

  for (size_t i = 0; i + 1 < out.groups.size(); ++i)
    for (size_t j = i + 1; j < out.groups.size(); ++j)
      if (std::abs(out.groups[i].mu - out.groups[j].mu) < 2.0 * out.cluster_tol)
        out.ambiguous = true;

  // Condition of the pairing between the two chain families; a blow-up here
  // flags an unreliable basis even when the staircase succeeded formally.
  const Eigen::MatrixXcd U = chain_matrix(out.groups, false);
  const Eigen::MatrixXcd W = chain_matrix(out.groups, true);
  if (U.cols() == m && W.cols() == m) {
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(W.adjoint() * U);
    const auto& sv = svd.singularValues();
    out.biorth_condition =
        sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1)
                                : std::numeric_limits<double>::infinity();
    if (!(out.biorth_condition < 1e12)) out.ambiguous = true;
  } else {
    out.ambiguous = true;
    out.biorth_condition = std::numeric_limits<double>::infinity();
  }

  return out;
}

std::vector<HalfLine> half_lines(const JordanData& jd) {
  std::vector<HalfLine> out;
  out.reserve(jd.groups.size());
  for (const auto& g : jd.groups) out.push_back({g.mu, g.real});
  return out;
}

int unperturbed_multiplicity(int m, double t, int k) {
  if (std::abs(t) < 1e-14) return k == 0 ? m : 2 * m;
  if (std::abs(t - 1.0) < 1e-14) return 2 * m;
  return m;
}

} // namespace ptband
