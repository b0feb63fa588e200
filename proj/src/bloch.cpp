#include "ptband/bloch.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <map>
#include <numbers>
#include <stdexcept>
#include <thread>
#include <vector>

#include <boost/numeric/odeint.hpp>
#include <lapacke.h>
#include <unsupported/Eigen/FFT>

#include "ptband/constants.hpp"

namespace ptband::defaults {

int thread_count() {
  if (const char* env = std::getenv("PTBAND_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? static_cast<int>(hw) : 1;
}

} // namespace ptband::defaults

namespace ptband {

namespace {

constexpr double pi = std::numbers::pi;

// Dense non-Hermitian eigendecomposition (LAPACK zgeev).
void dense_eigen(Eigen::MatrixXcd G, Eigen::VectorXcd& values,
                 Eigen::MatrixXcd* vectors) {
  const int n = static_cast<int>(G.rows());
  values.resize(n);
  if (vectors) vectors->resize(n, n);
  const int info = LAPACKE_zgeev(
      LAPACK_COL_MAJOR, 'N', vectors ? 'V' : 'N', n,
      reinterpret_cast<lapack_complex_double*>(G.data()), n,
      reinterpret_cast<lapack_complex_double*>(values.data()), nullptr, 1,
      vectors ? reinterpret_cast<lapack_complex_double*>(vectors->data())
              : nullptr,
      std::max(1, n));
  if (info != 0)
    throw std::runtime_error("dense_eigen: zgeev failed with info=" +
                             std::to_string(info));
}

// Row residuals of the coefficient identity (lambda - (2n+t)^2) c_n = (Q c)_n
// evaluated by convolution.  Returns {max interior row, max tail row}: tail
// rows are the indices K < |n| <= K + n_max where the truncated vector has no
// coefficients but the convolution does not vanish.
std::pair<double, double> row_residuals(const PotentialSpec& spec, double t,
                                        int K, Complex lambda,
                                        const Eigen::VectorXcd& v) {
  const int m = spec.dim();
  auto block = [&](int n) -> Eigen::VectorXcd {
    if (std::abs(n) > K) return Eigen::VectorXcd::Zero(m);
    return v.segment((n + K) * m, m);
  };
  double interior = 0.0, tail = 0.0;
  for (int n = -K - spec.n_max(); n <= K + spec.n_max(); ++n) {
    Eigen::VectorXcd conv = Eigen::VectorXcd::Zero(m);
    for (const auto& [w, c] : spec.harmonics()) {
      const int src = n - w;
      if (std::abs(src) <= K) conv += c * block(src);
    }
    const double w2 = (2.0 * n + t) * (2.0 * n + t);
    const Eigen::VectorXcd row = (lambda - w2) * block(n) - conv;
    const double r = row.cwiseAbs().maxCoeff();
    if (std::abs(n) <= K)
      interior = std::max(interior, r);
    else
      tail = std::max(tail, r);
  }
  return {interior, tail};
}

// max_x |Psi(x)| on the uniform x grid, for a unit coefficient vector.  The
// component samples are inverse DFTs of the zero-padded coefficient array.
double sup_norm_on_grid(const Eigen::VectorXcd& v, int K, int m) {
  static thread_local Eigen::FFT<double> fft;
  const int G = defaults::x_grid;
  std::vector<std::complex<double>> in(static_cast<size_t>(G)),
      out(static_cast<size_t>(G));
  Eigen::ArrayXd mag2 = Eigen::ArrayXd::Zero(G);
  for (int s = 0; s < m; ++s) {
    std::fill(in.begin(), in.end(), Complex(0.0, 0.0));
    for (int n = -K; n <= K; ++n) {
      const int bin = ((n % G) + G) % G;
      in[static_cast<size_t>(bin)] += v((n + K) * m + s);
    }
    fft.inv(out, in);
    for (int g = 0; g < G; ++g) mag2(g) += std::norm(out[static_cast<size_t>(g)]);
  }
  // fft.inv scales by 1/G; undo it and apply the 1/sqrt(pi) basis factor.
  return std::sqrt(mag2.maxCoeff()) * G / std::sqrt(pi);
}

int dominant_block(const Eigen::VectorXcd& v, int K, int m) {
  int best = 0;
  double best_norm = -1.0;
  for (int n = -K; n <= K; ++n) {
    const double w = v.segment((n + K) * m, m).squaredNorm();
    if (w > best_norm) {
      best_norm = w;
      best = n;
    }
  }
  return best;
}

struct DisjointSet {
  std::vector<int> parent;
  explicit DisjointSet(int n) : parent(static_cast<size_t>(n)) {
    for (int i = 0; i < n; ++i) parent[static_cast<size_t>(i)] = i;
  }
  int find(int i) {
    while (parent[static_cast<size_t>(i)] != i)
      i = parent[static_cast<size_t>(i)] =
          parent[static_cast<size_t>(parent[static_cast<size_t>(i)])];
    return i;
  }
  void unite(int a, int b) { parent[static_cast<size_t>(find(a))] = find(b); }
};

} // namespace

bool BlochPoint::is_real() const {
  return std::abs(lambda.imag()) <= tol::real(std::abs(lambda));
}

Interval default_window(int K) {
  return {defaults::window_lo, defaults::trust_limit(K)};
}

GalerkinMatrix build_galerkin(const PotentialSpec& spec, double t, int K) {
  if (K < spec.n_max() + 2)
    throw std::invalid_argument(
        "build_galerkin: truncation K must be at least n_max + 2");
  const int m = spec.dim();
  const int N = m * (2 * K + 1);
  GalerkinMatrix g;
  g.K = K;
  g.m = m;
  g.t = t;
  g.trust = default_window(K);
  g.matrix = Eigen::MatrixXcd::Zero(N, N);
  for (int n = -K; n <= K; ++n) {
    const double w = 2.0 * n + t;
    g.matrix.block(g.block_index(n), g.block_index(n), m, m) =
        Eigen::MatrixXcd::Identity(m, m) * (w * w);
  }
  for (const auto& [w, c] : spec.harmonics())
    for (int v = -K; v <= K; ++v) {
      const int n = v + w;
      if (std::abs(n) <= K)
        g.matrix.block(g.block_index(n), g.block_index(v), m, m) += c;
    }
  return g;
}

std::vector<BlochPoint> solve_bloch(const PotentialSpec& spec, double t, int K,
                                    Interval window, const SolveOptions& opts) {
  const GalerkinMatrix g = build_galerkin(spec, t, K);
  if (window.empty()) window = g.trust;
  if (window.hi > g.trust.hi + 1e-9)
    throw std::invalid_argument(
        "solve_bloch: window exceeds the trust limit for this truncation");

  Eigen::VectorXcd values;
  Eigen::MatrixXcd vectors;
  dense_eigen(g.matrix, values, &vectors);
  const int N = static_cast<int>(values.size());

  std::vector<int> order(static_cast<size_t>(N));
  for (int i = 0; i < N; ++i) order[static_cast<size_t>(i)] = i;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (values(a).real() != values(b).real())
      return values(a).real() < values(b).real();
    return values(a).imag() < values(b).imag();
  });

  // Multiplicity clusters: Re-sorted scan with a 2D distance merge.  The scan
  // may stop once the real gap alone rules out every later candidate.
  double abs_max = 0.0;
  for (int i = 0; i < N; ++i) abs_max = std::max(abs_max, std::abs(values(i)));
  const double tol_break = tol::mult(abs_max);
  DisjointSet ds(N);
  for (int a = 0; a < N; ++a) {
    const Complex la = values(order[static_cast<size_t>(a)]);
    for (int b = a + 1; b < N; ++b) {
      const Complex lb = values(order[static_cast<size_t>(b)]);
      if (lb.real() - la.real() > tol_break) break;
      const double tol_ab = tol::mult(std::max(std::abs(la), std::abs(lb)));
      if (std::abs(la - lb) <= tol_ab) ds.unite(a, b);
    }
  }
  std::map<int, std::vector<int>> clusters;
  for (int a = 0; a < N; ++a)
    clusters[ds.find(a)].push_back(order[static_cast<size_t>(a)]);

  std::vector<BlochPoint> out;
  for (const auto& [root, idx] : clusters) {
    (void)root;
    Complex mean{0.0, 0.0};
    for (int i : idx) mean += values(i);
    mean /= static_cast<double>(idx.size());
    if (mean.real() < window.lo || mean.real() > window.hi) continue;

    int rep = idx.front();
    for (int i : idx)
      if (std::abs(values(i) - mean) < std::abs(values(rep) - mean)) rep = i;

    BlochPoint p;
    p.t = t;
    p.lambda = mean;
    p.mult = static_cast<int>(idx.size());
    Eigen::VectorXcd v = vectors.col(rep);
    v /= v.norm();
    auto [interior, tail] = row_residuals(spec, t, K, values(rep), v);
    p.residual = interior;
    p.tail_residual = tail;
    p.cluster_k = dominant_block(v, K, spec.dim());
    if (opts.jd) {
      const Complex rel = p.lambda - unperturbed_eigenvalue(0.0, p.cluster_k, t);
      p.cluster_j = opts.jd->nearest_group(rel);
    }
    if (opts.compute_sup) p.sup_norm = sup_norm_on_grid(v, K, spec.dim());
    if (opts.keep_vectors) p.vec = std::move(v);
    out.push_back(std::move(p));
  }
  std::sort(out.begin(), out.end(), [](const BlochPoint& a, const BlochPoint& b) {
    if (a.lambda.real() != b.lambda.real())
      return a.lambda.real() < b.lambda.real();
    return a.lambda.imag() < b.lambda.imag();
  });
  return out;
}

std::vector<double> t_grid(int n) {
  if (n < 1) throw std::invalid_argument("t_grid: need at least one point");
  std::vector<double> out(static_cast<size_t>(n));
  const double half_step = 1.0 / n;
  for (int i = 1; i <= n; ++i) {
    double t = -1.0 + 2.0 * i / n;
    // nudge off the index-set boundaries where the resonant sets switch
    bool moved = true;
    while (moved) {
      moved = false;
      for (double b : {-2.0 / 3.0, -1.0 / 3.0, 1.0 / 3.0, 2.0 / 3.0})
        if (std::abs(t - b) < 1e-12) {
          t -= half_step;
          moved = true;
        }
    }
    out[static_cast<size_t>(i - 1)] = t;
  }
  return out;
}

const BlochPoint* BandSweep::find(double t_value, Complex lambda,
                                  double tol) const {
  for (size_t i = 0; i < t.size(); ++i) {
    if (std::abs(t[i] - t_value) > 1e-12) continue;
    for (const auto& p : points[i])
      if (std::abs(p.lambda - lambda) <= tol) return &p;
  }
  return nullptr;
}

BandSweep run_sweep(const PotentialSpec& spec, SweepConfig config) {
  if (config.K <= 0) config.K = defaults::truncation;
  if (config.t_points <= 0) config.t_points = defaults::t_points;
  if (config.window.empty()) config.window = default_window(config.K);
  config.window.hi = std::min(config.window.hi, default_window(config.K).hi);
  if (config.threads <= 0) config.threads = defaults::thread_count();

  BandSweep sweep{spec, jordan_analyze(spec.mean_matrix()), config, t_grid(config.t_points), {}};
  sweep.points.resize(sweep.t.size());

  SolveOptions opts;
  opts.keep_vectors = config.keep_vectors;
  opts.compute_sup = config.compute_sup;
  opts.jd = &sweep.jd;

  std::atomic<size_t> next{0};
  auto worker = [&]() {
    while (true) {
      const size_t i = next.fetch_add(1);
      if (i >= sweep.t.size()) return;
      sweep.points[i] =
          solve_bloch(spec, sweep.t[i], config.K, config.window, opts);
    }
  };
  const int n_threads =
      std::max(1, std::min<int>(config.threads, static_cast<int>(sweep.t.size())));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(n_threads));
    for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  return sweep;
}

MonodromyResult monodromy(const PotentialSpec& spec, Complex lambda,
                          int steps) {
  namespace od = boost::numeric::odeint;
  const int m = spec.dim();
  const int d = 2 * m;
  if (steps <= 0) steps = defaults::ode_steps(std::abs(lambda));

  using State = std::vector<Complex>;
  State state(static_cast<size_t>(d * d), Complex(0.0, 0.0));
  // column-major fundamental matrix, Phi(0) = I
  for (int i = 0; i < d; ++i) state[static_cast<size_t>(i * d + i)] = 1.0;

  auto rhs = [&](const State& y, State& dy, double x) {
    const Eigen::Map<const Eigen::MatrixXcd> Y(y.data(), d, d);
    Eigen::Map<Eigen::MatrixXcd> dY(dy.data(), d, d);
    const Eigen::MatrixXcd Qx = spec.evaluate(x) -
        lambda * Eigen::MatrixXcd::Identity(m, m);
    dY.topRows(m) = Y.bottomRows(m);
    dY.bottomRows(m) = Qx * Y.topRows(m);
  };

  od::runge_kutta_fehlberg78<State> stepper;
  const double h = pi / steps;
  double x = 0.0;
  State dy(state.size());
  for (int i = 0; i < steps; ++i) {
    stepper.do_step(rhs, state, x, h);
    x += h;
  }

  MonodromyResult out;
  out.lambda = lambda;
  out.M = Eigen::Map<Eigen::MatrixXcd>(state.data(), d, d);
  if (!out.M.allFinite())
    throw std::runtime_error("monodromy: integration diverged");
  out.det = out.M.determinant();
  dense_eigen(out.M, out.multipliers, nullptr);
  // det(M - rho I) = prod_i (multiplier_i - rho), expanded in rho
  std::vector<Complex> poly{1.0};
  for (int i = 0; i < d; ++i) {
    std::vector<Complex> next(poly.size() + 1, Complex(0.0, 0.0));
    for (size_t k = 0; k < poly.size(); ++k) {
      next[k] += poly[k] * out.multipliers(i); // times (rho_i - rho): const part
      next[k + 1] -= poly[k];                  // -rho part
    }
    poly = std::move(next);
  }
  out.charpoly = std::move(poly);
  return out;
}

double MonodromyResult::multiplier_distance(double t) const {
  const Complex rho = std::polar(1.0, pi * t);
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < multipliers.size(); ++i)
    best = std::min(best, std::abs(multipliers(i) - rho));
  return best;
}

std::optional<BlochPoint> refine_with_monodromy(const PotentialSpec& spec,
                                                const BlochPoint& point,
                                                int steps) {
  const Complex rho = std::polar(1.0, pi * point.t);
  const int d = 2 * spec.dim();
  auto F = [&](Complex lambda) {
    const MonodromyResult mr = monodromy(spec, lambda, steps);
    return (mr.M - rho * Eigen::MatrixXcd::Identity(d, d)).determinant();
  };

  Complex lambda = point.lambda;
  Complex f = F(lambda);
  const double f0 = std::abs(f);
  if (f0 < 1e-300) { // seed is already a determinant root
    BlochPoint fixed = point;
    fixed.refined = true;
    return fixed;
  }
  for (int iter = 0; iter < 25; ++iter) {
    const double h = 1e-6 * (1.0 + std::abs(lambda));
    const Complex fp = (F(lambda + h) - F(lambda - h)) / (2.0 * h);
    if (std::abs(fp) < 1e-300) break;
    const Complex step = f / fp;
    lambda -= step;
    f = F(lambda);
    if (!std::isfinite(std::abs(f))) return std::nullopt;
    if (std::abs(step) <= 1e-12 * (1.0 + std::abs(lambda))) break;
  }
  // accept only a genuine improvement near the starting point
  if (std::abs(f) > 0.5 * f0 + 1e-300) return std::nullopt;
  if (std::abs(lambda - point.lambda) > 1.0 + 1e-3 * std::abs(point.lambda))
    return std::nullopt;
  BlochPoint refined = point;
  refined.lambda = lambda;
  refined.refined = true;
  return refined;
}

double chain_identity_residual(const PotentialSpec& spec, const JordanData& jd,
                               const BlochPoint& point, int n, int j, int s,
                               int r) {
  const int m = spec.dim();
  if (point.vec.size() == 0)
    throw std::invalid_argument("chain_identity_residual: point has no vector");
  if (point.vec.size() % m != 0)
    throw std::invalid_argument("chain_identity_residual: vector/dimension mismatch");
  const int K = (static_cast<int>(point.vec.size()) / m - 1) / 2;
  if (std::abs(n) > K)
    throw std::invalid_argument("chain_identity_residual: block index outside truncation");
  if (j < 0 || j >= jd.group_count())
    throw std::invalid_argument("chain_identity_residual: no such eigenvalue group");
  const JordanGroup& grp = jd.group(j);
  if (s < 0 || s >= static_cast<int>(grp.adjoint_chains.size()))
    throw std::invalid_argument("chain_identity_residual: no such chain");
  const JordanChain& chain = grp.adjoint_chains[static_cast<size_t>(s)];
  if (r < 0 || r + 1 > chain.length())
    throw std::invalid_argument(
        "chain_identity_residual: order exceeds the chain length");

  auto block = [&](int b) -> Eigen::VectorXcd {
    if (std::abs(b) > K) return Eigen::VectorXcd::Zero(m);
    return point.vec.segment((b + K) * m, m);
  };

  // mean-zero perturbation coefficients: D_0 = C_0 - A0, D_w = C_w otherwise
  const Eigen::MatrixXcd A0 = spec.mean_matrix().cast<Complex>();
  Eigen::VectorXcd pert = Eigen::VectorXcd::Zero(m);
  for (const auto& [w, c] : spec.harmonics()) {
    const int src = n - w;
    if (std::abs(src) <= K) pert += c * block(src);
  }
  pert -= A0 * block(n);

  const Complex mu_nj = unperturbed_eigenvalue(grp.mu, n, point.t);
  const Complex shift = point.lambda - mu_nj;
  const double root_pi = std::sqrt(pi);

  auto pair_with = [&](const Eigen::VectorXcd& a, int q) {
    return root_pi * chain.vectors[static_cast<size_t>(q)].dot(a);
  };

  Complex lhs = std::pow(shift, r + 1) * pair_with(block(n), r);
  Complex rhs{0.0, 0.0};
  Complex power{1.0, 0.0};
  for (int q = 0; q <= r; ++q) {
    rhs += power * pair_with(pert, q);
    power *= shift;
  }
  return std::abs(lhs - rhs);
}

ConjugationReport conjugation_check(const std::vector<BlochPoint>& points,
                                    double tolerance) {
  ConjugationReport rep;
  const int n = static_cast<int>(points.size());
  std::vector<bool> used(static_cast<size_t>(n), false);
  rep.symmetric = true;
  for (int i = 0; i < n; ++i) {
    if (used[static_cast<size_t>(i)]) continue;
    const Complex target = std::conj(points[static_cast<size_t>(i)].lambda);
    int best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (int j = 0; j < n; ++j) {
      if (j != i && used[static_cast<size_t>(j)]) continue;
      if (points[static_cast<size_t>(j)].mult != points[static_cast<size_t>(i)].mult)
        continue;
      const double d = std::abs(points[static_cast<size_t>(j)].lambda - target);
      if (d < best_d) {
        best_d = d;
        best = j;
      }
    }
    if (best >= 0 && best_d <= tolerance) {
      used[static_cast<size_t>(i)] = true;
      used[static_cast<size_t>(best)] = true;
    } else {
      rep.symmetric = false;
      rep.worst_defect = std::max(rep.worst_defect, best_d);
      rep.unmatched.push_back(points[static_cast<size_t>(i)].lambda);
      used[static_cast<size_t>(i)] = true;
    }
  }
  return rep;
}

} // namespace ptband
