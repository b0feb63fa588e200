#pragma once

#include <Eigen/Dense>
#include <complex>
#include <optional>
#include <vector>

#include "ptband/averaged.hpp"
#include "ptband/intervals.hpp"
#include "ptband/potential.hpp"

namespace ptband {

// Truncated Fourier-block matrix of the operator at quasimomentum t: blocks
// indexed n, v in [-K, K], diagonal blocks (2n+t)^2 I + C_0 and coupling
// C_{n-v}.  Eigenvalues approximate Bloch eigenvalues inside the trust
// window; beyond it truncation artifacts dominate.
struct GalerkinMatrix {
  int K = 0;
  int m = 0;
  double t = 0.0;
  Eigen::MatrixXcd matrix;
  Interval trust;

  int block_index(int n) const { return (n + K) * m; }
};

GalerkinMatrix build_galerkin(const PotentialSpec& spec, double t, int K);

// One eigenvalue cluster of the truncated problem at a fixed t.
struct BlochPoint {
  double t = 0.0;
  Complex lambda;          // cluster mean
  int mult = 1;            // cluster size
  bool refined = false;    // lambda replaced by a fundamental-solution root
  int cluster_k = 0;       // dominant Fourier block of the eigenvector
  int cluster_j = 0;       // nearest constant-matrix eigenvalue group
  double residual = 0.0;      // worst coefficient-identity row inside [-K, K]
  double tail_residual = 0.0; // worst row just beyond the truncation
  double sup_norm = 0.0;      // max_x |Psi(x)| over the x sample grid
  Eigen::VectorXcd vec;       // unit eigenvector (empty if dropped)

  bool is_real() const;
};

struct SolveOptions {
  bool keep_vectors = true;
  bool compute_sup = true;
  const JordanData* jd = nullptr; // enables cluster_j attribution
};

// All eigenvalue clusters with Re lambda inside `window` (must sit inside the
// trust window), sorted by (Re, Im) of the representative.
std::vector<BlochPoint> solve_bloch(const PotentialSpec& spec, double t, int K,
                                    Interval window,
                                    const SolveOptions& opts = {});

Interval default_window(int K);

// Fundamental-solution data at one spectral parameter: M maps initial data
// (y(0), y'(0)) to (y(pi), y'(pi)); lambda is a Bloch eigenvalue at
// quasimomentum t exactly when exp(i pi t) is an eigenvalue of M.
struct MonodromyResult {
  Complex lambda;
  Eigen::MatrixXcd M;           // 2m x 2m
  Complex det;                  // should be 1 (trace-free system)
  Eigen::VectorXcd multipliers; // eigenvalues of M
  std::vector<Complex> charpoly; // det(M - rho I) = sum_i charpoly[i] rho^i

  // min_i |multiplier_i - exp(i pi t)|
  double multiplier_distance(double t) const;
};

// Integrates the 2m x 2m fundamental system across one period with a fixed
// step count (defaults::ode_steps when steps <= 0).
MonodromyResult monodromy(const PotentialSpec& spec, Complex lambda,
                          int steps = 0);

// Newton iteration on det(M(lambda) - exp(i pi t) I) starting from the
// point's eigenvalue.  Returns the point with `refined` set on success,
// nullopt when the iteration fails to improve.
std::optional<BlochPoint> refine_with_monodromy(const PotentialSpec& spec,
                                                const BlochPoint& point,
                                                int steps = 0);

// Residual of the biorthogonal perturbation identity at block n against the
// adjoint chain (group j, chain s, orders 0..r):
//   (lambda - mu_{n,j})^{r+1} (Psi, Phi*_r) - sum_q (lambda - mu_{n,j})^q ((Q - A0) Psi, Phi*_q)
// with A0 the mean matrix and inner products in coefficient space.
double chain_identity_residual(const PotentialSpec& spec, const JordanData& jd,
                               const BlochPoint& point, int n, int j, int s,
                               int r);

struct ConjugationReport {
  bool symmetric = false;
  double worst_defect = 0.0; // largest unmatched distance (0 when symmetric)
  std::vector<Complex> unmatched;
};

// Multiset comparison of {lambda} against {conj(lambda)} with multiplicities.
ConjugationReport conjugation_check(const std::vector<BlochPoint>& points,
                                    double tolerance);

// Uniform grid on (-1, 1]; points colliding with {±1/3, ±2/3} are shifted
// inward by half a step so index-set boundaries are never sampled exactly.
std::vector<double> t_grid(int n);

struct SweepConfig {
  int K = 0;            // <= 0: defaults::truncation
  int t_points = 0;     // <= 0: defaults::t_points
  Interval window{0.0, 0.0}; // empty: default_window(K)
  int threads = 0;      // <= 0: defaults::thread_count()
  bool keep_vectors = false;
  bool compute_sup = true;
};

struct BandSweep {
  PotentialSpec spec;
  JordanData jd; // of the mean matrix
  SweepConfig config;
  std::vector<double> t;
  std::vector<std::vector<BlochPoint>> points; // per t

  const BlochPoint* find(double t_value, Complex lambda, double tol) const;
};

BandSweep run_sweep(const PotentialSpec& spec, SweepConfig config);

} // namespace ptband
