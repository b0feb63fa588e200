#pragma once

#include <cmath>
#include <cstdlib>

// Default tolerances and solver knobs.  Scale-dependent tolerances are
// expressed as functions of the relevant magnitude so callers cannot apply
// them to the wrong scale by accident.
namespace ptband::tol {

// Entrywise reality test on Fourier coefficient matrices (relative to the
// largest coefficient magnitude of the potential).
inline double pt(double max_coeff) { return 1e-10 * std::max(1.0, max_coeff); }

// Eigenvalue grouping for the constant (averaged) matrix.
inline double cluster(double norm_a) { return 1e-8 * std::max(1.0, norm_a); }

// Chain relation residuals accepted by the Jordan analysis.
inline double jordan(double norm_a) { return 1e-6 * std::max(1.0, norm_a); }

// Grouping of Bloch eigenvalues into multiplicity clusters.
inline double mult(double abs_lambda) { return 1e-6 * (1.0 + abs_lambda); }

// Reality test on Bloch eigenvalues.
inline double real(double abs_lambda) { return 1e-6 * (1.0 + abs_lambda); }

// Matching computed real eigenvalues against sampled band points.
inline double band(double lambda) { return 1e-4 * (1.0 + std::abs(lambda)); }

// Numerical slack added to the disk radius c_hat before flagging a
// containment violation (c_hat can be exactly zero for Q = 0).
inline double disk_slack(double abs_lambda) { return 1e-8 * (1.0 + abs_lambda); }

} // namespace ptband::tol

namespace ptband::defaults {

inline constexpr int truncation = 64;       // Fourier truncation K
inline constexpr int truncation_buffer = 4; // trust-window buffer K_buf
inline constexpr int t_points = 201;
inline constexpr int n_max_cap = 64;        // highest admissible harmonic index
inline constexpr int x_grid = 1024;         // sample count for sup-norm scans
inline constexpr double window_lo = -10.0;
inline constexpr unsigned seed = 12345;

// Fixed-step count for the fundamental-solution integrator.
inline int ode_steps(double abs_lambda) {
  return static_cast<int>(512.0 * (1.0 + std::sqrt(std::abs(abs_lambda)) / 10.0)) + 1;
}

// Upper end of the trust window for truncation K.
inline double trust_limit(int K) {
  const double q = 2.0 * (K - truncation_buffer) + 1.0;
  return q * q;
}

// Worker count: PTBAND_THREADS overrides hardware concurrency.
int thread_count();

} // namespace ptband::defaults
