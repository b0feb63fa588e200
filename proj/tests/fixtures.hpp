#pragma once

// Shared test potentials and reference values.

#include <map>
#include <random>

#include "ptband/potential.hpp"

namespace fixtures {

using ptband::Complex;
using ptband::PotentialSpec;

// q(x) = i sin 2x: C_{+1} = 1/2, C_{-1} = -1/2 (both real => PT-symmetric).
inline PotentialSpec isin2x() {
  std::map<int, Eigen::MatrixXcd> h;
  h[1] = Eigen::MatrixXcd::Constant(1, 1, Complex(0.5, 0.0));
  h[-1] = Eigen::MatrixXcd::Constant(1, 1, Complex(-0.5, 0.0));
  return PotentialSpec(1, std::move(h));
}

// q(x) = sin 2x: C_{+1} = -i/2, C_{-1} = i/2 (imaginary coefficients,
// not PT-symmetric in this coefficient basis although q is real-valued).
inline PotentialSpec sin2x() {
  std::map<int, Eigen::MatrixXcd> h;
  h[1] = Eigen::MatrixXcd::Constant(1, 1, Complex(0.0, -0.5));
  h[-1] = Eigen::MatrixXcd::Constant(1, 1, Complex(0.0, 0.5));
  return PotentialSpec(1, std::move(h));
}

// Genuinely asymmetric complex potential: q = 0.8 e^{2ix} + 0.3i e^{-2ix}.
// Neither PT-symmetric nor real-valued; its spectrum is not symmetric about
// the real axis, which makes it the negative control for conjugation tests.
inline PotentialSpec non_pt_control() {
  std::map<int, Eigen::MatrixXcd> h;
  h[1] = Eigen::MatrixXcd::Constant(1, 1, Complex(0.8, 0.0));
  h[-1] = Eigen::MatrixXcd::Constant(1, 1, Complex(0.0, 0.3));
  return PotentialSpec(1, std::move(h));
}

inline Eigen::MatrixXd rotation_matrix() {
  Eigen::MatrixXd a(2, 2);
  a << 0.0, 1.0, -1.0, 0.0;
  return a;
}

inline Eigen::MatrixXd jordan_matrix() {
  Eigen::MatrixXd a(2, 2);
  a << 0.0, 1.0, 0.0, 0.0;
  return a;
}

inline Eigen::MatrixXd diag(std::initializer_list<double> v) {
  Eigen::VectorXd d(static_cast<long>(v.size()));
  long i = 0;
  for (double x : v) d[i++] = x;
  return d.asDiagonal();
}

// Random PT potential: real entries ~ U(-0.3, 0.3) damped by 1/(1+|n|).
inline PotentialSpec random_pt(int m, int n_max, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-0.3, 0.3);
  std::map<int, Eigen::MatrixXcd> h;
  for (int n = -n_max; n <= n_max; ++n) {
    Eigen::MatrixXcd c(m, m);
    for (int r = 0; r < m; ++r)
      for (int col = 0; col < m; ++col)
        c(r, col) = Complex(dist(rng) / (1.0 + std::abs(n)), 0.0);
    h[n] = c;
  }
  return PotentialSpec(m, std::move(h));
}

// Lowest eigenvalue of the m = 1 potential i sin 2x at t = 0, frozen from a
// K = 128 self-convergence run and cross-checked against the
// fundamental-solution root finder.  Used as the oracle for low-K runs.
inline constexpr double isin2x_lowest_t0_K128 = 0.12863011534223465;

} // namespace fixtures
