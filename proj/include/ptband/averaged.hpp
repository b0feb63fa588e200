#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "ptband/potential.hpp"

namespace ptband {

// One Jordan chain: vectors[0] is the eigenvector, vectors[q] solves
// (A - mu I) vectors[q] = vectors[q-1].  Scaled so |vectors[0]| = 1.
struct JordanChain {
  std::vector<Eigen::VectorXcd> vectors;

  int length() const { return static_cast<int>(vectors.size()); }
};

// All spectral data attached to one distinct eigenvalue of the constant
// matrix: chains of A at mu and chains of A^T at conj(mu) (the adjoint
// family entering the biorthogonal expansions).
struct JordanGroup {
  Complex mu;
  int alg_mult = 0;
  int geo_mult = 0;
  bool real = false;
  int max_chain_len = 1; // r_j
  std::vector<JordanChain> chains;
  std::vector<JordanChain> adjoint_chains;
  double eigen_residual = 0.0; // worst ||(A - mu) u_0|| over both families
};

// Jordan structure of a real m x m matrix.  Groups are ordered with the real
// eigenvalues first (ascending), then the non-real ones by (Re, Im).
struct JordanData {
  int m = 0;
  int real_count = 0; // s: number of distinct real eigenvalues
  double cluster_tol = 0.0;
  bool ambiguous = false;      // two representatives closer than 2x tolerance
  double biorth_condition = 0.0; // condition number of the chain pairing Gram
  std::vector<JordanGroup> groups;

  const JordanGroup& group(int j) const { return groups.at(static_cast<size_t>(j)); }
  int group_count() const { return static_cast<int>(groups.size()); }

  // Index of the group nearest to lambda - (2k+t)^2 ... callers mostly want
  // nearest_group(value) on the constant-matrix eigenvalue plane.
  int nearest_group(Complex value) const;
};

// Eigenvalue/Jordan analysis of a real matrix (intended for m <= 16).
// Eigenvalues are clustered at tolerance 1e-8 * max(1, |A|); chain bases are
// built from singular-value decompositions of the powers (A - mu I)^p.
JordanData jordan_analyze(const Eigen::MatrixXd& A);

// (2k + t)^2 + mu: eigenvalue of the constant-coefficient operator attached
// to the Fourier block k and the matrix eigenvalue mu.
inline Complex unperturbed_eigenvalue(Complex mu, int k, double t) {
  const double w = 2.0 * k + t;
  return Complex(w * w, 0.0) + mu;
}

struct HalfLine {
  Complex origin;
  bool real = false;
};

// Spectrum of the constant-coefficient operator as a union of half lines
// {origin + a : a >= 0}.  All distinct eigenvalues are listed; for the real
// ones only the smallest origin is not contained in another line.
std::vector<HalfLine> half_lines(const JordanData& jd);

// Multiplicity of (2k+t)^2 as an eigenvalue of the free block structure:
// 2m when a partner index -k (t=0) or -k-1 (t=1) coincides, m otherwise.
int unperturbed_multiplicity(int m, double t, int k);

} // namespace ptband
