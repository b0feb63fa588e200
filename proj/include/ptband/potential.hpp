#pragma once

#include <Eigen/Dense>
#include <complex>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace ptband {

using Complex = std::complex<double>;

// One non-real entry of a Fourier coefficient matrix (evidence against
// PT-symmetry of the potential).
struct PtOffender {
  int n = 0;
  int row = 0;
  int col = 0;
  Complex value;
};

struct PtCheck {
  bool pt = false;
  double tolerance = 0.0;
  std::vector<PtOffender> offenders;
};

// Norm data of the potential: B = || |Q| ||_{L2} aggregated over entries, and
// the tail weights q_k = max over entries and over harmonic indices
// s in {+-2k, +-(2k+1), +-(2k-1)} of sqrt(pi) |(C_s)_{ij}|.
struct PotentialNorms {
  double B = 0.0;
  std::vector<double> q; // q[k] for k = 0..k_max

  double q_k(int k) const;
};

// m x m matrix potential on [0, pi] given by a finite Fourier series
//
//     Q(x) = sum_n C_n exp(2 i n x).
//
// Everything downstream (averaged matrix, Galerkin blocks, norms) is derived
// from the coefficient map; the class validates dimensions once on
// construction and is immutable afterwards.
class PotentialSpec {
 public:
  PotentialSpec(int m, std::map<int, Eigen::MatrixXcd> harmonics,
                int n_max_cap = -1);

  static PotentialSpec zero(int m);
  static PotentialSpec constant(const Eigen::MatrixXd& q0);

  // File format: {"m": int, "harmonics": [{"n": int, "re": [[..]], "im": [[..]]}]}.
  // Harmonics absent from the list are zero; "im" may be omitted.
  static PotentialSpec from_json(const nlohmann::json& j);
  static PotentialSpec load(const std::string& path);
  nlohmann::json to_json() const;
  void save(const std::string& path) const;

  int dim() const { return m_; }
  int n_max() const { return n_max_; }
  const std::map<int, Eigen::MatrixXcd>& harmonics() const { return coeff_; }

  // C_n, zero matrix when the harmonic is absent.
  Eigen::MatrixXcd harmonic(int n) const;

  Eigen::MatrixXcd evaluate(double x) const;

  // Entrywise reality of all coefficient matrices, the PT-symmetry
  // characterization for this Fourier form.
  PtCheck validate_pt() const;

  // A = integral of Q over [0, pi] = pi * Re C_0.  Throws if C_0 has an
  // imaginary part beyond the reality tolerance.
  Eigen::MatrixXd averaged_matrix() const;

  // Mean value of Q, i.e. averaged_matrix() / pi.  The constant comparison
  // operator used by the perturbation apparatus.
  Eigen::MatrixXd mean_matrix() const;

  PotentialNorms norms(int k_max) const;

  double max_coeff() const { return max_coeff_; }
  double pt_tolerance() const;

 private:
  int m_ = 0;
  int n_max_ = 0;
  double max_coeff_ = 0.0;
  std::map<int, Eigen::MatrixXcd> coeff_;
};

} // namespace ptband
