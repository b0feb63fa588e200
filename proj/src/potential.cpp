#include "ptband/potential.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "ptband/constants.hpp"

namespace ptband {

namespace {
constexpr double pi = std::numbers::pi;
}

PotentialSpec::PotentialSpec(int m, std::map<int, Eigen::MatrixXcd> harmonics,
                             int n_max_cap)
    : m_(m), coeff_(std::move(harmonics)) {
  if (m < 1) throw std::invalid_argument("potential: dimension must be >= 1");
  if (n_max_cap < 0) n_max_cap = defaults::n_max_cap;
  for (auto it = coeff_.begin(); it != coeff_.end();) {
    const auto& [n, c] = *it;
    if (c.rows() != m_ || c.cols() != m_)
      throw std::invalid_argument("potential: harmonic " + std::to_string(n) +
                                  " is not " + std::to_string(m_) + "x" +
                                  std::to_string(m_));
    if (std::abs(n) > n_max_cap)
      throw std::invalid_argument("potential: harmonic index " +
                                  std::to_string(n) + " exceeds cap " +
                                  std::to_string(n_max_cap));
    if (c.cwiseAbs().maxCoeff() == 0.0) {
      it = coeff_.erase(it);
      continue;
    }
    n_max_ = std::max(n_max_, std::abs(n));
    max_coeff_ = std::max(max_coeff_, c.cwiseAbs().maxCoeff());
    ++it;
  }
}

PotentialSpec PotentialSpec::zero(int m) { return PotentialSpec(m, {}); }

PotentialSpec PotentialSpec::constant(const Eigen::MatrixXd& q0) {
  std::map<int, Eigen::MatrixXcd> h;
  h[0] = q0.cast<Complex>();
  return PotentialSpec(static_cast<int>(q0.rows()), std::move(h));
}

Eigen::MatrixXcd PotentialSpec::harmonic(int n) const {
  auto it = coeff_.find(n);
  if (it != coeff_.end()) return it->second;
  return Eigen::MatrixXcd::Zero(m_, m_);
}

Eigen::MatrixXcd PotentialSpec::evaluate(double x) const {
  Eigen::MatrixXcd q = Eigen::MatrixXcd::Zero(m_, m_);
  for (const auto& [n, c] : coeff_)
    q += c * std::polar(1.0, 2.0 * n * x);
  return q;
}

double PotentialSpec::pt_tolerance() const { return tol::pt(max_coeff_); }

PtCheck PotentialSpec::validate_pt() const {
  PtCheck out;
  out.tolerance = pt_tolerance();
  for (const auto& [n, c] : coeff_)
    for (int i = 0; i < m_; ++i)
      for (int j = 0; j < m_; ++j)
        if (std::abs(c(i, j).imag()) > out.tolerance)
          out.offenders.push_back({n, i, j, c(i, j)});
  out.pt = out.offenders.empty();
  return out;
}

Eigen::MatrixXd PotentialSpec::averaged_matrix() const {
  const Eigen::MatrixXcd c0 = harmonic(0);
  if (c0.imag().cwiseAbs().maxCoeff() > pt_tolerance())
    throw std::domain_error(
        "averaged_matrix: zeroth harmonic has a non-real part; the averaged "
        "matrix is only defined for PT-symmetric potentials");
  return pi * c0.real();
}

Eigen::MatrixXd PotentialSpec::mean_matrix() const {
  return averaged_matrix() / pi;
}

double PotentialNorms::q_k(int k) const {
  k = std::abs(k);
  if (k >= static_cast<int>(q.size())) return 0.0;
  return q[k];
}

PotentialNorms PotentialSpec::norms(int k_max) const {
  PotentialNorms out;
  double b2 = 0.0;
  for (const auto& [n, c] : coeff_) {
    (void)n;
    b2 += c.cwiseAbs2().sum();
  }
  out.B = std::sqrt(pi * b2);
  const double root_pi = std::sqrt(pi);
  out.q.assign(static_cast<size_t>(std::max(k_max, 0)) + 1, 0.0);
  for (int k = 0; k <= k_max; ++k) {
    double best = 0.0;
    for (int s : {2 * k, -2 * k, 2 * k + 1, -(2 * k + 1), 2 * k - 1, -(2 * k - 1)}) {
      auto it = coeff_.find(s);
      if (it != coeff_.end())
        best = std::max(best, root_pi * it->second.cwiseAbs().maxCoeff());
    }
    out.q[static_cast<size_t>(k)] = best;
  }
  return out;
}

namespace {

Eigen::MatrixXcd matrix_from_json(const nlohmann::json& jre,
                                  const nlohmann::json* jim, int m,
                                  const std::string& what) {
  auto check = [&](const nlohmann::json& a) {
    if (!a.is_array() || static_cast<int>(a.size()) != m)
      throw std::invalid_argument("potential json: " + what +
                                  " must be an " + std::to_string(m) + "x" +
                                  std::to_string(m) + " array");
    for (const auto& row : a)
      if (!row.is_array() || static_cast<int>(row.size()) != m)
        throw std::invalid_argument("potential json: ragged matrix in " + what);
  };
  check(jre);
  if (jim) check(*jim);
  Eigen::MatrixXcd c(m, m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      const double re = jre[i][j].get<double>();
      const double im = jim ? (*jim)[i][j].get<double>() : 0.0;
      c(i, j) = Complex(re, im);
    }
  return c;
}

} // namespace

PotentialSpec PotentialSpec::from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("m") || !j.contains("harmonics"))
    throw std::invalid_argument(
        "potential json: expected object with fields \"m\" and \"harmonics\"");
  const int m = j.at("m").get<int>();
  if (m < 1) throw std::invalid_argument("potential json: m must be >= 1");
  if (!j.at("harmonics").is_array())
    throw std::invalid_argument("potential json: \"harmonics\" must be a list");
  std::map<int, Eigen::MatrixXcd> h;
  for (const auto& e : j.at("harmonics")) {
    if (!e.contains("n") || !e.contains("re"))
      throw std::invalid_argument(
          "potential json: each harmonic needs fields \"n\" and \"re\"");
    const int n = e.at("n").get<int>();
    if (h.count(n))
      throw std::invalid_argument("potential json: duplicate harmonic n=" +
                                  std::to_string(n));
    const nlohmann::json* jim = e.contains("im") ? &e.at("im") : nullptr;
    h[n] = matrix_from_json(e.at("re"), jim, m,
                            "harmonic n=" + std::to_string(n));
  }
  return PotentialSpec(m, std::move(h));
}

PotentialSpec PotentialSpec::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("potential: cannot open " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("potential: parse failure in " + path + ": " +
                                e.what());
  }
  return from_json(j);
}

nlohmann::json PotentialSpec::to_json() const {
  nlohmann::json j;
  j["m"] = m_;
  j["harmonics"] = nlohmann::json::array();
  for (const auto& [n, c] : coeff_) {
    nlohmann::json e;
    e["n"] = n;
    nlohmann::json re = nlohmann::json::array(), im = nlohmann::json::array();
    for (int i = 0; i < m_; ++i) {
      nlohmann::json rrow = nlohmann::json::array(), irow = nlohmann::json::array();
      for (int k = 0; k < m_; ++k) {
        rrow.push_back(c(i, k).real());
        irow.push_back(c(i, k).imag());
      }
      re.push_back(rrow);
      im.push_back(irow);
    }
    e["re"] = re;
    e["im"] = im;
    j["harmonics"].push_back(e);
  }
  return j;
}

void PotentialSpec::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("potential: cannot write " + path);
  out << to_json().dump(2) << '\n';
}

} // namespace ptband
