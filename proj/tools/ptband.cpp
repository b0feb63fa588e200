// ptband: band-structure computation and classification for 1D periodic
// Schrodinger operators with m x m matrix potentials.
//
// Subcommands:
//   check-pt  validate the entrywise-reality condition on the coefficients
//   sweep     compute eigenvalues over a quasimomentum grid
//   classify  full pipeline: sweep -> constants -> bands -> verdicts
//   oracle    cross-check Galerkin eigenvalues against the monodromy matrix

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "ptband/classify.hpp"
#include "ptband/constants.hpp"

namespace {

using ptband::BandSweep;
using ptband::BlochPoint;
using ptband::Complex;

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

struct CommonOpts {
  std::string spec_path;
  int K = 0;
  int t_points = 0;
  std::vector<double> window;
  std::string out_dir = ".";
  long seed = ptband::defaults::seed;
};

void add_common(CLI::App* cmd, CommonOpts& o, bool with_run_config) {
  cmd->add_option("--spec", o.spec_path, "potential specification JSON")
      ->required();
  if (with_run_config) {
    cmd->add_option("--K", o.K, "Fourier truncation half-width");
    cmd->add_option("--t-points", o.t_points, "quasimomentum grid size");
    cmd->add_option("--window", o.window,
                    "eigenvalue window: LO HI (real parts)")
        ->expected(2);
    cmd->add_option("--out", o.out_dir, "output directory");
    cmd->add_option("--seed", o.seed, "rng seed recorded in outputs");
  }
}

ptband::SweepConfig sweep_config(const CommonOpts& o) {
  ptband::SweepConfig cfg;
  cfg.K = o.K;
  cfg.t_points = o.t_points;
  if (o.window.size() == 2) cfg.window = {o.window[0], o.window[1]};
  return cfg;
}

std::string bands_table_csv(const BandSweep& sweep) {
  std::string out = "t,re_lambda,im_lambda,mult,cluster_k,cluster_j,residual\n";
  for (size_t i = 0; i < sweep.t.size(); ++i)
    for (const BlochPoint& p : sweep.points[i]) {
      out += fmt17(sweep.t[i]) + "," + fmt17(p.lambda.real()) + "," +
             fmt17(p.lambda.imag()) + "," + std::to_string(p.mult) + "," +
             std::to_string(p.cluster_k) + "," + std::to_string(p.cluster_j) +
             "," + fmt17(p.residual) + "\n";
    }
  return out;
}

nlohmann::json sweep_json(const BandSweep& sweep, long seed) {
  nlohmann::json groups = nlohmann::json::array();
  for (int j = 0; j < sweep.jd.group_count(); ++j) {
    const ptband::JordanGroup& g = sweep.jd.group(j);
    groups.push_back({{"mu", {g.mu.real(), g.mu.imag()}},
                      {"alg_mult", g.alg_mult},
                      {"geo_mult", g.geo_mult},
                      {"real", g.real},
                      {"max_chain_len", g.max_chain_len}});
  }
  nlohmann::json slices = nlohmann::json::array();
  for (size_t i = 0; i < sweep.t.size(); ++i) {
    nlohmann::json pts = nlohmann::json::array();
    for (const BlochPoint& p : sweep.points[i])
      pts.push_back({{"lambda", {p.lambda.real(), p.lambda.imag()}},
                     {"mult", p.mult},
                     {"cluster_k", p.cluster_k},
                     {"cluster_j", p.cluster_j},
                     {"residual", p.residual},
                     {"tail_residual", p.tail_residual},
                     {"sup_norm", p.sup_norm}});
    slices.push_back({{"t", sweep.t[i]}, {"points", pts}});
  }
  return {{"m", sweep.spec.dim()},
          {"K", sweep.config.K},
          {"t_points", sweep.config.t_points},
          {"window", {sweep.config.window.lo, sweep.config.window.hi}},
          {"seed", seed},
          {"groups", groups},
          {"slices", slices}};
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

int run_check_pt(const CommonOpts& o) {
  const ptband::PotentialSpec spec = ptband::PotentialSpec::load(o.spec_path);
  const ptband::PtCheck check = spec.validate_pt();
  if (check.pt) {
    std::cout << "PT symmetry: ok (entrywise-real coefficients, tolerance "
              << check.tolerance << ")\n";
    return 0;
  }
  std::cout << "PT symmetry: violated (tolerance " << check.tolerance
            << ")\n";
  for (const ptband::PtOffender& off : check.offenders)
    std::cout << "  harmonic " << off.n << " entry (" << off.row << ","
              << off.col << ") = " << off.value.real() << "+"
              << off.value.imag() << "i\n";
  return 1;
}

int run_sweep_cmd(const CommonOpts& o) {
  const ptband::PotentialSpec spec = ptband::PotentialSpec::load(o.spec_path);
  const BandSweep sweep = ptband::run_sweep(spec, sweep_config(o));
  std::filesystem::create_directories(o.out_dir);
  const std::filesystem::path dir(o.out_dir);
  write_file(dir / "bands.csv", bands_table_csv(sweep));
  write_file(dir / "sweep.json", sweep_json(sweep, o.seed).dump(2) + "\n");
  size_t count = 0;
  for (const auto& s : sweep.points) count += s.size();
  std::cout << "sweep: " << sweep.t.size() << " t-points, " << count
            << " eigenvalues -> " << (dir / "bands.csv").string() << "\n";
  return 0;
}

int run_classify_cmd(const CommonOpts& o) {
  const ptband::PotentialSpec spec = ptband::PotentialSpec::load(o.spec_path);
  const BandSweep sweep = ptband::run_sweep(spec, sweep_config(o));
  const ptband::LocalizationConfig loc =
      ptband::estimate_constants(sweep, spec);
  const ptband::ContainmentReport containment =
      ptband::disk_containment(sweep, loc);
  const ptband::ClassificationReport report =
      ptband::classify_spectrum(sweep, loc);

  nlohmann::json out = ptband::classification_report_json(report);
  out["localization"] = ptband::localization_report_json(loc, containment);

  std::filesystem::create_directories(o.out_dir);
  const std::filesystem::path dir(o.out_dir);
  write_file(dir / "bands.csv", bands_table_csv(sweep));
  write_file(dir / "real_bands.csv", ptband::bands_csv(report.bands));
  write_file(dir / "report.json", out.dump(2) + "\n");

  std::cout << "classify: N1_hat=" << loc.N1_hat << " c_hat=" << loc.c_hat
            << " containment=" << (containment.pass() ? "pass" : "FAIL")
            << " bands=" << report.bands.size()
            << " halfline=" << report.halfline.status << " -> "
            << (dir / "report.json").string() << "\n";
  return containment.pass() ? 0 : 1;
}

int run_oracle_cmd(const CommonOpts& o, double t,
                   std::vector<double>& lambdas) {
  const ptband::PotentialSpec spec = ptband::PotentialSpec::load(o.spec_path);
  const int K = o.K > 0 ? o.K : ptband::defaults::truncation;
  ptband::SolveOptions opts;
  opts.keep_vectors = false;
  opts.compute_sup = false;
  const std::vector<BlochPoint> points =
      ptband::solve_bloch(spec, t, K, ptband::default_window(K), opts);
  if (lambdas.empty())
    for (const BlochPoint& p : points) lambdas.push_back(p.lambda.real());

  std::string csv = "re_lambda,det_err,multiplier_distance,galerkin_distance,status\n";
  std::cout << "lambda         |detM-1|      min|rho-e^{i pi t}|  nearest Galerkin\n";
  for (double lm : lambdas) {
    std::string status = "ok";
    double det_err = 0.0, mult_dist = 0.0, gal_dist = 0.0;
    try {
      const ptband::MonodromyResult mr = ptband::monodromy(spec, lm);
      det_err = std::abs(mr.det - Complex(1.0, 0.0));
      mult_dist = mr.multiplier_distance(t);
      gal_dist = std::numeric_limits<double>::infinity();
      for (const BlochPoint& p : points)
        gal_dist = std::min(gal_dist, std::abs(p.lambda - Complex(lm, 0.0)));
    } catch (const std::exception&) {
      status = "failed";
    }
    std::printf("%-14.6g %-13.3e %-19.3e %-10.3e %s\n", lm, det_err, mult_dist,
                gal_dist, status.c_str());
    csv += fmt17(lm) + "," + fmt17(det_err) + "," + fmt17(mult_dist) + "," +
           fmt17(gal_dist) + "," + status + "\n";
  }
  if (!o.out_dir.empty() && o.out_dir != ".") {
    std::filesystem::create_directories(o.out_dir);
    write_file(std::filesystem::path(o.out_dir) / "oracle.csv", csv);
  }
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bloch spectrum computation for periodic matrix potentials"};
  app.require_subcommand(1);

  CommonOpts check_o, sweep_o, classify_o, oracle_o;
  double oracle_t = 0.0;
  std::vector<double> oracle_lambdas;

  CLI::App* check = app.add_subcommand("check-pt", "validate PT symmetry");
  add_common(check, check_o, false);

  CLI::App* sweep = app.add_subcommand("sweep", "eigenvalue sweep over t");
  add_common(sweep, sweep_o, true);

  CLI::App* classify =
      app.add_subcommand("classify", "full classification pipeline");
  add_common(classify, classify_o, true);

  CLI::App* oracle =
      app.add_subcommand("oracle", "monodromy cross-check at fixed t");
  add_common(oracle, oracle_o, true);
  oracle->add_option("--t", oracle_t, "quasimomentum for the probe");
  oracle->add_option("--lambda", oracle_lambdas,
                     "probe eigenvalues (default: Galerkin spectrum)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (check->parsed()) return run_check_pt(check_o);
    if (sweep->parsed()) return run_sweep_cmd(sweep_o);
    if (classify->parsed()) return run_classify_cmd(classify_o);
    if (oracle->parsed()) return run_oracle_cmd(oracle_o, oracle_t, oracle_lambdas);
  } catch (const std::invalid_argument& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return 3;
  }
  return 2;
}
