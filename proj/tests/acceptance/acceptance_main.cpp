// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "../unit/oracles.hpp"
#include "app.hpp"
#include "jpmsim/potential.hpp"
#include "jpmsim/protocol.hpp"
#include "jpmsim/tomography.hpp"
#include "jpmsim/transfer.hpp"
#include "output.hpp"

using namespace jpmsim;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void check(bool ok, const std::string& what) {
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? "" : " [x]");
    pass = pass && ok;
  }
};

std::string fmt(double v, int digits = 10) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

struct Criterion {
  int id;
  std::string title;
  double time_limit;  // s
  std::function<Outcome()> body;
};

Outcome matched_bound() {
  Outcome o;
  const double kappa = 1.0 / 260e-9;
  const double bound = 4.0 / std::exp(2.0);
  const double at = transfer::efficiency_matched(2.0 / kappa, kappa);
  o.check(std::abs(at - bound) <= 1e-9, "eta(2/kappa)=" + fmt(at, 12));
  const auto grid = oracle::two_level_grid_max(
      [&](double t) { return transfer::efficiency_matched(t, kappa); }, 0.0, 20.0 / kappa);
  o.check(std::abs(grid.value - bound) <= 1e-9 && std::abs(grid.x * kappa - 2.0) <= 1e-3,
          "grid max " + fmt(grid.value, 12) + " at t*kappa=" + fmt(grid.x * kappa, 6));

  transfer::TransferConfig cfg;
  cfg.source = {1e3, 1.0};
  cfg.target = {1e3, 1.0};
  const double numeric = transfer::mode2_energy_numeric(2.0, cfg).efficiency;
  o.check(std::abs(numeric - bound) <= 1e-3, "quadrature at omega/kappa=1e3: " + fmt(numeric, 8));
  return o;
}

Outcome mismatch_curves() {
  Outcome o;
  for (auto [ratio, expected] : {std::pair{10.0, 0.239}, std::pair{6.5, 0.311}}) {
    const double closed = transfer::kappa_mismatch_peak(1.0, ratio).efficiency;
    const auto grid = oracle::two_level_grid_max(
        [&](double t) { return transfer::efficiency_kappa_mismatch(t, 1.0, ratio); }, 0.0, 20.0);
    o.check(std::abs(closed - expected) <= 1e-3 && std::abs(grid.value - expected) <= 1e-3,
            "r=" + fmt(ratio, 3) + ": stationary " + fmt(closed, 8) + ", grid " + fmt(grid.value, 8));
  }
  return o;
}

Outcome detuning_sensitivity() {
  Outcome o;
  auto peak = [](double ratio) {
    transfer::TransferConfig cfg;
    cfg.source = {2e3, 1.0};
    cfg.target = {2e3 + ratio, 1.0};
    return transfer::peak_efficiency_closed_form(cfg).efficiency;
  };
  const double at_one = peak(1.0);
  o.check(std::abs(at_one - 2.0 * std::exp(-kPi / 2.0)) <= 1e-6, "peak(dw=kappa)=" + fmt(at_one, 10));
  double last = INFINITY;
  bool decreasing = true;
  std::string seq;
  for (double r : {0.0, 0.5, 1.0, 2.0, 4.0}) {
    const double p = peak(r);
    decreasing = decreasing && p < last;
    last = p;
    seq += (seq.empty() ? "" : " > ") + fmt(p, 5);
  }
  o.check(decreasing, "strictly decreasing " + seq);
  return o;
}

Outcome potential_landscape() {
  Outcome o;
  const potential::JpmParams p;
  const double beta = potential::beta_L(p);
  std::mt19937_64 gen(1729);
  std::uniform_real_distribution<double> flux(-1.0, 2.0);
  int count_mismatch = 0;
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const auto f = potential::FluxBias::from_quanta(flux(gen));
    const double c = f.reduced_phase();
    const auto roots = oracle::dense_scan_roots(
        [&](double d) { return std::sin(d) - (c - d) / beta; }, c - beta - 1.0, c + beta + 1.0, 1e-3);
    const auto ex = potential::find_extrema(f, p);
    if (roots.size() != ex.size()) {
      ++count_mismatch;
      continue;
    }
    for (std::size_t i = 0; i < ex.size(); ++i) worst = std::max(worst, std::abs(roots[i] - ex[i].phase));
  }
  o.check(count_mismatch == 0 && worst <= 1e-9,
          "1000 fluxes: " + std::to_string(count_mismatch) + " count mismatches, max root error " + fmt(worst, 3) +
              " rad");

  bool flips = true;
  const auto crit = potential::critical_fluxes(p);
  for (const auto& cf : crit) {
    const auto below = potential::count_minima(potential::FluxBias::from_quanta(cf.in_quanta() - 1e-7), p);
    const auto above = potential::count_minima(potential::FluxBias::from_quanta(cf.in_quanta() + 1e-7), p);
    flips = flips && (below + 1 == above || above + 1 == below);
  }
  o.check(flips && crit.size() == 2,
          "bifurcations at " + fmt(crit.at(0).in_quanta(), 8) + ", " + fmt(crit.at(1).in_quanta(), 8) +
              " phi0 flip well count by one");

  // Shallow (left) well from the symmetric point to where it vanishes.
  double lo = INFINITY, hi = 0.0;
  const double fc = crit.at(1).in_quanta();
  for (int k = 0; k <= 4000; ++k) {
    const double f = 0.5 + (fc - 1e-9 - 0.5) * k / 4000.0;
    const auto wells = potential::well_reports(potential::FluxBias::from_quanta(f), p);
    const double ghz = wells.front().plasma_frequency / kTwoPi / 1e9;
    lo = std::min(lo, ghz);
    hi = std::max(hi, ghz);
  }
  o.check(lo <= 4.4 && hi >= 5.9, "shallow-well f_p spans " + fmt(lo, 4) + "-" + fmt(hi, 4) + " GHz");
  return o;
}

Outcome fidelity_budget() {
  Outcome o;
  const protocol::ProtocolConfig cfg;
  const auto b = protocol::fidelity_budget(cfg, 100000);
  o.check(std::abs(b.f_raw - 0.92) <= 0.01, "F_raw=" + fmt(b.f_raw, 5));
  o.check(std::abs(b.eps_relax - 0.05) <= 0.005, "eps_relax=" + fmt(b.eps_relax, 5));
  o.check(std::abs(b.eps_dark - 0.02) <= 0.005, "eps_dark=" + fmt(b.eps_dark, 5));
  const double model = protocol::relaxation_error(780e-9, 6.6e-6);
  o.check(std::abs(model - 0.057) <= 1e-4, "relaxation model(780 ns, 6.6 us)=" + fmt(model, 8) + " vs 0.057");
  return o;
}

Outcome iq_discrimination() {
  Outcome o;
  const protocol::IqModel m;
  const double predicted = protocol::separation_fidelity(m);
  o.check(std::abs(predicted - 0.9998) <= 1e-4, "erfc prediction " + fmt(predicted, 8));
  const std::size_t n = 50000;
  const auto r = protocol::iq_discriminate(m, protocol::labelled_shots(n), 20180711);
  const double sigma = std::sqrt(predicted * (1.0 - predicted) / static_cast<double>(2 * n));
  o.check(std::abs(r.single_shot_fidelity - predicted) <= 3.0 * sigma,
          "empirical " + fmt(r.single_shot_fidelity, 8) + " (3 sigma = " + fmt(3.0 * sigma, 3) + ")");
  return o;
}

Outcome tomography_checks() {
  Outcome o;
  using namespace tomography;
  const DensityMatrix2 rho0{0.09, 0.02, 0.0};
  const DensityMatrix2 rho1{0.69, 0.01, 0.0};
  const double f0 = overlap_fidelity(rho0, PureState::ground());
  const double f1 = overlap_fidelity(rho1, PureState::excited());
  o.check(std::abs(f0 - 0.91) <= 1e-12 && std::abs(f1 - 0.69) <= 1e-12,
          "overlaps " + fmt(f0, 12) + ", " + fmt(f1, 12));

  std::vector<double> angles, durations;
  for (int k = 0; k < 8; ++k) angles.push_back(kTwoPi * k / 8.0);
  for (int k = 0; k <= 40; ++k) durations.push_back(200e-9 * k / 40.0);
  const double t_pi = 50e-9;
  double worst_rel = 0.0, worst_phi = 0.0;
  for (const DensityMatrix2& rho : {rho0, rho1}) {
    const auto fit = fit_tomogram(synthesize_tomogram(rho, t_pi, angles, durations, NoiseModel::noiseless(), 1));
    worst_rel = std::max({worst_rel, std::abs(fit.rho.beta - rho.beta) / rho.beta,
                          std::abs(fit.rho.r - rho.r) / rho.r, std::abs(fit.t_pi - t_pi) / t_pi});
    worst_phi = std::max(worst_phi, std::abs(fit.rho.phi - rho.phi));
  }
  // phi = 0 has no relative scale; its error is absolute.
  o.check(worst_rel <= 1e-6 && worst_phi <= 1e-6,
          "noiseless fit: max relative error " + fmt(worst_rel, 3) + ", phase error " + fmt(worst_phi, 3) + " rad");

  std::mt19937_64 gen(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int k = 0; k < 10000; ++k) {
    const double beta = u(gen);
    const double r = u(gen) * std::sqrt(beta * (1.0 - beta));
    const double phi = kTwoPi * u(gen) - kPi;
    const double theta = kTwoPi * u(gen);
    const double tp = 1e-9 + 1e-7 * u(gen);
    const double t = 5.0 * tp * u(gen);
    worst = std::max(worst, std::abs(expected_occupation({beta, r, phi}, theta, t, tp) -
                                     oracle::occupation_by_matrices(beta, r, phi, theta, t, tp)));
  }
  o.check(worst <= 1e-12, "closed form vs matrix product on 1e4 draws: " + fmt(worst, 3));
  return o;
}

Outcome depletion_recovery() {
  Outcome o;
  const protocol::ProtocolConfig cfg;
  double last = -1.0;
  bool monotone = true;
  for (int k = 0; k <= 400; ++k) {
    const double c = protocol::depletion_recovery(k * 0.5e-9, cfg).ramsey_contrast;
    monotone = monotone && c > last;
    last = c;
  }
  const double at40 = protocol::depletion_recovery(40e-9, cfg).ramsey_contrast;
  o.check(monotone, "contrast increasing over 0-200 ns");
  o.check(at40 >= 0.95, "contrast(40 ns)=" + fmt(at40, 12));
  return o;
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) files[fs::relative(e.path(), dir).string()] = cli::read_file(e.path());
  }
  return files;
}

Outcome cli_determinism() {
  Outcome o;
  const fs::path root = fs::temp_directory_path() / "jpmsim_acceptance_determinism";
  fs::remove_all(root);
  int stable = 0;
  std::string unstable;
  for (std::string_view name : cli::subcommand_names()) {
    std::string outputs[2];
    std::map<std::string, std::string> files[2];
    bool ok = true;
    for (int pass = 0; pass < 2; ++pass) {
      const fs::path dir = root / ("run" + std::to_string(pass)) / std::string(name);
      std::ostringstream out, err;
      const int code = cli::run({std::string(name), "--out", dir.string()}, out, err);
      ok = ok && code == 0;
      files[pass] = snapshot(dir);
      // Paths differ between the runs; compare the summaries with them stripped.
      std::string text = out.str();
      for (std::size_t at; (at = text.find(dir.generic_string())) != std::string::npos;) {
        text.erase(at, dir.generic_string().size());
      }
      outputs[pass] = text;
    }
    if (ok && !files[0].empty() && files[0] == files[1] && outputs[0] == outputs[1]) {
      ++stable;
    } else {
      unstable += " " + std::string(name);
    }
  }
  fs::remove_all(root);
  o.check(unstable.empty(), std::to_string(stable) + "/" + std::to_string(cli::subcommand_names().size()) +
                                " subcommands byte-stable" + (unstable.empty() ? "" : ", unstable:" + unstable));
  return o;
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "matched transfer bound", 1.0, matched_bound},
      {2, "decay-rate mismatch peaks", 1.0, mismatch_curves},
      {3, "frequency-mismatch sensitivity", 1.0, detuning_sensitivity},
      {4, "potential landscape", 10.0, potential_landscape},
      {5, "fidelity budget", 30.0, fidelity_budget},
      {6, "IQ discrimination", 10.0, iq_discrimination},
      {7, "tomography", 10.0, tomography_checks},
      {8, "depletion recovery", 1.0, depletion_recovery},
      {9, "CLI determinism", 60.0, cli_determinism},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.body();
    } catch (const std::exception& e) {
      o.check(false, std::string("exception: ") + e.what());
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    o.check(seconds < c.time_limit, "runtime " + fmt(seconds, 3) + " s < " + fmt(c.time_limit, 3) + " s");
    std::printf("%s  %d  %-32s %s\n", o.pass ? "PASS" : "FAIL", c.id, c.title.c_str(), o.detail.c_str());
    if (!o.pass) ++failures;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
