#include "app.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "config.hpp"
#include "jpmsim/potential.hpp"
#include "jpmsim/protocol.hpp"
#include "jpmsim/tomography.hpp"
#include "jpmsim/transfer.hpp"
#include "output.hpp"

namespace jpmsim::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Context {
  const Config& cfg;
  fs::path dir;
  Format format;
  std::ostream& out;
};

using Handler = std::function<void(const Context&)>;

struct Subcommand {
  std::string_view name;
  std::string_view summary;
  std::string_view description;
  Handler handler;
};

std::string num(double v, int digits = 6) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v == 0.0 ? 0.0 : v);
  return buf;
}

void announce(const Context& ctx, const fs::path& path, const std::string& detail) {
  ctx.out << path.generic_string() << ": " << detail << "\n";
}

// ---------------------------------------------------------------------------
// Config to module parameters

potential::JpmParams device_params(const Config& c) {
  potential::JpmParams p;
  p.critical_current = c.quantity("device.critical_current");
  p.loop_inductance = c.quantity("device.loop_inductance");
  p.shunt_capacitance = c.quantity("device.shunt_capacitance");
  p.mutual_inductance = c.optional_quantity("device.mutual_inductance");
  p.validate();
  return p;
}

transfer::TransferConfig transfer_params(const Config& c) {
  transfer::TransferConfig t;
  t.source = transfer::CavityMode::from_frequency(c.quantity("qubit_cavity.frequency"),
                                                  c.quantity("qubit_cavity.decay_time"));
  t.target = transfer::CavityMode::from_frequency(c.quantity("capture.frequency"),
                                                  c.quantity("capture.decay_time"));
  t.line_impedance = c.quantity("line.impedance");
  t.drive_amplitude = c.quantity("line.drive_amplitude");
  t.validate();
  return t;
}

protocol::IqModel iq_params(const Config& c) {
  protocol::IqModel m;
  m.centroid0 = {c.quantity("iq.centroid0_i"), c.quantity("iq.centroid0_q")};
  m.centroid1 = {c.quantity("iq.centroid1_i"), c.quantity("iq.centroid1_q")};
  m.sigma = c.quantity("iq.sigma");
  m.n_samples = static_cast<int>(c.integer("iq.n_samples"));
  m.validate();
  return m;
}

protocol::ProtocolConfig protocol_params(const Config& c) {
  protocol::ProtocolConfig p;
  p.t_prep = c.quantity("protocol.t_prep");
  p.window = c.text("protocol.window") == "rectangular" ? protocol::Window::rectangular
                                                         : protocol::Window::hamming;
  p.t1 = c.quantity("protocol.t1");
  if (c.is_keyword("protocol.relaxation")) {
    p.relaxation_override.reset();
  } else {
    p.relaxation_override = c.quantity("protocol.relaxation");
  }
  p.dark_prob = c.quantity("protocol.dark_prob");
  p.bright_detect_prob = c.quantity("protocol.bright_detect_prob");
  p.stark_shift_per_photon = kTwoPi * c.quantity("protocol.dispersive_shift");
  p.n_bar_qubit_cavity = c.quantity("protocol.n_bar");
  p.photons_per_unit_power = c.quantity("protocol.photons_per_unit_power");
  p.depletion_rate = c.is_keyword("protocol.depletion_rate") ? 0.0 : c.quantity("protocol.depletion_rate");
  p.depletion_photons = c.quantity("protocol.depletion_photons");
  p.dephasing_per_photon =
      c.is_keyword("protocol.dephasing_per_photon") ? 0.0 : c.quantity("protocol.dephasing_per_photon");
  p.depletion_time = c.quantity("protocol.depletion_time");
  p.cycle_time = c.quantity("protocol.cycle_time");
  p.t2 = c.quantity("protocol.t2");
  p.rabi_rate = kTwoPi * c.quantity("protocol.rabi_frequency");
  p.ramsey_amplitude = c.quantity("protocol.ramsey_amplitude");
  p.ramsey_phase = c.quantity("protocol.ramsey_phase");
  p.iq = iq_params(c);
  p.rng_seed = static_cast<std::uint64_t>(c.integer("seed"));
  p.validate();
  return p;
}

std::size_t positive_count(const Config& c, std::string_view key) {
  const std::int64_t n = c.integer(key);
  if (n < 0) throw ConfigError(std::string(key) + " must be >= 0");
  return static_cast<std::size_t>(n);
}

// ---------------------------------------------------------------------------
// Subcommands

void potential_sweep(const Context& ctx) {
  const potential::JpmParams p = device_params(ctx.cfg);
  std::vector<potential::FluxBias> fluxes;
  for (double wb : ctx.cfg.list("potential.flux")) fluxes.push_back({wb});
  const auto sweep = potential::sweep_wells(fluxes, p);

  Table t;
  t.columns = {{"flux", "phi0"},         {"well", "-"},
               {"minimum_phase", "rad"}, {"barrier_phase", "rad"},
               {"plasma_frequency", "GHz"}, {"barrier_height", "J"},
               {"level_count", "1"}};
  double f_lo = INFINITY, f_hi = 0.0;
  std::size_t min_wells = ~std::size_t{0}, max_wells = 0;
  for (std::size_t i = 0; i < fluxes.size(); ++i) {
    min_wells = std::min(min_wells, sweep[i].size());
    max_wells = std::max(max_wells, sweep[i].size());
    for (const auto& w : sweep[i]) {
      const double ghz = w.plasma_frequency / kTwoPi / 1e9;
      if (w.bounded()) {
        f_lo = std::min(f_lo, ghz);
        f_hi = std::max(f_hi, ghz);
      }
      t.add({fluxes[i].in_quanta(), std::string(potential::to_string(w.label)), w.minimum_phase,
             Table::maybe(w.barrier_phase), ghz, Table::maybe(w.barrier_height),
             Table::maybe(w.level_count)});
    }
  }
  const fs::path path = write_table(ctx.dir, "potential_sweep", t, ctx.format);
  std::string detail = std::to_string(t.rows.size()) + " wells over " + std::to_string(fluxes.size()) +
                       " fluxes, beta_L=" + num(potential::beta_L(p)) + ", " + std::to_string(min_wells) +
                       "-" + std::to_string(max_wells) + " wells";
  if (f_hi > 0.0) detail += ", bounded-well f_p " + num(f_lo, 4) + "-" + num(f_hi, 4) + " GHz";
  announce(ctx, path, detail);
}

void bifurcation(const Context& ctx) {
  const potential::JpmParams p = device_params(ctx.cfg);
  const double beta = potential::beta_L(p);
  const auto crit = potential::critical_fluxes(p);
  Table t;
  t.columns = {{"flux", "phi0"}, {"minima_below", "1"}, {"minima_above", "1"}, {"beta_L", "1"}};
  std::string list;
  for (const auto& c : crit) {
    const double f = c.in_quanta();
    const double eps = 1e-6;
    t.add({f, static_cast<double>(potential::count_minima(potential::FluxBias::from_quanta(f - eps), p)),
           static_cast<double>(potential::count_minima(potential::FluxBias::from_quanta(f + eps), p)), beta});
    list += (list.empty() ? "" : ", ") + num(f, 8);
  }
  const fs::path path = write_table(ctx.dir, "bifurcation", t, ctx.format);
  announce(ctx, path,
           "beta_L=" + num(beta) + (crit.empty() ? ", single well at every flux"
                                                 : ", critical fluxes " + list + " phi0"));
}

void transfer_curves(const Context& ctx) {
  const transfer::TransferConfig dev = transfer_params(ctx.cfg);
  const double k1 = dev.source.decay_rate;
  const auto times = ctx.cfg.list("transfer.times");
  for (double x : times) {
    if (x < 0.0) throw ConfigError("transfer.times must be >= 0");
  }

  auto family = [&](const std::string& stem, const std::vector<double>& ratios, const std::string& tag,
                    auto&& efficiency) {
    Table t;
    t.columns = {{"t_kappa1", "1"}, {"efficiency", "1"}, {"label", "-"}};
    std::string peaks;
    for (double r : ratios) {
      const std::string label = tag + "=" + num(r);
      double peak = 0.0;
      for (double x : times) {
        const double e = efficiency(x / k1, r);
        peak = std::max(peak, e);
        t.add({x, e, label});
      }
      peaks += (peaks.empty() ? "" : ", ") + label + " peak " + num(peak, 4);
    }
    const fs::path path = write_table(ctx.dir, stem, t, ctx.format);
    announce(ctx, path, std::to_string(ratios.size()) + " curves x " + std::to_string(times.size()) +
                            " points; " + peaks);
  };

  const auto kappa_ratios = ctx.cfg.list("transfer.kappa_ratios");
  for (double r : kappa_ratios) {
    if (!(r > 0.0)) throw ConfigError("transfer.kappa_ratios must be > 0");
  }
  family("transfer_kappa_mismatch", kappa_ratios, "kappa2/kappa1",
         [&](double t, double r) { return transfer::efficiency_kappa_mismatch(t, k1, r * k1); });
  family("transfer_detuning", ctx.cfg.list("transfer.detuning_ratios"), "dw/kappa",
         [&](double t, double r) { return transfer::efficiency_freq_mismatch(t, k1, r * k1); });
}

void transfer_peak(const Context& ctx) {
  const transfer::TransferConfig dev = transfer_params(ctx.cfg);
  const protocol::ProtocolConfig proto = protocol_params(ctx.cfg);
  transfer::QuadratureOptions opt;
  opt.points_per_period = static_cast<int>(ctx.cfg.integer("transfer.points_per_period"));
  if (opt.points_per_period < 40) throw ConfigError("transfer.points_per_period must be >= 40");

  const auto closed = transfer::peak_efficiency_closed_form(dev);
  const auto numeric = transfer::peak_efficiency(dev, opt);
  const auto rates_only = transfer::kappa_mismatch_peak(dev.source.decay_rate, dev.target.decay_rate);

  Table t;
  t.columns = {{"method", "-"}, {"efficiency", "1"}, {"time", "ns"}, {"capture_photons", "1"}};
  const double n = proto.n_bar_qubit_cavity;
  t.add({std::string("rotating_wave"), closed.efficiency, closed.time * 1e9,
         protocol::capture_cavity_photons(n, closed.efficiency)});
  t.add({std::string("quadrature"), numeric.efficiency, numeric.time * 1e9,
         protocol::capture_cavity_photons(n, numeric.efficiency)});
  t.add({std::string("decay_rates_only"), rates_only.efficiency, rates_only.time * 1e9,
         protocol::capture_cavity_photons(n, rates_only.efficiency)});
  const fs::path path = write_table(ctx.dir, "transfer_peak", t, ctx.format);
  announce(ctx, path,
           "rotating-wave " + num(closed.efficiency, 5) + " at " + num(closed.time * 1e9, 5) + " ns, quadrature " +
               num(numeric.efficiency, 5) + ", equal-frequency " + num(rates_only.efficiency, 5) +
               " (kappa2/kappa1=" + num(dev.target.decay_rate / dev.source.decay_rate, 4) + ")");
}

void budget(const Context& ctx) {
  const protocol::ProtocolConfig p = protocol_params(ctx.cfg);
  const std::size_t shots = positive_count(ctx.cfg, "protocol.shots");
  if (shots < 10000) throw ConfigError("protocol.shots must be >= 10000");
  const auto mc = protocol::fidelity_budget(p, shots);
  const auto an = protocol::analytic_budget(p);
  const double window = protocol::relaxation_error(p.t_prep, p.t1);

  Table t;
  t.columns = {{"source", "-"},
               {"f_raw", "1"},
               {"eps_relax", "1"},
               {"eps_dark", "1"},
               {"eps_other", "1"},
               {"p_switch_excited", "1"},
               {"p_switch_ground", "1"},
               {"shots", "1"},
               {"window_average_relaxation", "1"}};
  auto row = [&](const std::string& source, const protocol::FidelityBudget& b) {
    t.add({source, b.f_raw, b.eps_relax, b.eps_dark, b.eps_other, b.p_switch_excited, b.p_switch_ground,
           b.n_shots ? Cell{static_cast<double>(b.n_shots)} : Cell{std::monostate{}}, window});
  };
  row("analytic", an);
  row("monte_carlo", mc);
  const fs::path path = write_table(ctx.dir, "budget", t, ctx.format);
  announce(ctx, path,
           "F_raw " + num(mc.f_raw, 4) + " (analytic " + num(an.f_raw, 5) + "), eps_relax " +
               num(mc.eps_relax, 3) + ", eps_dark " + num(mc.eps_dark, 3) + ", eps_other " +
               num(mc.eps_other, 3) + " from " + std::to_string(shots) + " shots per state");
}

void fringe(const Context& ctx, bool ramsey) {
  const protocol::ProtocolConfig p = protocol_params(ctx.cfg);
  const std::string sec = ramsey ? "ramsey" : "rabi";
  std::vector<double> det = ctx.cfg.list(sec + ".detuning");
  for (double& d : det) d *= kTwoPi;
  const std::vector<double> axis = ctx.cfg.list(ramsey ? "ramsey.delay" : "rabi.duration");
  for (double x : axis) {
    if (x < 0.0) throw ConfigError(sec + " times must be >= 0");
  }
  const std::size_t shots = positive_count(ctx.cfg, "protocol.shots_per_point");
  const protocol::Grid g =
      ramsey ? protocol::ramsey_fringe(det, axis, p, shots) : protocol::rabi_chevron(det, axis, p, shots);

  Table t;
  t.columns = {{"detuning", "MHz"}, {ramsey ? "delay" : "duration", "ns"}, {"p_switch", "1"}};
  for (std::size_t i = 0; i < g.rows; ++i) {
    for (std::size_t j = 0; j < g.cols; ++j) t.add({det[i] / kTwoPi / 1e6, axis[j] * 1e9, g.at(i, j)});
  }
  const auto [lo, hi] = std::minmax_element(g.values.begin(), g.values.end());
  const fs::path path = write_table(ctx.dir, sec, t, ctx.format);
  announce(ctx, path,
           std::to_string(g.rows) + " x " + std::to_string(g.cols) + " cells, p_switch " + num(*lo, 4) + "-" +
               num(*hi, 4) + (shots ? ", " + std::to_string(shots) + " shots per cell" : ", exact channel"));
}

void stark(const Context& ctx) {
  const protocol::ProtocolConfig p = protocol_params(ctx.cfg);
  const transfer::TransferConfig dev = transfer_params(ctx.cfg);
  const auto powers = ctx.cfg.list("stark.powers");
  const auto points = protocol::stark_calibration(powers, p);
  const double eta = transfer::kappa_mismatch_peak(dev.source.decay_rate, dev.target.decay_rate).efficiency;

  Table t;
  t.columns = {{"power", "1"}, {"n_bar", "1"}, {"qubit_shift", "MHz"}, {"capture_photons", "1"}};
  for (const auto& s : points) {
    t.add({s.power, s.n_bar, s.qubit_shift / kTwoPi / 1e6, protocol::capture_cavity_photons(s.n_bar, eta)});
  }
  const double n_sat = ctx.cfg.quantity("stark.n_bar_saturation");
  const fs::path path = write_table(ctx.dir, "stark", t, ctx.format);
  announce(ctx, path,
           std::to_string(points.size()) + " powers, " + num(p.stark_shift_per_photon / kTwoPi / 1e6, 4) +
               " MHz per photon; n_bar " + num(n_sat, 3) + " at saturation gives " +
               num(protocol::capture_cavity_photons(n_sat, eta), 3) + " capture photons (transfer " +
               num(eta, 4) + ")");
}

void depletion(const Context& ctx) {
  const protocol::ProtocolConfig p = protocol_params(ctx.cfg);
  const auto times = ctx.cfg.list("depletion.times");
  Table t;
  t.columns = {{"t_dep", "ns"}, {"residual_photons", "1"}, {"ramsey_contrast", "1"}, {"frequency_shift", "MHz"}};
  for (double td : times) {
    if (td < 0.0) throw ConfigError("depletion.times must be >= 0");
    const auto r = protocol::depletion_recovery(td, p);
    t.add({td * 1e9, r.residual_photons, r.ramsey_contrast, r.frequency_shift / kTwoPi / 1e6});
  }
  const auto at = protocol::depletion_recovery(p.depletion_time, p);
  const fs::path path = write_table(ctx.dir, "depletion", t, ctx.format);
  announce(ctx, path,
           std::to_string(times.size()) + " depletion times, contrast " + num(at.ramsey_contrast, 4) + " at " +
               num(p.depletion_time * 1e9, 4) + " ns (" + num(at.residual_photons, 3) + " photons left)");
}

void iq(const Context& ctx) {
  const protocol::IqModel m = iq_params(ctx.cfg);
  const std::size_t n = positive_count(ctx.cfg, "iq.shots");
  if (n == 0) throw ConfigError("iq.shots must be > 0");
  const auto shots = protocol::labelled_shots(n);
  const auto r = protocol::iq_discriminate(m, shots, static_cast<std::uint64_t>(ctx.cfg.integer("seed")));
  Table t;
  t.columns = {{"separation", "1"}, {"shot_sigma", "1"},  {"separation_fidelity", "1"},
               {"single_shot_fidelity", "1"}, {"threshold", "1"}, {"axis_i", "1"},
               {"axis_q", "1"},       {"n0", "1"},          {"n1", "1"}};
  t.add({m.separation(), m.shot_sigma(), r.separation_fidelity, r.single_shot_fidelity, r.threshold, r.axis[0],
         r.axis[1], static_cast<double>(r.n0), static_cast<double>(r.n1)});
  const fs::path path = write_table(ctx.dir, "iq", t, ctx.format);
  announce(ctx, path,
           "d/sigma " + num(m.separation() / m.shot_sigma(), 4) + ", predicted " +
               num(r.separation_fidelity, 6) + ", empirical " + num(r.single_shot_fidelity, 6) + " over " +
               std::to_string(2 * n) + " shots");
}

tomography::DensityMatrix2 tomo_state(const Config& c) {
  tomography::DensityMatrix2 rho{c.quantity("tomo.beta"), c.quantity("tomo.r"), c.quantity("tomo.phi")};
  rho.validate();
  return rho;
}

tomography::TomogramGrid synthesize(const Config& c) {
  const std::string kind = c.text("tomo.noise");
  tomography::NoiseModel noise;
  if (kind == "binomial") {
    const std::int64_t shots = c.integer("tomo.shots");
    if (shots < 1) throw ConfigError("tomo.shots must be >= 1");
    noise = tomography::NoiseModel::binomial(shots);
  } else if (kind == "gaussian") {
    noise = tomography::NoiseModel::gaussian(c.quantity("tomo.sigma"));
  }
  const double t_pi = c.quantity("tomo.t_pi");
  if (!(t_pi > 0.0)) throw ConfigError("tomo.t_pi must be > 0");
  for (double d : c.list("tomo.durations")) {
    if (d < 0.0) throw ConfigError("tomo.durations must be >= 0");
  }
  return tomography::synthesize_tomogram(tomo_state(c), t_pi, c.list("tomo.angles"), c.list("tomo.durations"),
                                         noise, static_cast<std::uint64_t>(c.integer("seed")));
}

Table tomogram_table(const tomography::TomogramGrid& g) {
  Table t;
  t.columns = {{"angle", "rad"}, {"duration", "ns"}, {"occupation", "1"}, {"shots", "1"}};
  for (std::size_t i = 0; i < g.angles.size(); ++i) {
    for (std::size_t j = 0; j < g.durations.size(); ++j) {
      const std::size_t k = i * g.durations.size() + j;
      t.add({g.angles[i], g.durations[j] * 1e9, g.occupation[k],
             g.shots.empty() ? Cell{std::monostate{}} : Cell{static_cast<double>(g.shots[k])}});
    }
  }
  return t;
}

void tomo_synth(const Context& ctx) {
  const auto g = synthesize(ctx.cfg);
  const fs::path path = write_table(ctx.dir, "tomogram", tomogram_table(g), ctx.format);
  announce(ctx, path,
           std::to_string(g.angles.size()) + " axes x " + std::to_string(g.durations.size()) +
               " durations, noise " + ctx.cfg.text("tomo.noise"));
}

double parse_cell(std::string_view s, const std::string& where) {
  try {
    return parse_quantity(s, Dim::number);
  } catch (const ConfigError& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

/// Reads the CSV written by tomo-synth (angle, duration, occupation[, shots]).
tomography::TomogramGrid read_tomogram(const fs::path& path) {
  const std::string text = read_file(path);
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  if (line.rfind("angle[rad],duration[ns],occupation[1]", 0) != 0) {
    throw ConfigError(path.string() + ": expected header angle[rad],duration[ns],occupation[1][,shots[1]]");
  }
  std::vector<double> angles, durations;
  std::map<std::pair<double, double>, std::pair<double, double>> cells;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<std::string_view> f;
    std::string_view rest = line;
    while (true) {
      const auto comma = rest.find(',');
      f.push_back(trim(rest.substr(0, comma)));
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
    const std::string where = path.string() + ":" + std::to_string(line_no);
    if (f.size() < 3) throw ConfigError(where + ": expected at least 3 fields");
    const double a = parse_cell(f[0], where);
    const double d = parse_cell(f[1], where) * 1e-9;
    const double p = parse_cell(f[2], where);
    const double shots = f.size() > 3 && !f[3].empty() ? parse_cell(f[3], where) : 0.0;
    if (std::find(angles.begin(), angles.end(), a) == angles.end()) angles.push_back(a);
    if (std::find(durations.begin(), durations.end(), d) == durations.end()) durations.push_back(d);
    if (!cells.emplace(std::pair{a, d}, std::pair{p, shots}).second) {
      throw ConfigError(where + ": duplicate cell");
    }
  }
  tomography::TomogramGrid g;
  g.angles = angles;
  g.durations = durations;
  bool counted = true;
  for (double a : angles) {
    for (double d : durations) {
      const auto it = cells.find({a, d});
      if (it == cells.end()) throw ConfigError(path.string() + ": tomogram is not a full grid");
      g.occupation.push_back(it->second.first);
      g.shots.push_back(static_cast<long>(it->second.second));
      counted = counted && it->second.second > 0.0;
    }
  }
  if (!counted) g.shots.clear();
  try {
    g.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return g;
}

json rho_json(const tomography::DensityMatrix2& rho) {
  const auto c = rho.rho01();
  return {{"beta", rho.beta},
          {"r", rho.r},
          {"phi", rho.phi},
          {"matrix_real", {{1.0 - rho.beta, c.real()}, {c.real(), rho.beta}}},
          {"matrix_imag", {{0.0, c.imag()}, {-c.imag(), 0.0}}}};
}

void tomo_fit(const Context& ctx) {
  const std::string input = ctx.cfg.text("tomo.input");
  const tomography::TomogramGrid grid = input.empty() ? synthesize(ctx.cfg) : read_tomogram(input);
  const auto fit = tomography::fit_tomogram(grid);

  json cov = json::array();
  for (const auto& row : fit.covariance) cov.push_back(json(row));
  const double f0 = tomography::overlap_fidelity(fit.rho, tomography::PureState::ground());
  const double f1 = tomography::overlap_fidelity(fit.rho, tomography::PureState::excited());
  const double fm = tomography::overlap_fidelity(fit.rho, tomography::PureState::minus_i());
  json doc = {{"source", input.empty() ? std::string("synthesized") : input},
              {"rho", rho_json(fit.rho)},
              {"raw_rho", rho_json(fit.raw_rho)},
              {"t_pi_ns", fit.t_pi * 1e9},
              {"residual_rms", fit.residual_rms},
              {"covariance_order", {"beta", "re_rho01", "im_rho01", "t_pi_s"}},
              {"covariance", cov},
              {"projected", fit.projected},
              {"phase_unidentifiable", fit.phase_unidentifiable},
              {"iterations", fit.iterations},
              {"overlap", {{"ground", f0}, {"excited", f1}, {"minus_i", fm}}}};
  const fs::path path = write_file(ctx.dir, "tomo_fit.json", doc.dump(2) + "\n");
  announce(ctx, path,
           "beta " + num(fit.rho.beta, 4) + ", r " + num(fit.rho.r, 3) + ", phi " + num(fit.rho.phi, 3) +
               " rad, t_pi " + num(fit.t_pi * 1e9, 5) + " ns; overlap |0> " + num(f0, 3) + ", |1> " +
               num(f1, 3) + (fit.projected ? " (projected to physical)" : ""));
}

const std::vector<Subcommand>& subcommands() {
  static const std::vector<Subcommand> list = {
      {"potential-sweep", "Wells of the JPM potential across a flux sweep",
       "Locates every extremum of the rf-SQUID potential\n"
       "  U(d) = -E_J cos d + (Phi0/2pi)^2 (d - 2pi Phi/Phi0)^2 / 2L\n"
       "for each flux in potential.flux, and reports for every local minimum its\n"
       "phase, the lower adjacent barrier, the small-oscillation plasma frequency\n"
       "omega_p = (2pi/Phi0) sqrt(U''/C) and the number of levels Delta U / hbar omega_p.\n"
       "The shallow-well plasma frequency is the flux-tunable detector frequency.",
       potential_sweep},
      {"bifurcation", "Fluxes where a well appears or vanishes",
       "Computes the screening parameter beta_L = 2pi L I0 / Phi0 and the external\n"
       "fluxes in [0, Phi0] where the load line becomes tangent to the Josephson\n"
       "current (cos d = -1/beta_L), so that a metastable well is created or\n"
       "destroyed. Each row gives the minimum count just below and just above.",
       bifurcation},
      {"transfer-curves", "Cavity-to-cavity photon transfer versus time",
       "Fraction of the energy released by a decaying qubit cavity that is held in\n"
       "the capture cavity at time t, for a family of decay-rate ratios\n"
       "kappa2/kappa1 (equal frequencies) and a family of detunings dw/kappa\n"
       "(equal decay rates). Matched cavities reach 4/e^2 at t = 2/kappa.",
       transfer_curves},
      {"transfer-peak", "Best transfer efficiency for the configured cavities",
       "Peak transfer efficiency and its time for the configured qubit and capture\n"
       "cavities, from the rotating-wave closed form and from direct quadrature of\n"
       "the full real-valued drive, together with the equal-frequency optimum\n"
       "4 r^{-(r+1)/(r-1)} for r = kappa2/kappa1 and the implied capture-cavity\n"
       "photon number.",
       transfer_peak},
      {"budget", "Raw measurement fidelity and its error budget",
       "Monte Carlo of the measurement cycle (qubit relaxation during pointer\n"
       "preparation, bright-pointer capture, dark counts) for qubits prepared in\n"
       "|1> and |0>, with each miss attributed to one cause, next to the closed-form\n"
       "budget F = (1 - p_dark)(1 - p_relax) p_bright. Also reports the window-\n"
       "averaged relaxation probability 1 - (T1/t)(1 - exp(-t/T1)).",
       budget},
      {"ramsey", "Detector-read Ramsey fringes versus detuning and delay",
       "Switching probability for a Ramsey sequence, P = p_dark + F P_ideal with\n"
       "P_ideal = A exp(-tau/T2) cos^2(delta tau/2 + phi0), over a detuning x delay\n"
       "grid. With protocol.shots_per_point > 0 each cell is a Monte Carlo estimate.",
       [](const Context& c) { fringe(c, true); }},
      {"rabi", "Detector-read Rabi chevron versus detuning and duration",
       "Switching probability after a detuned drive pulse,\n"
       "P_ideal = Omega^2/(Omega^2 + delta^2) sin^2(sqrt(Omega^2 + delta^2) t/2),\n"
       "passed through the measurement channel p_dark + F P_ideal.",
       [](const Context& c) { fringe(c, false); }},
      {"stark", "ac-Stark photon-number calibration",
       "Linear ac-Stark map from drive power to qubit-cavity photon number and\n"
       "qubit frequency shift 2 chi n, plus the capture-cavity occupation expected\n"
       "after transfer at the equal-frequency optimum for the configured decay rates.",
       stark},
      {"depletion", "Cavity reset after a switching event",
       "Photons left in the cavities after the detector dissipates the energy of a\n"
       "switching event for a time t_dep, n = n0 exp(-kappa_dep t_dep), with the\n"
       "resulting Ramsey contrast exp(-c n) and Stark shift. Defaults calibrate\n"
       "kappa_dep and c so the contrast reaches 0.95 at the configured depletion time.",
       depletion},
      {"iq", "Single-shot discrimination of the detector flux states",
       "Draws IQ points from two Gaussian clouds, thresholds at the midpoint of the\n"
       "empirical class means, and compares the single-shot fidelity with\n"
       "1 - erfc(d / (2 sqrt2 sigma)) / 2.",
       iq},
      {"tomo-synth", "Synthetic qubit tomogram",
       "Excited-state occupation after rotating a qubit density matrix by\n"
       "pi t / t_pi about equatorial axes at azimuth theta,\n"
       "P = beta + (1 - 2 beta)(1 - cos a)/2 - r sin a sin(phi + theta),\n"
       "on an axis x duration grid with optional binomial or Gaussian noise.",
       tomo_synth},
      {"tomo-fit", "Density matrix from a tomogram",
       "Least-squares fit of beta, r, phi and t_pi to a tomogram (tomo.input, or\n"
       "one synthesized from tomo.*), projection onto physical states, curvature\n"
       "covariance, and overlap fidelities with |0>, |1> and (|0> - i|1>)/sqrt2.",
       tomo_fit},
  };
  return list;
}

std::string keys_help() {
  std::string s = "Configuration keys (key = value, units required where shown):\n";
  for (const KeySpec& k : schema()) {
    s += "  " + std::string(k.key) + " = " + (k.default_value.empty() ? "<unset>" : std::string(k.default_value));
    s += "    " + std::string(k.help) + "\n";
  }
  return s;
}

}  // namespace

const std::vector<std::string_view>& subcommand_names() {
  static const std::vector<std::string_view> names = [] {
    std::vector<std::string_view> n;
    for (const auto& s : subcommands()) n.push_back(s.name);
    return n;
  }();
  return names;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Simulation of qubit readout with a Josephson photomultiplier (JPM) photon counter.", "jpmsim"};
  app.require_subcommand(1, 1);
  app.footer(
      "Every subcommand accepts --config FILE, --set key=value (repeatable) and --out DIR.\n"
      "Output directory: --out, else output.directory, else $JPMSIM_OUTPUT_DIR, else '.'.\n"
      "Exit status: 0 ok, 2 configuration error, 3 numerical failure, 4 I/O error.\n"
      "Run 'jpmsim <subcommand> --help' for what a subcommand computes, or\n"
      "'jpmsim --keys' for every configuration key.");
  bool list_keys = false;
  app.add_flag("--keys", list_keys, "List configuration keys with defaults");

  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_dir;
  const Subcommand* chosen = nullptr;
  for (const Subcommand& s : subcommands()) {
    CLI::App* sub = app.add_subcommand(std::string(s.name), std::string(s.summary));
    sub->footer(std::string(s.description));
    sub->add_option("-c,--config", config_path, "Configuration file");
    sub->add_option("-s,--set", overrides, "Override one key, key=value");
    sub->add_option("-o,--out", out_dir, "Output directory");
    sub->callback([&chosen, &s] { chosen = &s; });
  }

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    if (std::find(args.begin(), args.end(), "--keys") != args.end()) {
      out << keys_help();
      return kOk;
    }
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }
  if (!chosen) return kConfigError;

  try {
    Config cfg;
    if (!config_path.empty()) cfg.merge_document(read_file(config_path), config_path);
    for (const std::string& o : overrides) cfg.apply_override(o);

    fs::path dir = ".";
    if (!out_dir.empty()) {
      dir = out_dir;
    } else if (cfg.has("output.directory")) {
      dir = cfg.text("output.directory");
    } else if (const char* env = std::getenv("JPMSIM_OUTPUT_DIR"); env && *env) {
      dir = env;
    }
    const Format format = cfg.text("output.format") == "json" ? Format::json : Format::csv;
    chosen->handler(Context{cfg, dir, format, out});
    return kOk;
  } catch (const ConfigError& e) {
    err << "jpmsim " << chosen->name << ": configuration error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::invalid_argument& e) {
    err << "jpmsim " << chosen->name << ": invalid parameter: " << e.what() << "\n";
    return kConfigError;
  } catch (const IoError& e) {
    err << "jpmsim " << chosen->name << ": I/O error: " << e.what() << "\n";
    return kIoError;
  } catch (const fs::filesystem_error& e) {
    err << "jpmsim " << chosen->name << ": I/O error: " << e.what() << "\n";
    return kIoError;
  } catch (const std::exception& e) {
    err << "jpmsim " << chosen->name << ": numerical error: " << e.what() << "\n";
    return kNumericalError;
  }
}

}  // namespace jpmsim::cli
