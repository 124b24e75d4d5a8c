#include "jpmsim/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

#include "jpmsim/parallel.hpp"

namespace jpmsim::protocol {

namespace {

void require_probability(double p, const char* name) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument(std::string("protocol: ") + name + " must lie in [0, 1]");
  }
}

void require_positive(double x, const char* name) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw std::invalid_argument(std::string("protocol: ") + name + " must be > 0");
  }
}

struct ShotCounts {
  std::size_t relaxed_miss = 0;
  std::size_t other_miss = 0;
  std::size_t false_switch = 0;
  ShotCounts& operator+=(const ShotCounts& o) {
    relaxed_miss += o.relaxed_miss;
    other_miss += o.other_miss;
    false_switch += o.false_switch;
    return *this;
  }
};

using IdealModel = double (*)(double detuning, double x, const ProtocolConfig& cfg);

double ramsey_ideal(double detuning, double delay, const ProtocolConfig& cfg) {
  const double c = std::cos(detuning * delay / 2.0 + cfg.ramsey_phase);
  return cfg.ramsey_amplitude * std::exp(-delay / cfg.t2) * c * c;
}

double rabi_ideal(double detuning, double duration, const ProtocolConfig& cfg) {
  const double omega2 = cfg.rabi_rate * cfg.rabi_rate;
  const double general2 = omega2 + detuning * detuning;
  const double s = std::sin(std::sqrt(general2) * duration / 2.0);
  return omega2 / general2 * s * s;
}

Grid sweep(std::span<const double> axis0, std::span<const double> axis1, const ProtocolConfig& cfg,
           std::size_t shots_per_point, Execution exec, IdealModel ideal) {
  cfg.validate();
  if (axis0.empty() || axis1.empty()) throw std::invalid_argument("protocol: empty sweep axis");
  Grid grid;
  grid.rows = axis0.size();
  grid.cols = axis1.size();
  grid.values = parallel_map<double>(
      grid.rows * grid.cols,
      [&](std::size_t idx) {
        const double p_ideal = std::clamp(ideal(axis0[idx / grid.cols], axis1[idx % grid.cols], cfg), 0.0, 1.0);
        if (shots_per_point == 0) return through_channel(p_ideal, cfg);
        SplitMix64 rng = substream(cfg.rng_seed, Stream::fringe_point, idx);
        std::size_t switches = 0;
        for (std::size_t s = 0; s < shots_per_point; ++s) {
          const bool excited = rng.uniform() < p_ideal;
          switches += static_cast<std::size_t>(simulate_shot(excited, cfg, rng).switch_bit);
        }
        return static_cast<double>(switches) / static_cast<double>(shots_per_point);
      },
      exec);
  return grid;
}

}  // namespace

std::string_view to_string(Window w) { return w == Window::hamming ? "hamming" : "rectangular"; }

std::string_view to_string(SwitchCause c) {
  switch (c) {
    case SwitchCause::none:
      return "none";
    case SwitchCause::bright_capture:
      return "bright_capture";
    case SwitchCause::dark_count:
      return "dark_count";
  }
  return "?";
}

void IqModel::validate() const {
  require_positive(sigma, "iq sigma");
  if (n_samples < 1) throw std::invalid_argument("protocol: iq n_samples must be >= 1");
}

double IqModel::separation() const {
  return std::hypot(centroid1[0] - centroid0[0], centroid1[1] - centroid0[1]);
}

void ProtocolConfig::validate() const {
  require_positive(t_prep, "t_prep");
  require_positive(t1, "t1");
  require_positive(t2, "t2");
  require_positive(cycle_time, "cycle_time");
  require_positive(depletion_time, "depletion_time");
  require_positive(rabi_rate, "rabi_rate");
  if (relaxation_override) require_probability(*relaxation_override, "relaxation_override");
  require_probability(dark_prob, "dark_prob");
  require_probability(bright_detect_prob, "bright_detect_prob");
  if (cycle_time < t_prep) throw std::invalid_argument("protocol: cycle_time must be >= t_prep");
  if (depletion_rate < 0.0 || dephasing_per_photon < 0.0 || depletion_photons < 0.0) {
    throw std::invalid_argument("protocol: depletion parameters must be >= 0");
  }
  iq.validate();
}

double ProtocolConfig::relaxation_probability() const {
  return relaxation_override ? *relaxation_override : relaxation_error(t_prep, t1);
}

Envelope hamming_envelope(double duration, std::size_t n) {
  if (n < 2) throw std::invalid_argument("hamming_envelope: need n >= 2");
  require_positive(duration, "duration");
  Envelope env;
  env.dt = duration / static_cast<double>(n - 1);
  env.amplitude.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    env.amplitude[k] =
        0.54 - 0.46 * std::cos(kTwoPi * static_cast<double>(k) / static_cast<double>(n - 1));
  }
  const double peak = *std::max_element(env.amplitude.begin(), env.amplitude.end());
  for (double& a : env.amplitude) a /= peak;
  return env;
}

Envelope rectangular_envelope(double duration, std::size_t n) {
  if (n < 2) throw std::invalid_argument("rectangular_envelope: need n >= 2");
  require_positive(duration, "duration");
  return {duration / static_cast<double>(n - 1), std::vector<double>(n, 1.0)};
}

Envelope drive_envelope(const ProtocolConfig& cfg, std::size_t n) {
  return cfg.window == Window::hamming ? hamming_envelope(cfg.t_prep, n)
                                       : rectangular_envelope(cfg.t_prep, n);
}

double spectral_leakage(const Envelope& env, double detuning) {
  std::complex<double> at_offset{0.0, 0.0};
  double at_zero = 0.0;
  for (std::size_t k = 0; k < env.amplitude.size(); ++k) {
    const double phase = -detuning * env.dt * static_cast<double>(k);
    at_offset += env.amplitude[k] * std::polar(1.0, phase);
    at_zero += env.amplitude[k];
  }
  return std::norm(at_offset) / (at_zero * at_zero);
}

double relaxation_error(double t_prep, double t1) {
  require_positive(t_prep, "t_prep");
  require_positive(t1, "t1");
  const double x = t_prep / t1;
  // 1 - (1 - e^{-x})/x; series below x = 1e-4 avoids cancellation.
  if (x < 1e-4) return x / 2.0 - x * x / 6.0 + x * x * x / 24.0;
  return 1.0 + std::expm1(-x) / x;
}

ShotResult simulate_shot(bool qubit_excited, const ProtocolConfig& cfg, SplitMix64& rng) {
  const double u_relax = rng.uniform();
  const double u_capture = rng.uniform();
  const double u_dark = rng.uniform();

  ShotResult shot;
  bool captured = false;
  if (qubit_excited) {
    shot.qubit_relaxed = u_relax < cfg.relaxation_probability();
    captured = !shot.qubit_relaxed && u_capture < cfg.bright_detect_prob;
  }
  if (captured) {
    shot.switch_bit = 1;
    shot.cause = SwitchCause::bright_capture;
  } else if (u_dark < cfg.dark_prob) {
    shot.switch_bit = 1;
    shot.cause = SwitchCause::dark_count;
  }

  const IqPoint& center = shot.switch_bit ? cfg.iq.centroid1 : cfg.iq.centroid0;
  double sum_i = 0.0;
  double sum_q = 0.0;
  for (int s = 0; s < cfg.iq.n_samples; ++s) {
    const auto [ni, nq] = rng.normal_pair();
    sum_i += ni;
    sum_q += nq;
  }
  const double scale = cfg.iq.sigma / static_cast<double>(cfg.iq.n_samples);
  shot.iq_point = {center[0] + scale * sum_i, center[1] + scale * sum_q};
  return shot;
}

ShotResult simulate_indexed_shot(bool qubit_excited, const ProtocolConfig& cfg, std::uint64_t index) {
  SplitMix64 rng =
      substream(cfg.rng_seed, qubit_excited ? Stream::excited_shot : Stream::ground_shot, index);
  return simulate_shot(qubit_excited, cfg, rng);
}

FidelityBudget analytic_budget(const ProtocolConfig& cfg) {
  cfg.validate();
  const double pr = cfg.relaxation_probability();
  const double pb = cfg.bright_detect_prob;
  const double pd = cfg.dark_prob;
  FidelityBudget b;
  b.eps_relax = pr * (1.0 - pd);
  b.eps_other = (1.0 - pr) * (1.0 - pb) * (1.0 - pd);
  b.eps_dark = pd;
  b.p_switch_excited = 1.0 - b.eps_relax - b.eps_other;
  b.p_switch_ground = pd;
  b.f_raw = b.p_switch_excited - b.p_switch_ground;
  return b;
}

FidelityBudget fidelity_budget(const ProtocolConfig& cfg, std::size_t n_shots, Execution exec) {
  cfg.validate();
  if (n_shots < 10000) throw std::invalid_argument("fidelity_budget: need n_shots >= 1e4");
  const ShotCounts counts = deterministic_sum<ShotCounts>(
      n_shots,
      [&](std::size_t i) {
        ShotCounts c;
        const ShotResult excited = simulate_indexed_shot(true, cfg, i);
        if (excited.switch_bit == 0) {
          (excited.qubit_relaxed ? c.relaxed_miss : c.other_miss) += 1;
        }
        const ShotResult ground = simulate_indexed_shot(false, cfg, i);
        c.false_switch += static_cast<std::size_t>(ground.switch_bit);
        return c;
      },
      exec);
  const double n = static_cast<double>(n_shots);
  FidelityBudget b;
  b.n_shots = n_shots;
  b.eps_relax = static_cast<double>(counts.relaxed_miss) / n;
  b.eps_other = static_cast<double>(counts.other_miss) / n;
  b.eps_dark = static_cast<double>(counts.false_switch) / n;
  b.p_switch_excited = static_cast<double>(n_shots - counts.relaxed_miss - counts.other_miss) / n;
  b.p_switch_ground = b.eps_dark;
  b.f_raw = b.p_switch_excited - b.p_switch_ground;
  return b;
}

double through_channel(double p_excited, const ProtocolConfig& cfg) {
  const FidelityBudget b = analytic_budget(cfg);
  return b.p_switch_ground + b.f_raw * p_excited;
}

Grid ramsey_fringe(std::span<const double> detunings, std::span<const double> delays,
                   const ProtocolConfig& cfg, std::size_t shots_per_point, Execution exec) {
  if (cfg.t2 > 2.0 * cfg.t1) throw std::invalid_argument("ramsey_fringe: T2 must be <= 2 T1");
  require_probability(cfg.ramsey_amplitude, "ramsey_amplitude");
  for (double d : delays) {
    if (!(d >= 0.0)) throw std::invalid_argument("ramsey_fringe: delays must be >= 0");
  }
  return sweep(detunings, delays, cfg, shots_per_point, exec, &ramsey_ideal);
}

Grid rabi_chevron(std::span<const double> detunings, std::span<const double> durations,
                  const ProtocolConfig& cfg, std::size_t shots_per_point, Execution exec) {
  for (double d : durations) {
    if (!(d >= 0.0)) throw std::invalid_argument("rabi_chevron: durations must be >= 0");
  }
  return sweep(detunings, durations, cfg, shots_per_point, exec, &rabi_ideal);
}

std::vector<StarkPoint> stark_calibration(std::span<const double> drive_powers,
                                          const ProtocolConfig& cfg) {
  if (cfg.stark_shift_per_photon == 0.0) throw std::invalid_argument("stark_calibration: chi == 0");
  if (drive_powers.empty()) throw std::invalid_argument("stark_calibration: empty power list");
  std::vector<StarkPoint> out;
  out.reserve(drive_powers.size());
  for (double p : drive_powers) {
    if (!(p >= 0.0)) throw std::invalid_argument("stark_calibration: powers must be >= 0");
    const double n_bar = cfg.photons_per_unit_power * p;
    out.push_back({p, n_bar, cfg.stark_shift_per_photon * n_bar});
  }
  return out;
}

double photons_from_shift(double qubit_shift, const ProtocolConfig& cfg) {
  if (cfg.stark_shift_per_photon == 0.0) throw std::invalid_argument("photons_from_shift: chi == 0");
  return qubit_shift / cfg.stark_shift_per_photon;
}

double photons_per_power(double max_power, double n_bar_at_max) {
  require_positive(max_power, "max_power");
  return n_bar_at_max / max_power;
}

double capture_cavity_photons(double n_bar_qubit_cavity, double transfer_efficiency) {
  return n_bar_qubit_cavity * transfer_efficiency;
}

double bright_detect_probability(double mean_capture_photons, int threshold_photons) {
  if (mean_capture_photons < 0.0 || threshold_photons < 0) {
    throw std::invalid_argument("bright_detect_probability: negative argument");
  }
  double term = std::exp(-mean_capture_photons);
  double below = 0.0;
  for (int k = 0; k < threshold_photons; ++k) {
    below += term;
    term *= mean_capture_photons / static_cast<double>(k + 1);
  }
  return std::clamp(1.0 - below, 0.0, 1.0);
}

DepletionCalibration calibrate_depletion(double n0, double t_threshold, double residual_fraction,
                                         double target_contrast) {
  require_positive(n0, "depletion photons");
  require_positive(t_threshold, "t_threshold");
  if (!(residual_fraction > 0.0 && residual_fraction < 1.0) ||
      !(target_contrast > 0.0 && target_contrast < 1.0)) {
    throw std::invalid_argument("calibrate_depletion: fractions must lie in (0, 1)");
  }
  DepletionCalibration cal;
  cal.rate = -std::log(residual_fraction) / t_threshold;
  const double n_at = n0 * std::exp(-cal.rate * t_threshold);
  cal.dephasing_per_photon = -std::log(target_contrast) / n_at;
  // Rounding must not leave the contrast a hair under the target.
  while (std::exp(-cal.dephasing_per_photon * n_at) < target_contrast) {
    cal.dephasing_per_photon = std::nextafter(cal.dephasing_per_photon, 0.0);
  }
  return cal;
}

DepletionResult depletion_recovery(double t_dep, const ProtocolConfig& cfg) {
  if (!(t_dep >= 0.0)) throw std::invalid_argument("depletion_recovery: t_dep must be >= 0");
  double rate = cfg.depletion_rate;
  double c = cfg.dephasing_per_photon;
  if (rate == 0.0 || c == 0.0) {
    const DepletionCalibration cal = calibrate_depletion(cfg.depletion_photons);
    if (rate == 0.0) rate = cal.rate;
    if (c == 0.0) c = cal.dephasing_per_photon;
  }
  DepletionResult r;
  r.residual_photons = cfg.depletion_photons * std::exp(-rate * t_dep);
  r.ramsey_contrast = std::exp(-c * r.residual_photons);
  r.frequency_shift = cfg.stark_shift_per_photon * r.residual_photons;
  return r;
}

double separation_fidelity(const IqModel& model) {
  model.validate();
  const double d = model.separation();
  if (d == 0.0) throw DomainError("separation_fidelity: centroids coincide");
  return 1.0 - 0.5 * std::erfc(d / (2.0 * std::sqrt(2.0) * model.shot_sigma()));
}

IqDiscrimination iq_discriminate(const IqModel& model, std::span<const ShotResult> shots,
                                 std::uint64_t seed, Execution exec) {
  model.validate();
  if (model.separation() == 0.0) throw DomainError("iq_discriminate: centroids coincide");

  const std::vector<IqPoint> points = parallel_map<IqPoint>(
      shots.size(),
      [&](std::size_t i) {
        SplitMix64 rng = substream(seed, Stream::iq_readout, i);
        const IqPoint& center = shots[i].switch_bit ? model.centroid1 : model.centroid0;
        double si = 0.0;
        double sq = 0.0;
        for (int s = 0; s < model.n_samples; ++s) {
          const auto [a, b] = rng.normal_pair();
          si += a;
          sq += b;
        }
        const double scale = model.sigma / static_cast<double>(model.n_samples);
        return IqPoint{center[0] + scale * si, center[1] + scale * sq};
      },
      exec);

  IqDiscrimination out;
  IqPoint mean0{0.0, 0.0};
  IqPoint mean1{0.0, 0.0};
  for (std::size_t i = 0; i < shots.size(); ++i) {
    IqPoint& m = shots[i].switch_bit ? mean1 : mean0;
    m[0] += points[i][0];
    m[1] += points[i][1];
    (shots[i].switch_bit ? out.n1 : out.n0) += 1;
  }
  if (out.n0 == 0 || out.n1 == 0) {
    throw DomainError("iq_discriminate: need shots of both switch outcomes");
  }
  for (int k = 0; k < 2; ++k) {
    mean0[k] /= static_cast<double>(out.n0);
    mean1[k] /= static_cast<double>(out.n1);
  }
  const double dx = mean1[0] - mean0[0];
  const double dy = mean1[1] - mean0[1];
  const double d = std::hypot(dx, dy);
  if (d == 0.0) throw DomainError("iq_discriminate: empirical centroids coincide");
  out.axis = {dx / d, dy / d};
  auto project = [&](const IqPoint& p) { return p[0] * out.axis[0] + p[1] * out.axis[1]; };
  out.threshold = 0.5 * (project(mean0) + project(mean1));

  std::size_t err0 = 0;
  std::size_t err1 = 0;
  for (std::size_t i = 0; i < shots.size(); ++i) {
    const int called = project(points[i]) > out.threshold ? 1 : 0;
    if (called != shots[i].switch_bit) (shots[i].switch_bit ? err1 : err0) += 1;
  }
  out.single_shot_fidelity = 1.0 - 0.5 * (static_cast<double>(err0) / static_cast<double>(out.n0) +
                                          static_cast<double>(err1) / static_cast<double>(out.n1));
  out.separation_fidelity = separation_fidelity(model);
  return out;
}

std::vector<ShotResult> labelled_shots(std::size_t n_per_class) {
  std::vector<ShotResult> shots(2 * n_per_class);
  for (std::size_t i = n_per_class; i < shots.size(); ++i) {
    shots[i].switch_bit = 1;
    shots[i].cause = SwitchCause::bright_capture;
  }
  return shots;
}

}  // namespace jpmsim::protocol
