#include "jpmsim/transfer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "jpmsim/golden_section.hpp"
#include "jpmsim/parallel.hpp"

namespace jpmsim::transfer {

namespace {

constexpr double kSeriesThreshold = 1e-6;

void check_time(double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw std::invalid_argument("transfer: t must be >= 0");
}

void check_rate(double k, const char* what) {
  if (!(k > 0.0) || !std::isfinite(k)) {
    throw std::invalid_argument(std::string("transfer: ") + what + " must be > 0");
  }
}

/// expm1(x)/x, second-order series near 0.
double expm1_ratio(double x) {
  if (std::abs(x) < kSeriesThreshold) return 1.0 + x / 2.0 + x * x / 6.0;
  return std::expm1(x) / x;
}

/// sin(x)/x, second-order series near 0.
double sinc(double x) {
  if (std::abs(x) < kSeriesThreshold) return 1.0 - x * x / 6.0;
  return std::sin(x) / x;
}

struct Pair {
  double c = 0.0;
  double s = 0.0;
  Pair& operator+=(const Pair& o) {
    c += o.c;
    s += o.s;
    return *this;
  }
};

}  // namespace

void TransferConfig::validate() const {
  check_rate(source.angular_frequency, "source frequency");
  check_rate(target.angular_frequency, "target frequency");
  check_rate(source.decay_rate, "source decay rate");
  check_rate(target.decay_rate, "target decay rate");
  check_rate(line_impedance, "line impedance");
  if (!std::isfinite(drive_amplitude)) throw std::invalid_argument("transfer: drive amplitude");
}

TransferConfig TransferConfig::device_defaults() {
  TransferConfig cfg;
  cfg.source = CavityMode::from_frequency(5.020e9, 260e-9);
  cfg.target = CavityMode::from_frequency(5.028e9, 40e-9);
  return cfg;
}

double emitted_energy(const TransferConfig& cfg) {
  cfg.validate();
  return cfg.drive_amplitude * cfg.drive_amplitude / (2.0 * cfg.source.decay_rate * cfg.line_impedance);
}

double efficiency_matched(double t, double kappa) {
  check_time(t);
  check_rate(kappa, "kappa");
  const double x = kappa * t;
  return x * x * std::exp(-x);
}

double efficiency_kappa_mismatch(double t, double kappa1, double kappa2) {
  check_time(t);
  check_rate(kappa1, "kappa1");
  check_rate(kappa2, "kappa2");
  // 4 k1 k2 e^{-k2 t} (expm1(x)/dk)^2 with x = dk t/2 is k1 k2 t^2 e^{-k2 t} (expm1(x)/x)^2.
  const double ratio = expm1_ratio((kappa2 - kappa1) * t / 2.0);
  return kappa1 * kappa2 * t * t * std::exp(-kappa2 * t) * ratio * ratio;
}

double efficiency_freq_mismatch(double t, double kappa, double delta_omega) {
  check_time(t);
  check_rate(kappa, "kappa");
  // 1 - cos(y) = 2 sin^2(y/2), y = dw t.
  const double s = sinc(delta_omega * t / 2.0);
  return kappa * kappa * t * t * std::exp(-kappa * t) * s * s;
}

double efficiency_rotating_wave(double t, const TransferConfig& cfg) {
  check_time(t);
  cfg.validate();
  const double k1 = cfg.source.decay_rate;
  const double k2 = cfg.target.decay_rate;
  const double x = cfg.delta_kappa() * t / 2.0;
  const double y = cfg.delta_omega() * t;
  // |e^{zt} - 1|^2 / (|z| t)^2 = (E^2 x^2 + e^x S^2 y^2) / (x^2 + y^2),
  // E = expm1(x)/x, S = sin(y/2)/(y/2); the ratio tends to 1 at x = y = 0.
  const double e = expm1_ratio(x);
  const double s = sinc(y / 2.0);
  const double den = x * x + y * y;
  double ratio = 1.0;
  if (den > 0.0) {
    ratio = (e * e * x * x + std::exp(x) * s * s * y * y) / den;
  }
  return k1 * k2 * t * t * std::exp(-k2 * t) * ratio;
}

PeakEfficiency kappa_mismatch_peak(double kappa1, double kappa2) {
  check_rate(kappa1, "kappa1");
  check_rate(kappa2, "kappa2");
  const double r = kappa2 / kappa1;
  if (std::abs(r - 1.0) < kSeriesThreshold) {
    return {4.0 * std::exp(-2.0), 2.0 / kappa1};
  }
  const double t = 2.0 * std::log(r) / (kappa2 - kappa1);
  return {4.0 * std::pow(r, -(r + 1.0) / (r - 1.0)), t};
}

PeakEfficiency peak_efficiency_closed_form(const TransferConfig& cfg) {
  cfg.validate();
  const double t_max = 20.0 / std::min(cfg.source.decay_rate, cfg.target.decay_rate);
  auto f = [&](double t) { return efficiency_rotating_wave(t, cfg); };
  // Scan step resolves both the decay envelope and the detuning beat.
  const double dw = std::abs(cfg.delta_omega());
  const double k_max = std::max(cfg.source.decay_rate, cfg.target.decay_rate);
  const double fastest = std::max(k_max, dw);
  const auto n = static_cast<std::size_t>(
      std::clamp(std::ceil(t_max * fastest * 20.0), 2000.0, 2.0e6));
  const double h = t_max / static_cast<double>(n);
  std::size_t best = 1;
  double best_value = f(h);
  for (std::size_t i = 2; i <= n; ++i) {
    const double v = f(h * static_cast<double>(i));
    if (v > best_value) {
      best_value = v;
      best = i;
    }
  }
  const double lo = h * static_cast<double>(best - 1);
  const double hi = std::min(t_max, h * static_cast<double>(best + 1));
  const auto opt = golden_section_maximize(f, std::max(lo, 1e-3 * h), hi, 0.0, 1e-13);
  return {opt.value, opt.x};
}

Mode2Energy mode2_energy_numeric(double t, const TransferConfig& cfg,
                                 const QuadratureOptions& options) {
  check_time(t);
  cfg.validate();
  if (options.points_per_period < 40) {
    throw std::invalid_argument("mode2_energy_numeric: need >= 40 points per carrier period, got " +
                                std::to_string(options.points_per_period));
  }
  Mode2Energy out;
  if (cfg.drive_amplitude == 0.0) return out;

  const double w1 = cfg.source.angular_frequency;
  const double w2 = cfg.target.angular_frequency;
  const double k1 = cfg.source.decay_rate;
  const double k2 = cfg.target.decay_rate;
  const double dk = cfg.delta_kappa();

  const double h_max = kTwoPi / std::max(w1, w2) / options.points_per_period;
  const double period = kTwoPi / (0.5 * (w1 + w2));
  const double a = std::max(0.0, t - period / 2.0);

  auto even_steps = [&](double length) {
    const double raw = std::ceil(length / h_max);
    if (raw > static_cast<double>(options.max_nodes)) {
      throw NumericalError("mode2_energy_numeric: quadrature needs more than max_nodes nodes");
    }
    auto n = static_cast<std::size_t>(raw);
    return n + (n % 2);
  };

  // Integrands are scaled by e^{-dk t/2} so that large dk t cannot overflow;
  // the scale is restored in the energy prefactor below.
  auto integrand = [&](double tau) {
    const double drive = std::exp(dk * (tau - t) / 2.0) * std::cos(w1 * tau);
    return Pair{drive * std::cos(w2 * tau), drive * std::sin(w2 * tau)};
  };

  // Composite Simpson over [0, a].
  Pair head;
  if (a > 0.0) {
    const std::size_t n1 = std::max<std::size_t>(2, even_steps(a));
    const double h1 = a / static_cast<double>(n1);
    head = deterministic_sum<Pair>(
        n1 + 1,
        [&](std::size_t k) {
          const double w = (k == 0 || k == n1) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
          Pair g = integrand(h1 * static_cast<double>(k));
          return Pair{w * g.c, w * g.s};
        },
        options.execution);
    head.c *= h1 / 3.0;
    head.s *= h1 / 3.0;
  }

  // Cumulative Simpson through one carrier period, sampling the energy at even nodes.
  const std::size_t n2 = std::max<std::size_t>(2, even_steps(period));
  const double h2 = period / static_cast<double>(n2);
  std::vector<Pair> g(n2 + 1);
  for (std::size_t j = 0; j <= n2; ++j) g[j] = integrand(a + h2 * static_cast<double>(j));

  const double prefactor = 2.0 * cfg.drive_amplitude * cfg.drive_amplitude * k2 / cfg.line_impedance;
  auto energy_at = [&](double s, const Pair& integral) {
    return prefactor * std::exp(-k2 * s + dk * t) * (integral.c * integral.c + integral.s * integral.s);
  };

  Pair running = head;
  double sum = 0.5 * energy_at(a, running);
  const std::size_t m = n2 / 2;
  for (std::size_t j = 1; j <= m; ++j) {
    const Pair& g0 = g[2 * j - 2];
    const Pair& g1 = g[2 * j - 1];
    const Pair& g2 = g[2 * j];
    running.c += h2 / 3.0 * (g0.c + 4.0 * g1.c + g2.c);
    running.s += h2 / 3.0 * (g0.s + 4.0 * g1.s + g2.s);
    const double e = energy_at(a + 2.0 * h2 * static_cast<double>(j), running);
    sum += (j == m) ? 0.5 * e : e;
  }
  out.energy = sum / static_cast<double>(m);
  out.efficiency = out.energy / (cfg.drive_amplitude * cfg.drive_amplitude / (2.0 * k1 * cfg.line_impedance));
  return out;
}

PeakEfficiency peak_efficiency(const TransferConfig& cfg, const QuadratureOptions& options) {
  const PeakEfficiency seed = peak_efficiency_closed_form(cfg);
  const double t_max = 20.0 / std::min(cfg.source.decay_rate, cfg.target.decay_rate);
  double half_width = 0.3 * seed.time;
  const double dw = std::abs(cfg.delta_omega());
  if (dw > 0.0) half_width = std::min(half_width, 0.5 * kPi / dw);
  const double lo = std::max(seed.time - half_width, 1e-6 * seed.time);
  const double hi = std::min(seed.time + half_width, t_max);
  auto f = [&](double t) { return mode2_energy_numeric(t, cfg, options).efficiency; };
  const auto opt = golden_section_maximize(f, lo, hi, 0.0, 1e-9);
  return {opt.value, opt.x};
}

}  // namespace jpmsim::transfer
