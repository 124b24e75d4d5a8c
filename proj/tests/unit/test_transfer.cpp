#include "jpmsim/transfer.hpp"

#include <gtest/gtest.h>
#include <omp.h>

#include <cmath>
#include <random>

#include "oracles.hpp"

using namespace jpmsim;
using namespace jpmsim::transfer;

namespace {

TransferConfig modes(double k1, double k2, double w1, double w2) {
  TransferConfig cfg;
  cfg.source = {w1, k1};
  cfg.target = {w2, k2};
  return cfg;
}

// Rotating-wave amplitude written out with std::complex, independent of the
// library's real-valued closed forms.
double complex_amplitude_efficiency(double t, double k1, double k2, double dw) {
  const std::complex<double> z(0.5 * (k2 - k1), dw);
  const auto num = std::abs(std::exp(z * t) - 1.0);
  const double mag = std::abs(z) == 0.0 ? t : num / std::abs(z);
  return k1 * k2 * std::exp(-k2 * t) * mag * mag;
}

}  // namespace

TEST(Transfer, emitted_energy_examples) {
  TransferConfig cfg = modes(1.0, 1.0, 10.0, 10.0);
  cfg.line_impedance = 1.0;
  EXPECT_DOUBLE_EQ(emitted_energy(cfg), 0.5);
  cfg.source.decay_rate = 2.0;
  EXPECT_DOUBLE_EQ(emitted_energy(cfg), 0.25);
  TransferConfig dev = TransferConfig::device_defaults();
  EXPECT_NEAR(emitted_energy(dev), 260e-9 / 100.0, 1e-20);
}

TEST(Transfer, matched_peak_is_four_over_e_squared) {
  const double kappa = 1.0 / 260e-9;
  EXPECT_NEAR(efficiency_matched(2.0 / kappa, kappa), 4.0 / std::exp(2.0), 1e-12);
  const auto g = oracle::two_level_grid_max([&](double t) { return efficiency_matched(t, kappa); },
                                            0.0, 20.0 / kappa);
  EXPECT_NEAR(g.value, 0.5413411329464508, 1e-9);
  EXPECT_NEAR(g.x * kappa, 2.0, 1e-4);
  EXPECT_NEAR(2.0 / kappa, 520e-9, 1e-15);
  EXPECT_EQ(efficiency_matched(0.0, kappa), 0.0);
}

TEST(Transfer, kappa_mismatch_peak_values) {
  const PeakEfficiency p10 = kappa_mismatch_peak(1.0, 10.0);
  EXPECT_NEAR(p10.efficiency, 4.0 * std::pow(10.0, -11.0 / 9.0), 1e-12);
  EXPECT_NEAR(p10.efficiency, 0.2397937, 1e-6);
  EXPECT_NEAR(p10.time, 2.0 * std::log(10.0) / 9.0, 1e-12);
  const PeakEfficiency p65 = kappa_mismatch_peak(1.0, 6.5);
  EXPECT_NEAR(p65.efficiency, 0.3115601, 1e-6);

  for (double r : {10.0, 6.5}) {
    const auto g = oracle::two_level_grid_max(
        [&](double t) { return complex_amplitude_efficiency(t, 1.0, r, 0.0); }, 0.0, 20.0);
    EXPECT_NEAR(kappa_mismatch_peak(1.0, r).efficiency, g.value, 1e-9);
  }
}

TEST(Transfer, kappa_mismatch_peak_is_symmetric_in_rates) {
  for (double r : {1.5, 3.0, 6.5, 10.0, 40.0}) {
    const auto a = oracle::two_level_grid_max(
        [&](double t) { return efficiency_kappa_mismatch(t, 1.0, r); }, 0.0, 30.0);
    const auto b = oracle::two_level_grid_max(
        [&](double t) { return efficiency_kappa_mismatch(t, r, 1.0); }, 0.0, 30.0);
    EXPECT_NEAR(a.value, b.value, 1e-9) << r;
    EXPECT_NEAR(kappa_mismatch_peak(1.0, r).efficiency, kappa_mismatch_peak(r, 1.0).efficiency,
                1e-12);
  }
}

TEST(Transfer, detuning_equal_to_kappa) {
  const double k = 1.0 / 40e-9;
  const TransferConfig cfg = modes(k, k, kTwoPi * 5e9, kTwoPi * 5e9 + k);
  const PeakEfficiency p = peak_efficiency_closed_form(cfg);
  EXPECT_NEAR(p.efficiency, 2.0 * std::exp(-M_PI / 2.0), 1e-6);
  EXPECT_NEAR(p.time * k, M_PI / 2.0, 1e-5);
}

TEST(Transfer, peak_decreases_with_detuning) {
  double last = 1.0;
  for (double ratio : {0.0, 0.5, 1.0, 2.0, 4.0}) {
    const double peak = peak_efficiency_closed_form(modes(1.0, 1.0, 100.0, 100.0 + ratio)).efficiency;
    EXPECT_LT(peak, last) << ratio;
    last = peak;
  }
}

TEST(Transfer, closed_forms_are_continuous_at_their_limits) {
  const double t = 1.3;
  EXPECT_NEAR(efficiency_kappa_mismatch(t, 1.0, 1.0 + 1e-9), efficiency_matched(t, 1.0), 1e-8);
  EXPECT_NEAR(efficiency_kappa_mismatch(t, 1.0, 1.0 + 1e-5), efficiency_matched(t, 1.0), 1e-4);
  EXPECT_NEAR(efficiency_freq_mismatch(t, 1.0, 1e-9), efficiency_matched(t, 1.0), 1e-8);
  EXPECT_NEAR(efficiency_freq_mismatch(t, 1.0, 1e-5), efficiency_matched(t, 1.0), 1e-8);
  EXPECT_EQ(efficiency_kappa_mismatch(t, 1.0, 1.0), efficiency_matched(t, 1.0));
  EXPECT_EQ(efficiency_freq_mismatch(t, 1.0, 0.0), efficiency_matched(t, 1.0));
}

TEST(Transfer, rotating_wave_reduces_to_special_cases) {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(0.1, 5.0);
  for (int k = 0; k < 200; ++k) {
    const double k1 = u(gen), k2 = u(gen), dw = u(gen) - 2.5, t = u(gen);
    EXPECT_NEAR(efficiency_rotating_wave(t, modes(k1, k1, 50.0, 50.0)), efficiency_matched(t, k1), 1e-12);
    EXPECT_NEAR(efficiency_rotating_wave(t, modes(k1, k2, 50.0, 50.0)),
                efficiency_kappa_mismatch(t, k1, k2), 1e-12);
    EXPECT_NEAR(efficiency_rotating_wave(t, modes(k1, k1, 50.0, 50.0 + dw)),
                efficiency_freq_mismatch(t, k1, dw), 1e-12);
    const double general = efficiency_rotating_wave(t, modes(k1, k2, 50.0, 50.0 + dw));
    EXPECT_NEAR(general, complex_amplitude_efficiency(t, k1, k2, dw), 1e-12);
    EXPECT_GE(general, 0.0);
    EXPECT_LE(general, 1.0);
  }
}

TEST(Transfer, numeric_zero_drive_is_zero) {
  TransferConfig cfg = modes(1.0, 1.0, 1000.0, 1000.0);
  cfg.drive_amplitude = 0.0;
  const Mode2Energy e = mode2_energy_numeric(2.0, cfg);
  EXPECT_EQ(e.energy, 0.0);
  EXPECT_EQ(e.efficiency, 0.0);
}

TEST(Transfer, numeric_matched_high_q) {
  const TransferConfig cfg = modes(1.0, 1.0, 1000.0, 1000.0);
  EXPECT_NEAR(mode2_energy_numeric(2.0, cfg).efficiency, 4.0 / std::exp(2.0), 1e-3);
  EXPECT_NEAR(mode2_energy_numeric(0.7, cfg).efficiency, efficiency_matched(0.7, 1.0), 1e-3);
}

TEST(Transfer, numeric_kappa_mismatch_pointwise) {
  const TransferConfig cfg = modes(1.0, 10.0, 1000.0, 1000.0);
  for (double t : {0.05, 0.2, 2.0 * std::log(10.0) / 9.0, 0.5, 1.0, 2.0}) {
    EXPECT_NEAR(mode2_energy_numeric(t, cfg).efficiency, efficiency_kappa_mismatch(t, 1.0, 10.0), 1e-3)
        << t;
  }
}

TEST(Transfer, numeric_grid_against_rotating_wave) {
  for (int i = 0; i < 10; ++i) {
    for (int j = 0; j < 10; ++j) {
      const double k2 = 0.5 + 0.5 * i;
      const double dw = -2.0 + 0.4 * j;
      const TransferConfig cfg = modes(1.0, k2, 1000.0, 1000.0 + dw);
      const double t = 0.3 + 0.25 * ((i + j) % 10);
      EXPECT_NEAR(mode2_energy_numeric(t, cfg).efficiency, efficiency_rotating_wave(t, cfg), 1e-3)
          << k2 << " " << dw << " " << t;
    }
  }
}

TEST(Transfer, numeric_rejects_coarse_sampling) {
  QuadratureOptions opt;
  opt.points_per_period = 39;
  EXPECT_THROW(mode2_energy_numeric(1.0, modes(1.0, 1.0, 100.0, 100.0), opt), std::invalid_argument);
  EXPECT_THROW(mode2_energy_numeric(-1.0, modes(1.0, 1.0, 100.0, 100.0)), std::invalid_argument);
  opt.points_per_period = 40;
  opt.max_nodes = 100;
  EXPECT_THROW(mode2_energy_numeric(10.0, modes(1.0, 1.0, 100.0, 100.0), opt), NumericalError);
}

TEST(Transfer, numeric_serial_matches_parallel) {
  const TransferConfig cfg = modes(1.0, 6.5, 500.0, 501.0);
  QuadratureOptions s, p;
  s.execution = Execution::serial;
  p.execution = Execution::parallel;
  const double serial = mode2_energy_numeric(0.6, cfg, s).efficiency;
  EXPECT_NEAR(mode2_energy_numeric(0.6, cfg, p).efficiency, serial, 1e-12 * serial);
}

TEST(Transfer, numeric_parallel_is_thread_count_independent) {
  const TransferConfig cfg = modes(1.0, 6.5, 500.0, 501.0);
  const int saved = omp_get_max_threads();
  omp_set_num_threads(1);
  const double one = mode2_energy_numeric(0.6, cfg).efficiency;
  omp_set_num_threads(4);
  const double four = mode2_energy_numeric(0.6, cfg).efficiency;
  omp_set_num_threads(saved);
  EXPECT_EQ(one, four);
}

TEST(Transfer, numeric_peak_search) {
  const TransferConfig cfg = modes(1.0, 6.5, 1000.0, 1000.0);
  const PeakEfficiency peak = peak_efficiency(cfg);
  const double tp = kappa_mismatch_peak(1.0, 6.5).time;
  double grid = 0.0;
  for (int k = -50; k <= 50; ++k) {
    grid = std::max(grid, mode2_energy_numeric(tp * (1.0 + 0.004 * k), cfg).efficiency);
  }
  EXPECT_GE(peak.efficiency, grid - 1e-6);
  EXPECT_NEAR(peak.efficiency, kappa_mismatch_peak(1.0, 6.5).efficiency, 1e-4);
}

TEST(Transfer, device_defaults_are_valid) {
  const TransferConfig cfg = TransferConfig::device_defaults();
  EXPECT_NO_THROW(cfg.validate());
  EXPECT_NEAR(cfg.delta_omega() / kTwoPi, 8e6, 1.0);
  EXPECT_NEAR(cfg.target.decay_rate / cfg.source.decay_rate, 6.5, 1e-12);
  TransferConfig bad = cfg;
  bad.line_impedance = 0.0;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
}
