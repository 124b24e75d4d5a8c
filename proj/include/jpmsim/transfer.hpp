#pragma once

#include <cstddef>

#include "jpmsim/common.hpp"

namespace jpmsim::transfer {

/// A single-pole cavity mode coupled to the shared transmission line.
struct CavityMode {
  double angular_frequency = 0.0;  // rad/s
  double decay_rate = 0.0;         // 1/s, energy decay into the line

  static CavityMode from_frequency(double hertz, double decay_time) {
    return {kTwoPi * hertz, 1.0 / decay_time};
  }
};

/// Qubit cavity (source, mode 1) emitting into a line that drives the
/// capture cavity (target, mode 2).
struct TransferConfig {
  CavityMode source;
  CavityMode target;
  double line_impedance = 50.0;   // ohm
  double drive_amplitude = 1.0;   // V; efficiencies do not depend on it

  double delta_kappa() const { return target.decay_rate - source.decay_rate; }
  double delta_omega() const { return target.angular_frequency - source.angular_frequency; }

  /// Throws std::invalid_argument on non-positive rates, frequencies or impedance.
  void validate() const;

  /// 5.020 GHz / 260 ns qubit cavity into a 5.028 GHz / 40 ns capture cavity over 50 ohm.
  static TransferConfig device_defaults();
};

/// Total energy carried away by the decaying source field, V0^2 / (2 kappa1 Z0).
double emitted_energy(const TransferConfig& cfg);

/// Fraction of the emitted energy stored in the target at time t, equal modes:
/// (kappa t)^2 exp(-kappa t). Peaks at 4/e^2 for t = 2/kappa.
double efficiency_matched(double t, double kappa);

/// Equal frequencies, unequal decay rates:
/// 4 k1 k2 exp(-k2 t) (exp(dk t/2) - 1)^2 / dk^2, dk = k2 - k1.
double efficiency_kappa_mismatch(double t, double kappa1, double kappa2);

/// Equal decay rates, detuned by delta_omega:
/// 2 k^2 exp(-k t) (1 - cos(dw t)) / dw^2.
double efficiency_freq_mismatch(double t, double kappa, double delta_omega);

/// Rotating-wave result for simultaneous decay-rate and frequency mismatch:
/// k1 k2 exp(-k2 t) |exp(z t) - 1|^2 / |z|^2, z = dk/2 + i dw.
/// Reduces to the three forms above in their limits.
double efficiency_rotating_wave(double t, const TransferConfig& cfg);

struct PeakEfficiency {
  double efficiency = 0.0;
  double time = 0.0;  // s
};

/// Stationary point of efficiency_kappa_mismatch: exp(dk t/2) = k2/k1.
/// Gives t = 2 ln(k2/k1)/dk and efficiency 4 r^{-(r+1)/(r-1)}, r = k2/k1.
PeakEfficiency kappa_mismatch_peak(double kappa1, double kappa2);

/// Maximum over t in (0, 20/min(k1, k2)] of efficiency_rotating_wave.
/// Coarse scan then golden-section refinement, so detuned (oscillating)
/// curves land on the highest lobe.
PeakEfficiency peak_efficiency_closed_form(const TransferConfig& cfg);

struct QuadratureOptions {
  /// Simpson nodes per period of the faster carrier. Values below 40 are rejected.
  int points_per_period = 40;
  /// Refuse integrations longer than this many nodes.
  std::size_t max_nodes = std::size_t{1} << 31;
  Execution execution = Execution::parallel;
};

struct Mode2Energy {
  double energy = 0.0;      // J
  double efficiency = 0.0;  // energy / emitted_energy; 0 for zero drive
};

/// Energy stored in the target cavity at time t, by direct quadrature of the
/// real-valued convolution of the source waveform V0 e^{-k1 t/2} cos(w1 t)
/// with the target's impulse response e^{-k2 t/2} cos(w2 t).
///
/// The in-phase and quadrature components of the response give the stored
/// energy without a rotating-wave step; the result is averaged over one
/// carrier period centred on t to remove the counter-rotating ripple.
/// Throws std::invalid_argument for t < 0 or too few points per period and
/// NumericalError when the node count would exceed max_nodes.
Mode2Energy mode2_energy_numeric(double t, const TransferConfig& cfg,
                                 const QuadratureOptions& options = {});

/// Maximum of mode2_energy_numeric(t).efficiency over t, golden-section
/// search seeded at the closed-form optimum.
PeakEfficiency peak_efficiency(const TransferConfig& cfg, const QuadratureOptions& options = {});

}  // namespace jpmsim::transfer
