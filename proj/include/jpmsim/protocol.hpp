#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "jpmsim/common.hpp"
#include "jpmsim/rng.hpp"

namespace jpmsim::protocol {

enum class Window { hamming, rectangular };

std::string_view to_string(Window w);

using IqPoint = std::array<double, 2>;

/// Gaussian readout of the detector's two flux states in the IQ plane.
/// sigma is the per-axis spread of one sample; a shot averages n_samples.
struct IqModel {
  IqPoint centroid0{0.0, 0.0};
  IqPoint centroid1{7.07, 0.0};
  double sigma = 1.0;
  int n_samples = 1;

  void validate() const;
  double separation() const;
  /// Spread of the shot-averaged point, sigma / sqrt(n_samples).
  double shot_sigma() const { return sigma / std::sqrt(static_cast<double>(n_samples)); }
};

/// Parameters of the measurement cycle and the phenomenological detector.
/// Defaults reproduce the reported device.
struct ProtocolConfig {
  double t_prep = 780e-9;                  // s, pointer preparation pulse
  Window window = Window::hamming;
  double t1 = 6.6e-6;                      // s
  /// Pins the relaxation probability; empty uses relaxation_error(t_prep, t1).
  std::optional<double> relaxation_override = 0.05;
  double dark_prob = 0.02;                 // false switch per shot
  double bright_detect_prob = 0.99;        // switch given a surviving bright pointer
  double stark_shift_per_photon = kTwoPi * -12.3e6;  // 2 chi, rad/s
  double n_bar_qubit_cavity = 10.0;
  double photons_per_unit_power = 10.0;    // n_bar per unit drive power (calibrated)
  double depletion_rate = 0.0;             // 1/s; 0 selects the default calibration
  double depletion_photons = 100.0;        // spurious photons right after a switch
  double dephasing_per_photon = 0.0;       // contrast = exp(-c n); 0 selects the default
  double depletion_time = 40e-9;           // s
  double cycle_time = 2.8e-6;              // s
  double t2 = 5e-6;                        // s, Ramsey envelope
  double rabi_rate = kTwoPi * 10e6;        // rad/s
  double ramsey_amplitude = 1.0;
  double ramsey_phase = 0.0;               // rad
  IqModel iq;
  std::uint64_t rng_seed = 20180711;

  /// Throws std::invalid_argument when a probability leaves [0, 1], a time is
  /// not positive, or cycle_time < t_prep.
  void validate() const;

  double relaxation_probability() const;
};

enum class SwitchCause { none, bright_capture, dark_count };

std::string_view to_string(SwitchCause c);

struct ShotResult {
  int switch_bit = 0;
  SwitchCause cause = SwitchCause::none;
  bool qubit_relaxed = false;
  IqPoint iq_point{0.0, 0.0};
};

struct Envelope {
  double dt = 0.0;                 // s between samples
  std::vector<double> amplitude;   // peak-normalized
};

/// w[k] = 0.54 - 0.46 cos(2 pi k/(n-1)), scaled so the largest sample is 1.
/// Requires n >= 2.
Envelope hamming_envelope(double duration, std::size_t n);
Envelope rectangular_envelope(double duration, std::size_t n);
Envelope drive_envelope(const ProtocolConfig& cfg, std::size_t n);

/// |W(detuning)|^2 / |W(0)|^2 for the sampled envelope, detuning in rad/s.
/// For the dark-pointer offset this is the drive power leaking into the dark state.
double spectral_leakage(const Envelope& env, double detuning);

/// Probability that the qubit decays during the preparation window, averaged
/// over the window: 1 - (T1/t)(1 - e^{-t/T1}).
double relaxation_error(double t_prep, double t1);

/// One measurement cycle. Draw order on `rng`: relaxation, capture, dark
/// count, then n_samples Box-Muller pairs for the IQ point (2 n_samples
/// normals). All draws are consumed whatever the outcome.
ShotResult simulate_shot(bool qubit_excited, const ProtocolConfig& cfg, SplitMix64& rng);

/// Shot i of the excited (ground) preparation uses substream
/// (rng_seed, excited_shot (ground_shot), i).
ShotResult simulate_indexed_shot(bool qubit_excited, const ProtocolConfig& cfg, std::uint64_t index);

struct FidelityBudget {
  double f_raw = 0.0;
  double eps_relax = 0.0;   // excited shots missed after relaxation
  double eps_dark = 0.0;    // ground shots that switched
  double eps_other = 0.0;   // excited shots missed without relaxation
  double p_switch_excited = 0.0;
  double p_switch_ground = 0.0;
  std::size_t n_shots = 0;  // per preparation
};

/// Closed-form counterpart of fidelity_budget.
FidelityBudget analytic_budget(const ProtocolConfig& cfg);

/// n_shots excited and n_shots ground cycles. f_raw + all eps == 1 exactly
/// (each miss is attributed to one cause). Requires n_shots >= 1e4.
FidelityBudget fidelity_budget(const ProtocolConfig& cfg, std::size_t n_shots,
                               Execution exec = Execution::parallel);

/// Rows follow the first axis argument, columns the second.
struct Grid {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;  // row-major
  double at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
};

/// P_meas = eps_dark + F * P_ideal with P_ideal the excited probability and
/// F = P(switch | excited) - P(switch | ground). With shots_per_point > 0 the
/// cell is a Monte Carlo estimate drawn through simulate_shot instead.
double through_channel(double p_excited, const ProtocolConfig& cfg);

/// P_ideal = A e^{-tau/T2} cos^2(delta tau / 2 + phi0). Requires T2 <= 2 T1.
Grid ramsey_fringe(std::span<const double> detunings, std::span<const double> delays,
                   const ProtocolConfig& cfg, std::size_t shots_per_point = 0,
                   Execution exec = Execution::parallel);

/// P_ideal = Omega^2/(Omega^2 + delta^2) sin^2(sqrt(Omega^2 + delta^2) t / 2).
Grid rabi_chevron(std::span<const double> detunings, std::span<const double> durations,
                  const ProtocolConfig& cfg, std::size_t shots_per_point = 0,
                  Execution exec = Execution::parallel);

struct StarkPoint {
  double power = 0.0;
  double n_bar = 0.0;
  double qubit_shift = 0.0;  // rad/s
};

/// Linear ac-Stark model: n_bar = photons_per_unit_power * P, shift = 2 chi n_bar.
std::vector<StarkPoint> stark_calibration(std::span<const double> drive_powers,
                                          const ProtocolConfig& cfg);

/// Inverse of the Stark map.
double photons_from_shift(double qubit_shift, const ProtocolConfig& cfg);

/// Calibration constant that puts n_bar_at_max photons at max_power.
double photons_per_power(double max_power, double n_bar_at_max);

/// Expected capture-cavity occupation after transfer, n_bar * efficiency.
double capture_cavity_photons(double n_bar_qubit_cavity, double transfer_efficiency);

/// P(N >= threshold) for Poisson N with the given mean. Links the bright
/// detection probability to the transferred photon number.
double bright_detect_probability(double mean_capture_photons, int threshold_photons);

struct DepletionCalibration {
  double rate = 0.0;                  // 1/s
  double dephasing_per_photon = 0.0;  // c in exp(-c n)
};

/// Chooses the decay rate so n(t_threshold)/n0 = residual_fraction, then c so
/// that the Ramsey contrast at t_threshold equals target_contrast.
DepletionCalibration calibrate_depletion(double n0, double t_threshold = 40e-9,
                                         double residual_fraction = 0.05,
                                         double target_contrast = 0.95);

struct DepletionResult {
  double residual_photons = 0.0;
  double ramsey_contrast = 0.0;
  double frequency_shift = 0.0;  // rad/s
};

/// n(t) = n0 e^{-kappa_dep t}, contrast = e^{-c n}, shift = 2 chi n.
DepletionResult depletion_recovery(double t_dep, const ProtocolConfig& cfg);

struct IqDiscrimination {
  double single_shot_fidelity = 0.0;
  double separation_fidelity = 0.0;
  double threshold = 0.0;   // along the unit axis from centroid 0 to centroid 1
  IqPoint axis{1.0, 0.0};
  std::size_t n0 = 0;
  std::size_t n1 = 0;
};

/// 1 - erfc(d / (2 sqrt2 sigma_shot)) / 2 for the model's centroid distance d.
/// Throws DomainError when the centroids coincide.
double separation_fidelity(const IqModel& model);

/// Draws one averaged IQ point per shot (substream (seed, iq_readout, i)),
/// projects onto the line through the empirical class means, thresholds at
/// the midpoint and scores against each shot's switch bit.
IqDiscrimination iq_discriminate(const IqModel& model, std::span<const ShotResult> shots,
                                 std::uint64_t seed, Execution exec = Execution::parallel);

/// Shots with known bits for readout studies: n per class, bit 0 then bit 1.
std::vector<ShotResult> labelled_shots(std::size_t n_per_class);

}  // namespace jpmsim::protocol
