#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "jpmsim/common.hpp"

namespace jpmsim::potential {

/// Circuit constants of the flux-biased rf-SQUID detector, SI units.
struct JpmParams {
  double critical_current = 1e-6;     // A
  double loop_inductance = 1.1e-9;    // H
  double shunt_capacitance = 2e-12;   // F
  std::optional<double> mutual_inductance;  // H, flux-line coupling (informational)

  /// Throws std::invalid_argument unless every constant is finite and > 0.
  void validate() const;

  double josephson_energy() const;  // E_J = I0 Phi0 / 2pi
};

/// External flux threading the loop, stored in webers.
struct FluxBias {
  double webers = 0.0;

  static FluxBias from_quanta(double phi0_units) { return {phi0_units * kFluxQuantum}; }
  double in_quanta() const { return webers / kFluxQuantum; }
  /// 2 pi Phi_ext / Phi0, the phase the inductive term pulls delta toward.
  double reduced_phase() const { return kTwoPi * webers / kFluxQuantum; }
};

enum class ExtremumKind { minimum, maximum };

struct Extremum {
  double phase = 0.0;  // rad
  ExtremumKind kind = ExtremumKind::minimum;
};

/// left/right for a double well, global for a sole well; middle only appears
/// for beta_L large enough to hold three or more minima.
enum class WellLabel { left, right, global, middle };

std::string_view to_string(WellLabel label);

/// Properties of one local minimum of U(delta).
struct WellReport {
  double minimum_phase = 0.0;           // rad
  std::optional<double> barrier_phase;  // rad; empty for a sole global well
  std::optional<double> barrier_height; // J; empty means unbounded (sole global well)
  double plasma_frequency = 0.0;        // rad/s
  std::optional<double> level_count;    // Delta U / hbar omega_p; empty when unbounded
  WellLabel label = WellLabel::global;

  bool bounded() const { return barrier_height.has_value(); }
};

/// U(delta) = -E_J cos delta + (Phi0/2pi)^2 (delta - 2pi Phi_ext/Phi0)^2 / 2 L_g, joules.
double potential_energy(double phase, FluxBias flux, const JpmParams& p);

/// d^2U/d delta^2 = E_J (cos delta + 1/beta_L), joules.
double potential_curvature(double phase, FluxBias flux, const JpmParams& p);

/// beta_L = 2 pi L_g I0 / Phi0.
double beta_L(const JpmParams& p);

/// sin delta - (2 pi Phi_ext/Phi0 - delta)/beta_L. Zero exactly at the extrema of U.
double current_residual(double phase, FluxBias flux, const JpmParams& p);

/// All extrema of U, ascending in phase. Minima and maxima alternate and the
/// list starts and ends with a minimum. Tangential (double) roots are not
/// reported; they are the bifurcation points returned by critical_fluxes.
/// Throws NumericalError if a bracketed root does not refine.
std::vector<Extremum> find_extrema(FluxBias flux, const JpmParams& p);

/// omega_p = (2 pi / Phi0) sqrt(U''(delta) / C_s); 0 where the curvature is not positive.
double plasma_frequency(double phase, FluxBias flux, const JpmParams& p);

/// One report per local minimum, ascending in phase.
std::vector<WellReport> well_reports(FluxBias flux, const JpmParams& p);

std::size_t count_minima(FluxBias flux, const JpmParams& p);

/// Fluxes in [0, Phi0] where the number of minima changes (tangency of the
/// load line with sin delta). Empty for beta_L <= 1. Ascending.
std::vector<FluxBias> critical_fluxes(const JpmParams& p);

/// omega_p(right) - omega_p(left) in rad/s when two wells exist, else empty.
/// Used to pick an interrogation bias where the two states ring differently.
std::optional<double> plasma_frequency_splitting(FluxBias flux, const JpmParams& p);

/// Well reports for many fluxes; index i of the result belongs to fluxes[i].
std::vector<std::vector<WellReport>> sweep_wells(std::span<const FluxBias> fluxes,
                                                 const JpmParams& p,
                                                 Execution exec = Execution::parallel);

}  // namespace jpmsim::potential
