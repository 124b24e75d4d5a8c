#pragma once

#include <array>
#include <complex>
#include <cstdint>
#include <optional>
#include <vector>

#include "jpmsim/common.hpp"

namespace jpmsim::tomography {

/// Single-qubit density matrix [[1 - beta, r e^{i phi}], [r e^{-i phi}, beta]].
struct DensityMatrix2 {
  double beta = 0.0;  // excited population
  double r = 0.0;     // |rho_01|
  double phi = 0.0;   // arg rho_01, rad

  /// Throws std::invalid_argument unless 0 <= beta <= 1, r >= 0 and r^2 <= beta (1 - beta).
  void validate() const;
  bool is_physical(double tolerance = 0.0) const;

  std::complex<double> rho00() const { return {1.0 - beta, 0.0}; }
  std::complex<double> rho01() const { return std::polar(r, phi); }
  std::complex<double> rho10() const { return std::conj(rho01()); }
  std::complex<double> rho11() const { return {beta, 0.0}; }

  /// Bloch vector (2 Re rho01, -2 Im rho01, 1 - 2 beta).
  std::array<double, 3> bloch() const;

  static DensityMatrix2 from_elements(double rho00, std::complex<double> rho01);
};

/// Excited-state occupation after rotating rho by angle pi t/t_pi about the
/// equatorial axis at azimuth theta:
///   P = beta + (1 - 2 beta)/2 (1 - cos a) - r sin a sin(phi + theta),  a = pi t / t_pi.
/// Requires t_pi > 0.
double expected_occupation(const DensityMatrix2& rho, double theta, double t, double t_pi);

/// Occupations on an (axis angle x pulse duration) grid, row-major by angle.
struct TomogramGrid {
  std::vector<double> angles;     // rad
  std::vector<double> durations;  // s
  std::vector<double> occupation;
  std::vector<long> shots;        // per cell; empty when not counted

  double at(std::size_t angle_index, std::size_t duration_index) const {
    return occupation[angle_index * durations.size() + duration_index];
  }
  /// Throws std::invalid_argument on size mismatch or occupations outside [0, 1].
  void validate() const;
};

struct NoiseModel {
  enum class Kind { none, binomial, gaussian };
  Kind kind = Kind::none;
  long shots = 0;      // binomial trials per cell
  double sigma = 0.0;  // additive noise, result clipped to [0, 1]

  static NoiseModel noiseless() { return {}; }
  static NoiseModel binomial(long n) { return {Kind::binomial, n, 0.0}; }
  static NoiseModel gaussian(double s) { return {Kind::gaussian, 0, s}; }
};

/// Cell (i, j) draws from substream (seed, tomogram_cell, i * n_durations + j).
TomogramGrid synthesize_tomogram(const DensityMatrix2& rho, double t_pi,
                                 const std::vector<double>& angles,
                                 const std::vector<double>& durations, const NoiseModel& noise,
                                 std::uint64_t seed);

struct FitGuess {
  DensityMatrix2 rho;
  double t_pi = 0.0;
};

struct FitResult {
  DensityMatrix2 rho;      // physical (projected if needed)
  DensityMatrix2 raw_rho;  // unconstrained optimum
  double t_pi = 0.0;       // s
  double residual_rms = 0.0;
  /// Curvature-based covariance of (beta, Re rho01, Im rho01, t_pi).
  std::array<std::array<double, 4>, 4> covariance{};
  bool projected = false;
  bool phase_unidentifiable = false;
  int iterations = 0;
};

/// Four-parameter least-squares fit of expected_occupation to the grid.
///
/// Seeding: t_pi from a global scan of the profile cost between the sampling
/// (Nyquist) limit and twice the duration span; beta and rho01 then follow
/// from a linear solve. Levenberg-Marquardt runs on (beta, Re rho01, Im rho01, t_pi)
/// with analytic derivatives, which stays regular at r = 0.
///
/// Throws DomainError for grids with fewer than 4 distinct angles, fewer than
/// 5 durations, or a duration span shorter than one Rabi period (2 t_pi), and
/// NumericalError if the iteration cap is reached.
FitResult fit_tomogram(const TomogramGrid& grid, const std::optional<FitGuess>& guess = std::nullopt);

/// Normalized single-qubit pure state c0 |0> + c1 |1>.
struct PureState {
  std::complex<double> c0{1.0, 0.0};
  std::complex<double> c1{0.0, 0.0};

  static PureState ground() { return {{1.0, 0.0}, {0.0, 0.0}}; }
  static PureState excited() { return {{0.0, 0.0}, {1.0, 0.0}}; }
  /// (|0> - i|1>)/sqrt2, Bloch vector -y.
  static PureState minus_i();
  /// State whose Bloch vector points along (x, y, z); the vector is normalized.
  static PureState from_bloch(double x, double y, double z);
};

/// Overlap (Jozsa) fidelity <psi|rho|psi>. Throws std::invalid_argument if the
/// target is not normalized.
double overlap_fidelity(const DensityMatrix2& rho, const PureState& target);

/// Free decay of an excited population over one measurement cycle, for
/// comparison with a measured post-measurement population.
struct DecayComparison {
  double predicted = 0.0;  // e^{-cycle/T1}
  double measured = 0.0;
  double difference = 0.0; // measured - predicted
};

DecayComparison compare_with_t1_decay(double measured_excited_population, double cycle_time,
                                      double t1);

}  // namespace jpmsim::tomography
