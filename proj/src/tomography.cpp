#include "jpmsim/tomography.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <stdexcept>

#include "jpmsim/golden_section.hpp"
#include "jpmsim/rng.hpp"

namespace jpmsim::tomography {

namespace {

constexpr int kMaxIterations = 500;
constexpr double kUnidentifiablePhase = 1e-6;

/// Flattened grid with durations in units of the longest duration.
struct Samples {
  std::vector<double> sin_theta, cos_theta, u, y;
  double time_scale = 1.0;
};

Samples flatten(const TomogramGrid& grid) {
  Samples s;
  s.time_scale = *std::max_element(grid.durations.begin(), grid.durations.end());
  for (std::size_t i = 0; i < grid.angles.size(); ++i) {
    for (std::size_t j = 0; j < grid.durations.size(); ++j) {
      s.sin_theta.push_back(std::sin(grid.angles[i]));
      s.cos_theta.push_back(std::cos(grid.angles[i]));
      s.u.push_back(grid.durations[j] / s.time_scale);
      s.y.push_back(grid.at(i, j));
    }
  }
  return s;
}

/// Parameters: beta, a = Re rho01, b = Im rho01, tau = t_pi / time_scale.
using Vec4 = Eigen::Vector4d;

double model(const Vec4& x, double st, double ct, double u) {
  const double alpha = kPi * u / x[3];
  return 0.5 * (1.0 - std::cos(alpha)) + x[0] * std::cos(alpha) -
         std::sin(alpha) * (x[1] * st + x[2] * ct);
}

struct Linearized {
  Eigen::VectorXd residual;
  Eigen::MatrixXd jacobian;
};

Linearized linearize(const Vec4& x, const Samples& s) {
  const auto n = static_cast<Eigen::Index>(s.y.size());
  Linearized lin{Eigen::VectorXd(n), Eigen::MatrixXd(n, 4)};
  for (Eigen::Index k = 0; k < n; ++k) {
    const auto i = static_cast<std::size_t>(k);
    const double alpha = kPi * s.u[i] / x[3];
    const double ca = std::cos(alpha);
    const double sa = std::sin(alpha);
    const double q = x[1] * s.sin_theta[i] + x[2] * s.cos_theta[i];
    lin.residual[k] = 0.5 * (1.0 - ca) + x[0] * ca - sa * q - s.y[i];
    lin.jacobian(k, 0) = ca;
    lin.jacobian(k, 1) = -sa * s.sin_theta[i];
    lin.jacobian(k, 2) = -sa * s.cos_theta[i];
    const double dp_dalpha = (0.5 - x[0]) * sa - ca * q;
    lin.jacobian(k, 3) = dp_dalpha * (-alpha / x[3]);
  }
  return lin;
}

double cost(const Vec4& x, const Samples& s) {
  double c = 0.0;
  for (std::size_t i = 0; i < s.y.size(); ++i) {
    const double r = model(x, s.sin_theta[i], s.cos_theta[i], s.u[i]) - s.y[i];
    c += r * r;
  }
  return c;
}

/// Best (beta, a, b) for fixed tau; the model is linear in them.
Vec4 solve_linear(double tau, const Samples& s, double* residual_cost = nullptr) {
  const auto n = static_cast<Eigen::Index>(s.y.size());
  Eigen::MatrixXd design(n, 3);
  Eigen::VectorXd rhs(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const auto i = static_cast<std::size_t>(k);
    const double alpha = kPi * s.u[i] / tau;
    const double ca = std::cos(alpha);
    const double sa = std::sin(alpha);
    design(k, 0) = ca;
    design(k, 1) = -sa * s.sin_theta[i];
    design(k, 2) = -sa * s.cos_theta[i];
    rhs[k] = s.y[i] - 0.5 * (1.0 - ca);
  }
  const Eigen::Vector3d coef = design.colPivHouseholderQr().solve(rhs);
  if (residual_cost) *residual_cost = (design * coef - rhs).squaredNorm();
  return {coef[0], coef[1], coef[2], tau};
}

/// Sampling limits on tau: above the Nyquist bound set by the widest gap
/// between durations (a shorter t_pi aliases onto a longer one with the
/// coherence sign flipped), and up to twice the span so an under-sampled
/// Rabi period is still found and then rejected.
struct TauRange {
  double lo = 0.0;
  double hi = 0.0;
};

TauRange tau_range(const Samples& s) {
  std::vector<double> u = s.u;
  std::sort(u.begin(), u.end());
  u.erase(std::unique(u.begin(), u.end()), u.end());
  double max_gap = 0.0;
  for (std::size_t j = 1; j < u.size(); ++j) max_gap = std::max(max_gap, u[j] - u[j - 1]);
  return {max_gap * (1.0 + 1e-6), 2.0 * (u.back() - u.front())};
}

/// Global scan of the profile cost over the allowed tau range, then
/// golden-section inside the best cell.
double scan_tau(const Samples& s, const TauRange& range) {
  double mean = 0.0;
  for (double y : s.y) mean += y;
  mean /= static_cast<double>(s.y.size());
  double spread = 0.0;
  for (double y : s.y) spread += (y - mean) * (y - mean);
  if (spread <= 1e-24) {
    throw DomainError("fit_tomogram: occupations do not oscillate; t_pi is unidentifiable");
  }

  auto neg_profile = [&](double tau) {
    double c = 0.0;
    solve_linear(tau, s, &c);
    return -c;
  };
  const double ratio = range.hi / range.lo;
  const int scan = static_cast<int>(
      std::clamp(8.0 * ratio * std::log(ratio), 400.0, 20000.0));
  int best = 0;
  double best_value = -1e300;
  for (int k = 0; k <= scan; ++k) {
    const double tau = range.lo * std::pow(ratio, static_cast<double>(k) / scan);
    const double v = neg_profile(tau);
    if (v > best_value) {
      best_value = v;
      best = k;
    }
  }
  const double a = range.lo * std::pow(ratio, static_cast<double>(std::max(0, best - 1)) / scan);
  const double b = range.lo * std::pow(ratio, static_cast<double>(std::min(scan, best + 1)) / scan);
  return golden_section_maximize(neg_profile, a, b, 0.0, 1e-10).x;
}

double wrap_phase(double phi) {
  double w = std::remainder(phi, kTwoPi);
  if (w <= -kPi) w += kTwoPi;
  return w;
}

}  // namespace

void DensityMatrix2::validate() const {
  if (!is_physical(0.0)) {
    throw std::invalid_argument("DensityMatrix2: need 0 <= beta <= 1, r >= 0, r^2 <= beta(1-beta)");
  }
}

bool DensityMatrix2::is_physical(double tolerance) const {
  return beta >= -tolerance && beta <= 1.0 + tolerance && r >= 0.0 &&
         r * r <= beta * (1.0 - beta) + tolerance && std::isfinite(phi);
}

std::array<double, 3> DensityMatrix2::bloch() const {
  const auto c = rho01();
  return {2.0 * c.real(), -2.0 * c.imag(), 1.0 - 2.0 * beta};
}

DensityMatrix2 DensityMatrix2::from_elements(double rho00, std::complex<double> rho01) {
  return {1.0 - rho00, std::abs(rho01), std::abs(rho01) == 0.0 ? 0.0 : std::arg(rho01)};
}

double expected_occupation(const DensityMatrix2& rho, double theta, double t, double t_pi) {
  if (!(t_pi > 0.0)) throw std::invalid_argument("expected_occupation: t_pi must be > 0");
  const double alpha = kPi * t / t_pi;
  return rho.beta + 0.5 * (1.0 - 2.0 * rho.beta) * (1.0 - std::cos(alpha)) -
         rho.r * std::sin(alpha) * std::sin(rho.phi + theta);
}

void TomogramGrid::validate() const {
  if (angles.empty() || durations.empty()) throw std::invalid_argument("TomogramGrid: empty axis");
  if (occupation.size() != angles.size() * durations.size()) {
    throw std::invalid_argument("TomogramGrid: occupation size does not match axes");
  }
  if (!shots.empty() && shots.size() != occupation.size()) {
    throw std::invalid_argument("TomogramGrid: shot counts do not match axes");
  }
  for (double p : occupation) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("TomogramGrid: occupation outside [0, 1]");
  }
  for (double t : durations) {
    if (!(t >= 0.0) || !std::isfinite(t)) throw std::invalid_argument("TomogramGrid: bad duration");
  }
}

TomogramGrid synthesize_tomogram(const DensityMatrix2& rho, double t_pi,
                                 const std::vector<double>& angles,
                                 const std::vector<double>& durations, const NoiseModel& noise,
                                 std::uint64_t seed) {
  rho.validate();
  if (noise.kind == NoiseModel::Kind::binomial && noise.shots < 1) {
    throw std::invalid_argument("synthesize_tomogram: binomial noise needs shots >= 1");
  }
  if (noise.kind == NoiseModel::Kind::gaussian && !(noise.sigma >= 0.0)) {
    throw std::invalid_argument("synthesize_tomogram: gaussian sigma must be >= 0");
  }
  TomogramGrid grid;
  grid.angles = angles;
  grid.durations = durations;
  grid.occupation.resize(angles.size() * durations.size());
  if (noise.kind == NoiseModel::Kind::binomial) grid.shots.assign(grid.occupation.size(), noise.shots);
  for (std::size_t i = 0; i < angles.size(); ++i) {
    for (std::size_t j = 0; j < durations.size(); ++j) {
      const std::size_t idx = i * durations.size() + j;
      const double p = std::clamp(expected_occupation(rho, angles[i], durations[j], t_pi), 0.0, 1.0);
      SplitMix64 rng = substream(seed, Stream::tomogram_cell, idx);
      switch (noise.kind) {
        case NoiseModel::Kind::none:
          grid.occupation[idx] = p;
          break;
        case NoiseModel::Kind::binomial: {
          std::binomial_distribution<long> draw(noise.shots, p);
          grid.occupation[idx] = static_cast<double>(draw(rng)) / static_cast<double>(noise.shots);
          break;
        }
        case NoiseModel::Kind::gaussian:
          grid.occupation[idx] = std::clamp(p + noise.sigma * rng.normal_pair().first, 0.0, 1.0);
          break;
      }
    }
  }
  grid.validate();
  return grid;
}

FitResult fit_tomogram(const TomogramGrid& grid, const std::optional<FitGuess>& guess) {
  grid.validate();
  const std::set<double> distinct_angles(grid.angles.begin(), grid.angles.end());
  const std::set<double> distinct_durations(grid.durations.begin(), grid.durations.end());
  if (distinct_angles.size() < 4) throw DomainError("fit_tomogram: need >= 4 distinct axis angles");
  if (distinct_durations.size() < 5) throw DomainError("fit_tomogram: need >= 5 distinct durations");
  const Samples s = flatten(grid);
  if (!(s.time_scale > 0.0)) throw DomainError("fit_tomogram: all durations are zero");

  const TauRange range = tau_range(s);
  Vec4 x;
  if (guess) {
    if (!(guess->t_pi > 0.0)) throw std::invalid_argument("fit_tomogram: guess t_pi must be > 0");
    x = {guess->rho.beta, guess->rho.rho01().real(), guess->rho.rho01().imag(),
         guess->t_pi / s.time_scale};
  } else {
    x = solve_linear(scan_tau(s, range), s);
  }

  double current = cost(x, s);
  double lambda = 1e-3;
  int it = 0;
  bool converged = false;
  for (; it < kMaxIterations; ++it) {
    const Linearized lin = linearize(x, s);
    const Eigen::Matrix4d h = lin.jacobian.transpose() * lin.jacobian;
    const Vec4 g = lin.jacobian.transpose() * lin.residual;
    // Scaled gradient test: nothing left to gain at the current point.
    double scaled = 0.0;
    for (int k = 0; k < 4; ++k) scaled = std::max(scaled, std::abs(g[k]) / std::sqrt(h(k, k) + 1e-300));
    if (scaled <= 1e-14 * std::sqrt(current + 1e-300) || current <= 1e-30) {
      converged = true;
      break;
    }
    bool stepped = false;
    while (lambda < 1e20) {
      Eigen::Matrix4d damped = h;
      for (int k = 0; k < 4; ++k) damped(k, k) += lambda * std::max(h(k, k), 1e-12);
      const Vec4 step = damped.ldlt().solve(-g);
      const Vec4 trial = x + step;
      const double trial_cost = trial[3] > range.lo ? cost(trial, s) : INFINITY;
      if (trial_cost < current) {
        const double gain = current - trial_cost;
        x = trial;
        lambda = std::max(lambda * 0.2, 1e-15);
        const bool tiny_step = step.norm() <= 1e-13 * (x.norm() + 1e-13);
        const bool tiny_gain = gain <= 1e-15 * current;
        current = trial_cost;
        stepped = true;
        if (tiny_step || tiny_gain) converged = true;
        break;
      }
      lambda *= 10.0;
    }
    if (!stepped) {
      // Damping exhausted without progress: x is a minimum to working precision.
      converged = true;
    }
    if (converged) break;
  }
  if (!converged) {
    throw NumericalError("fit_tomogram: no convergence after " + std::to_string(kMaxIterations) +
                         " iterations");
  }

  FitResult out;
  out.iterations = it;
  out.t_pi = x[3] * s.time_scale;
  const double span = *std::max_element(grid.durations.begin(), grid.durations.end()) -
                      *std::min_element(grid.durations.begin(), grid.durations.end());
  if (span < 2.0 * out.t_pi * (1.0 - 1e-6)) {
    throw DomainError("fit_tomogram: durations span less than one Rabi period (2 t_pi)");
  }
  const double n = static_cast<double>(s.y.size());
  out.residual_rms = std::sqrt(current / n);

  const double r = std::hypot(x[1], x[2]);
  out.raw_rho = {x[0], r, r == 0.0 ? 0.0 : wrap_phase(std::atan2(x[2], x[1]))};
  out.rho = out.raw_rho;
  if (out.rho.r < kUnidentifiablePhase) {
    out.phase_unidentifiable = true;
    out.rho.phi = 0.0;
  }
  if (!out.rho.is_physical(0.0)) {
    out.projected = true;
    out.rho.beta = std::clamp(out.rho.beta, 0.0, 1.0);
    out.rho.r = std::min(out.rho.r, std::sqrt(out.rho.beta * (1.0 - out.rho.beta)));
  }

  const Linearized lin = linearize(x, s);
  const Eigen::Matrix4d h = lin.jacobian.transpose() * lin.jacobian;
  const double dof = std::max(1.0, n - 4.0);
  Eigen::Matrix4d cov = h.completeOrthogonalDecomposition().pseudoInverse() * (current / dof);
  const Vec4 unscale{1.0, 1.0, 1.0, s.time_scale};
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j < 4; ++j) out.covariance[i][j] = cov(i, j) * unscale[i] * unscale[j];
  }
  return out;
}

PureState PureState::minus_i() {
  const double h = 1.0 / std::sqrt(2.0);
  return {{h, 0.0}, {0.0, -h}};
}

PureState PureState::from_bloch(double x, double y, double z) {
  const double norm = std::sqrt(x * x + y * y + z * z);
  if (!(norm > 0.0)) throw std::invalid_argument("PureState::from_bloch: zero vector");
  const double polar = std::acos(std::clamp(z / norm, -1.0, 1.0));
  const double azimuth = std::atan2(y, x);
  return {{std::cos(polar / 2.0), 0.0}, std::polar(std::sin(polar / 2.0), azimuth)};
}

double overlap_fidelity(const DensityMatrix2& rho, const PureState& target) {
  const double norm = std::norm(target.c0) + std::norm(target.c1);
  if (std::abs(norm - 1.0) > 1e-9) throw std::invalid_argument("overlap_fidelity: target not normalized");
  const std::complex<double> cross = std::conj(target.c0) * target.c1 * rho.rho01();
  return std::norm(target.c0) * rho.rho00().real() + std::norm(target.c1) * rho.rho11().real() +
         2.0 * cross.real();
}

DecayComparison compare_with_t1_decay(double measured_excited_population, double cycle_time,
                                      double t1) {
  if (!(t1 > 0.0) || !(cycle_time >= 0.0)) {
    throw std::invalid_argument("compare_with_t1_decay: need t1 > 0 and cycle_time >= 0");
  }
  DecayComparison c;
  c.predicted = std::exp(-cycle_time / t1);
  c.measured = measured_excited_population;
  c.difference = c.measured - c.predicted;
  return c;
}

}  // namespace jpmsim::tomography
