#include "jpmsim/potential.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "jpmsim/parallel.hpp"

namespace jpmsim::potential {

namespace {

constexpr double kScanStep = kPi / 100.0;
constexpr double kPhaseTolerance = 1e-12;
constexpr int kMaxBisections = 200;

bool positive_finite(double x) { return std::isfinite(x) && x > 0.0; }

double residual_slope(double phase, double beta) { return std::cos(phase) + 1.0 / beta; }

/// Bisection on g over [a, b] where g(a), g(b) have opposite signs.
template <class G>
double bisect(G&& g, double a, double b, double ga) {
  for (int i = 0; i < kMaxBisections; ++i) {
    const double m = 0.5 * (a + b);
    if (b - a <= kPhaseTolerance) return m;
    const double gm = g(m);
    if (gm == 0.0) return m;
    if ((gm < 0.0) == (ga < 0.0)) {
      a = m;
      ga = gm;
    } else {
      b = m;
    }
  }
  throw NumericalError("find_extrema: bisection did not reach " + std::to_string(kPhaseTolerance) +
                       " rad");
}

}  // namespace

void JpmParams::validate() const {
  if (!positive_finite(critical_current)) throw std::invalid_argument("critical_current must be > 0");
  if (!positive_finite(loop_inductance)) throw std::invalid_argument("loop_inductance must be > 0");
  if (!positive_finite(shunt_capacitance)) {
    throw std::invalid_argument("shunt_capacitance must be > 0");
  }
  if (mutual_inductance && !positive_finite(*mutual_inductance)) {
    throw std::invalid_argument("mutual_inductance must be > 0");
  }
}

double JpmParams::josephson_energy() const { return critical_current * kFluxQuantum / kTwoPi; }

std::string_view to_string(WellLabel label) {
  switch (label) {
    case WellLabel::left:
      return "left";
    case WellLabel::right:
      return "right";
    case WellLabel::global:
      return "global";
    case WellLabel::middle:
      return "middle";
  }
  return "?";
}

double potential_energy(double phase, FluxBias flux, const JpmParams& p) {
  const double reduced = kFluxQuantum / kTwoPi;
  const double offset = phase - flux.reduced_phase();
  return -p.josephson_energy() * std::cos(phase) +
         reduced * reduced * offset * offset / (2.0 * p.loop_inductance);
}

double potential_curvature(double phase, FluxBias /*flux*/, const JpmParams& p) {
  return p.josephson_energy() * residual_slope(phase, beta_L(p));
}

double beta_L(const JpmParams& p) {
  return kTwoPi * p.loop_inductance * p.critical_current / kFluxQuantum;
}

double current_residual(double phase, FluxBias flux, const JpmParams& p) {
  return std::sin(phase) - (flux.reduced_phase() - phase) / beta_L(p);
}

std::vector<Extremum> find_extrema(FluxBias flux, const JpmParams& p) {
  p.validate();
  if (!std::isfinite(flux.webers)) throw std::invalid_argument("find_extrema: flux must be finite");
  const double beta = beta_L(p);
  const double center = flux.reduced_phase();
  const double lo = center - beta - 1.0;
  const double hi = center + beta + 1.0;
  auto f = [&](double d) { return std::sin(d) - (center - d) / beta; };
  auto df = [&](double d) { return residual_slope(d, beta); };

  std::vector<double> roots;
  const int steps = static_cast<int>(std::ceil((hi - lo) / kScanStep));
  const double h = (hi - lo) / steps;
  double a = lo;
  double fa = f(a);
  for (int k = 1; k <= steps; ++k) {
    const double b = (k == steps) ? hi : lo + k * h;
    const double fb = f(b);
    if (fa == 0.0) {
      // An exact zero with zero slope is a tangency, not an extremum.
      if (std::abs(df(a)) > 1e-12) roots.push_back(a);
    } else if ((fa < 0.0) != (fb < 0.0) && fb != 0.0) {
      roots.push_back(bisect(f, a, b, fa));
    } else if (fb != 0.0 && (df(a) < 0.0) != (df(b) < 0.0)) {
      // No sign change, but f turns around inside [a, b]: two roots may hide
      // near a tangency. Locate the turning point and test its sign.
      const double turn = bisect(df, a, b, df(a));
      const double ft = f(turn);
      if (ft != 0.0 && (ft < 0.0) != (fa < 0.0)) {
        roots.push_back(bisect(f, a, turn, fa));
        roots.push_back(bisect(f, turn, b, ft));
      }
    }
    a = b;
    fa = fb;
  }
  if (fa == 0.0 && std::abs(df(a)) > 1e-12) roots.push_back(a);

  std::vector<Extremum> out;
  out.reserve(roots.size());
  for (double r : roots) {
    // U'' = E_J (cos + 1/beta); positive curvature is a minimum.
    out.push_back({r, df(r) > 0.0 ? ExtremumKind::minimum : ExtremumKind::maximum});
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto expect = (i % 2 == 0) ? ExtremumKind::minimum : ExtremumKind::maximum;
    if (out[i].kind != expect || out.size() % 2 == 0) {
      throw NumericalError("find_extrema: extrema do not alternate (near-tangent flux)");
    }
  }
  return out;
}

double plasma_frequency(double phase, FluxBias flux, const JpmParams& p) {
  const double curvature = potential_curvature(phase, flux, p);
  if (curvature <= 0.0) return 0.0;
  return (kTwoPi / kFluxQuantum) * std::sqrt(curvature / p.shunt_capacitance);
}

std::vector<WellReport> well_reports(FluxBias flux, const JpmParams& p) {
  const auto extrema = find_extrema(flux, p);
  std::vector<WellReport> reports;
  const std::size_t n_minima = (extrema.size() + 1) / 2;
  for (std::size_t i = 0; i < extrema.size(); i += 2) {
    WellReport w;
    w.minimum_phase = extrema[i].phase;
    w.plasma_frequency = plasma_frequency(w.minimum_phase, flux, p);
    if (n_minima == 1) {
      w.label = WellLabel::global;
    } else {
      w.label = (i == 0) ? WellLabel::left : WellLabel::right;
    }
    // Escape is over the lower of the adjacent maxima.
    std::optional<double> barrier;
    for (std::size_t j : {i - 1, i + 1}) {
      if (j >= extrema.size()) continue;  // i - 1 wraps for i == 0
      if (!barrier ||
          potential_energy(extrema[j].phase, flux, p) < potential_energy(*barrier, flux, p)) {
        barrier = extrema[j].phase;
      }
    }
    if (barrier) {
      w.barrier_phase = barrier;
      w.barrier_height =
          potential_energy(*barrier, flux, p) - potential_energy(w.minimum_phase, flux, p);
      if (w.plasma_frequency > 0.0) {
        w.level_count = *w.barrier_height / (kHbar * w.plasma_frequency);
      }
    }
    reports.push_back(w);
  }
  for (std::size_t k = 1; k + 1 < reports.size(); ++k) reports[k].label = WellLabel::middle;
  return reports;
}

std::size_t count_minima(FluxBias flux, const JpmParams& p) {
  return (find_extrema(flux, p).size() + 1) / 2;
}

std::vector<FluxBias> critical_fluxes(const JpmParams& p) {
  p.validate();
  const double beta = beta_L(p);
  std::vector<FluxBias> out;
  if (beta <= 1.0) return out;
  // Tangency: residual and its slope vanish together,
  // cos delta = -1/beta and 2 pi Phi/Phi0 = delta + beta sin delta.
  const double turn = std::acos(-1.0 / beta);
  const double lift = beta * std::sin(turn);
  // Both tangency families, shifted by whole periods into [0, 2 pi].
  for (double base : {turn + lift, -turn - lift}) {
    const double k_lo = std::ceil((0.0 - base) / kTwoPi);
    const double k_hi = std::floor((kTwoPi - base) / kTwoPi);
    for (double k = k_lo; k <= k_hi; k += 1.0) {
      out.push_back({(base + k * kTwoPi) / kTwoPi * kFluxQuantum});
    }
  }
  std::sort(out.begin(), out.end(), [](FluxBias a, FluxBias b) { return a.webers < b.webers; });
  return out;
}

std::optional<double> plasma_frequency_splitting(FluxBias flux, const JpmParams& p) {
  const auto wells = well_reports(flux, p);
  if (wells.size() != 2) return std::nullopt;
  return wells[1].plasma_frequency - wells[0].plasma_frequency;
}

std::vector<std::vector<WellReport>> sweep_wells(std::span<const FluxBias> fluxes,
                                                 const JpmParams& p, Execution exec) {
  p.validate();
  return parallel_map<std::vector<WellReport>>(
      fluxes.size(), [&](std::size_t i) { return well_reports(fluxes[i], p); }, exec);
}

}  // namespace jpmsim::potential
