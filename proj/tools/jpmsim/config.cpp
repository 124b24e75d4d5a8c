#include "config.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <utility>

#include "jpmsim/common.hpp"

namespace jpmsim::cli {

namespace {

struct Unit {
  std::string_view suffix;
  double scale;
};

std::vector<Unit> units_for(Dim dim) {
  switch (dim) {
    case Dim::time:
      return {{"s", 1.0}, {"ms", 1e-3}, {"us", 1e-6}, {"ns", 1e-9}, {"ps", 1e-12}};
    case Dim::frequency:
      return {{"Hz", 1.0}, {"kHz", 1e3}, {"MHz", 1e6}, {"GHz", 1e9}};
    case Dim::rate:
      return {{"/s", 1.0}, {"/ms", 1e3}, {"/us", 1e6}, {"/ns", 1e9}};
    case Dim::current:
      return {{"A", 1.0}, {"mA", 1e-3}, {"uA", 1e-6}, {"nA", 1e-9}};
    case Dim::inductance:
      return {{"H", 1.0}, {"uH", 1e-6}, {"nH", 1e-9}, {"pH", 1e-12}};
    case Dim::capacitance:
      return {{"F", 1.0}, {"nF", 1e-9}, {"pF", 1e-12}, {"fF", 1e-15}};
    case Dim::resistance:
      return {{"ohm", 1.0}, {"kohm", 1e3}};
    case Dim::voltage:
      return {{"V", 1.0}, {"mV", 1e-3}, {"uV", 1e-6}};
    case Dim::flux:
      return {{"Wb", 1.0}, {"phi0", kFluxQuantum}};
    case Dim::angle:
      return {{"rad", 1.0}, {"deg", kPi / 180.0}};
    default:
      return {};
  }
}

std::string unit_list(Dim dim) {
  std::string out;
  for (const Unit& u : units_for(dim)) {
    if (!out.empty()) out += ", ";
    out += u.suffix;
  }
  return out;
}

const KeySpec* find_spec(std::string_view key) {
  for (const KeySpec& s : schema()) {
    if (s.key == key) return &s;
  }
  return nullptr;
}

std::vector<std::string_view> split_args(std::string_view inner) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= inner.size(); ++i) {
    if (i == inner.size() || inner[i] == ',') {
      parts.push_back(trim(inner.substr(start, i - start)));
      start = i + 1;
    }
  }
  return parts;
}

std::vector<std::string_view> choices(std::string_view keyword) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= keyword.size(); ++i) {
    if (i == keyword.size() || keyword[i] == '|') {
      out.push_back(keyword.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

void validate_value(const KeySpec& spec, std::string_view value) {
  if (spec.dim == Dim::text) {
    if (spec.keyword.empty()) return;
    const auto options = choices(spec.keyword);
    if (std::find(options.begin(), options.end(), value) == options.end()) {
      throw ConfigError("expected one of " + std::string(spec.keyword) + ", got '" + std::string(value) + "'");
    }
    return;
  }
  if (!spec.keyword.empty() && value == spec.keyword) return;
  if (spec.list) {
    (void)parse_list(value, spec.dim);
  } else if (spec.dim == Dim::integer) {
    std::int64_t v = 0;
    const auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
    if (ec != std::errc() || p != value.data() + value.size()) {
      throw ConfigError("expected an integer, got '" + std::string(value) + "'");
    }
  } else {
    (void)parse_quantity(value, spec.dim);
  }
}

}  // namespace

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

const std::vector<KeySpec>& schema() {
  static const std::vector<KeySpec> keys = {
      {"seed", Dim::integer, false, "20180711", "", "master seed for every random stream"},
      {"output.directory", Dim::text, false, "", "", "artifact directory"},
      {"output.format", Dim::text, false, "csv", "csv|json", "csv or json"},

      {"device.critical_current", Dim::current, false, "1uA", "", "junction critical current"},
      {"device.loop_inductance", Dim::inductance, false, "1.1nH", "", "rf-SQUID loop inductance"},
      {"device.shunt_capacitance", Dim::capacitance, false, "2pF", "", "junction shunt capacitance"},
      {"device.mutual_inductance", Dim::inductance, false, "", "", "flux-line mutual inductance"},

      {"qubit_cavity.frequency", Dim::frequency, false, "5.020GHz", "", "qubit (source) cavity"},
      {"qubit_cavity.decay_time", Dim::time, false, "260ns", "", "1/kappa1"},
      {"capture.frequency", Dim::frequency, false, "5.028GHz", "", "capture (target) cavity"},
      {"capture.decay_time", Dim::time, false, "40ns", "", "1/kappa2"},
      {"line.impedance", Dim::resistance, false, "50ohm", "", "transmission line impedance"},
      {"line.drive_amplitude", Dim::voltage, false, "1V", "", "source waveform amplitude"},

      {"protocol.t_prep", Dim::time, false, "780ns", "", "pointer preparation pulse"},
      {"protocol.window", Dim::text, false, "hamming", "hamming|rectangular", "hamming or rectangular"},
      {"protocol.t1", Dim::time, false, "6.6us", "", "qubit energy relaxation time"},
      {"protocol.relaxation", Dim::number, false, "0.05", "window-average",
       "relaxation probability during preparation, or window-average"},
      {"protocol.dark_prob", Dim::number, false, "0.02", "", "false switch probability"},
      {"protocol.bright_detect_prob", Dim::number, false, "0.99", "", "switch probability, bright pointer"},
      {"protocol.dispersive_shift", Dim::frequency, false, "-12.3MHz", "", "2 chi / 2 pi"},
      {"protocol.n_bar", Dim::number, false, "10", "", "qubit cavity photons in the bright pointer"},
      {"protocol.photons_per_unit_power", Dim::number, false, "10", "", "Stark calibration slope"},
      {"protocol.depletion_rate", Dim::rate, false, "auto", "auto", "cavity reset rate, e.g. 75/us, or auto"},
      {"protocol.depletion_photons", Dim::number, false, "100", "", "photons deposited by a switch"},
      {"protocol.dephasing_per_photon", Dim::number, false, "auto", "auto", "contrast = exp(-c n), or auto"},
      {"protocol.depletion_time", Dim::time, false, "40ns", "", "depletion interval"},
      {"protocol.cycle_time", Dim::time, false, "2.8us", "", "full measurement cycle"},
      {"protocol.t2", Dim::time, false, "5us", "", "Ramsey envelope decay"},
      {"protocol.rabi_frequency", Dim::frequency, false, "10MHz", "", "Omega / 2 pi"},
      {"protocol.ramsey_amplitude", Dim::number, false, "1", "", "Ramsey fringe amplitude"},
      {"protocol.ramsey_phase", Dim::angle, false, "0rad", "", "Ramsey fringe phase offset"},
      {"protocol.shots", Dim::integer, false, "100000", "", "shots per preparation for budget"},
      {"protocol.shots_per_point", Dim::integer, false, "0", "", "Monte Carlo shots per fringe cell; 0 is exact"},

      {"iq.centroid0_i", Dim::number, false, "0", "", "state-0 centroid, I"},
      {"iq.centroid0_q", Dim::number, false, "0", "", "state-0 centroid, Q"},
      {"iq.centroid1_i", Dim::number, false, "7.07", "", "state-1 centroid, I"},
      {"iq.centroid1_q", Dim::number, false, "0", "", "state-1 centroid, Q"},
      {"iq.sigma", Dim::number, false, "1", "", "per-sample spread"},
      {"iq.n_samples", Dim::integer, false, "1", "", "samples averaged per shot"},
      {"iq.shots", Dim::integer, false, "50000", "", "shots per class"},

      {"potential.flux", Dim::flux, true, "linspace(0phi0, 1phi0, 501)", "", "flux sweep"},

      {"transfer.kappa_ratios", Dim::number, true, "[1, 2, 5, 10]", "", "kappa2/kappa1 family"},
      {"transfer.detuning_ratios", Dim::number, true, "[0, 0.5, 1, 2, 4]", "", "delta_omega/kappa family"},
      {"transfer.times", Dim::number, true, "linspace(0, 10, 501)", "", "time in units of 1/kappa1"},
      {"transfer.points_per_period", Dim::integer, false, "40", "", "quadrature nodes per carrier period"},

      {"ramsey.detuning", Dim::frequency, true, "linspace(-5MHz, 5MHz, 41)", "", "drive detuning"},
      {"ramsey.delay", Dim::time, true, "linspace(0ns, 2000ns, 101)", "", "free evolution"},
      {"rabi.detuning", Dim::frequency, true, "linspace(-20MHz, 20MHz, 41)", "", "drive detuning"},
      {"rabi.duration", Dim::time, true, "linspace(0ns, 500ns, 101)", "", "drive duration"},

      {"stark.powers", Dim::number, true, "linspace(0, 1, 11)", "", "drive power, calibration units"},
      {"stark.n_bar_saturation", Dim::number, false, "8", "", "photons where switching saturates"},

      {"depletion.times", Dim::time, true, "linspace(0ns, 200ns, 101)", "", "depletion interval sweep"},

      {"tomo.beta", Dim::number, false, "0.09", "", "excited population"},
      {"tomo.r", Dim::number, false, "0.02", "", "coherence magnitude"},
      {"tomo.phi", Dim::angle, false, "0rad", "", "coherence phase"},
      {"tomo.t_pi", Dim::time, false, "50ns", "", "pi-pulse duration"},
      {"tomo.angles", Dim::angle, true, "linspace(0deg, 315deg, 8)", "", "rotation axis azimuths"},
      {"tomo.durations", Dim::time, true, "linspace(0ns, 200ns, 41)", "", "rotation pulse durations"},
      {"tomo.noise", Dim::text, false, "binomial", "none|binomial|gaussian", "none, binomial or gaussian"},
      {"tomo.shots", Dim::integer, false, "1000", "", "binomial trials per cell"},
      {"tomo.sigma", Dim::number, false, "0.01", "", "gaussian noise"},
      {"tomo.input", Dim::text, false, "", "", "tomogram CSV to fit; empty synthesizes one"},
  };
  return keys;
}

double parse_quantity(std::string_view text, Dim dim) {
  text = trim(text);
  double value = 0.0;
  const char* begin = text.data();
  const char* end = text.data() + text.size();
  const auto [p, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || p == begin) {
    throw ConfigError("expected a number, got '" + std::string(text) + "'");
  }
  if (!std::isfinite(value)) throw ConfigError("non-finite value '" + std::string(text) + "'");
  const std::string_view suffix = trim(std::string_view(p, static_cast<std::size_t>(end - p)));
  if (dim == Dim::number) {
    if (!suffix.empty()) {
      throw ConfigError("dimensionless value takes no unit: '" + std::string(text) + "'");
    }
    return value;
  }
  if (suffix.empty()) {
    throw ConfigError("missing unit in '" + std::string(text) + "' (one of " + unit_list(dim) + ")");
  }
  for (const Unit& u : units_for(dim)) {
    if (u.suffix == suffix) return value * u.scale;
  }
  throw ConfigError("unknown unit '" + std::string(suffix) + "' (one of " + unit_list(dim) + ")");
}

std::vector<double> parse_list(std::string_view text, Dim dim) {
  text = trim(text);
  std::vector<double> out;
  if (text.size() >= 2 && text.front() == '[' && text.back() == ']') {
    const std::string_view inner = trim(text.substr(1, text.size() - 2));
    if (inner.empty()) throw ConfigError("empty list");
    for (std::string_view item : split_args(inner)) out.push_back(parse_quantity(item, dim));
    return out;
  }
  constexpr std::string_view kLinspace = "linspace(";
  if (text.substr(0, kLinspace.size()) == kLinspace && text.back() == ')') {
    const auto args = split_args(text.substr(kLinspace.size(), text.size() - kLinspace.size() - 1));
    if (args.size() != 3) throw ConfigError("linspace takes (start, stop, count)");
    const double a = parse_quantity(args[0], dim);
    const double b = parse_quantity(args[1], dim);
    long n = 0;
    const auto [p, ec] = std::from_chars(args[2].data(), args[2].data() + args[2].size(), n);
    if (ec != std::errc() || p != args[2].data() + args[2].size()) {
      throw ConfigError("linspace count must be an integer");
    }
    if (n < 1) throw ConfigError("empty list (linspace count " + std::to_string(n) + ")");
    if (n == 1) return {a};
    for (long k = 0; k < n; ++k) {
      out.push_back(a + (b - a) * static_cast<double>(k) / static_cast<double>(n - 1));
    }
    return out;
  }
  throw ConfigError("expected [a, b, ...] or linspace(a, b, n), got '" + std::string(text) + "'");
}

Config::Config() {
  for (const KeySpec& s : schema()) {
    if (!s.default_value.empty()) values_.emplace(std::string(s.key), std::string(s.default_value));
  }
}

void Config::set(std::string_view key, std::string_view value, std::string_view where) {
  const KeySpec* spec = find_spec(key);
  if (!spec) throw ConfigError(std::string(where) + ": unknown key '" + std::string(key) + "'");
  try {
    validate_value(*spec, value);
  } catch (const ConfigError& e) {
    throw ConfigError(std::string(where) + ": " + std::string(key) + ": " + e.what());
  }
  values_.insert_or_assign(std::string(key), std::string(value));
}

void Config::merge_document(std::string_view text, std::string_view origin) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t nl = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::string where = std::string(origin) + ":" + std::to_string(line_no);
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(where + ": expected key = value");
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(where + ": missing key");
    set(key, value, where);
  }
}

void Config::apply_override(std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    throw ConfigError("--set expects key=value, got '" + std::string(assignment) + "'");
  }
  set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)), "--set");
}

bool Config::has(std::string_view key) const {
  const auto it = values_.find(key);
  return it != values_.end() && !it->second.empty();
}

const std::string& Config::raw(std::string_view key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("missing required key '" + std::string(key) + "'");
  return it->second;
}

double Config::quantity(std::string_view key) const {
  return parse_quantity(raw(key), find_spec(key)->dim);
}

bool Config::is_keyword(std::string_view key) const {
  const KeySpec* spec = find_spec(key);
  return spec && !spec->keyword.empty() && spec->dim != Dim::text && raw(key) == spec->keyword;
}

std::optional<double> Config::optional_quantity(std::string_view key) const {
  if (!has(key)) return std::nullopt;
  return quantity(key);
}

std::vector<double> Config::list(std::string_view key) const {
  return parse_list(raw(key), find_spec(key)->dim);
}

std::int64_t Config::integer(std::string_view key) const {
  const std::string& s = raw(key);
  std::int64_t v = 0;
  std::from_chars(s.data(), s.data() + s.size(), v);
  return v;
}

std::string Config::text(std::string_view key) const {
  const auto it = values_.find(key);
  return it == values_.end() ? std::string{} : it->second;
}

}  // namespace jpmsim::cli
