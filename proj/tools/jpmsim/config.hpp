#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace jpmsim::cli {

/// Malformed document, unknown key, missing unit or out-of-range value.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Dim {
  number,       // plain real, no suffix allowed
  integer,
  text,
  time,         // s ms us ns ps
  frequency,    // Hz kHz MHz GHz
  rate,         // /s /ms /us /ns
  current,      // A mA uA nA
  inductance,   // H uH nH pH
  capacitance,  // F nF pF fF
  resistance,   // ohm kohm
  voltage,      // V mV uV
  flux,         // Wb phi0
  angle,        // rad deg
};

struct KeySpec {
  std::string_view key;
  Dim dim;
  bool list;
  std::string_view default_value;  // empty: unset unless given
  /// text: allowed values "a|b|c" (empty accepts anything); other
  /// dimensions: a literal accepted in place of a quantity.
  std::string_view keyword;
  std::string_view help;
};

/// Every key the tool accepts.
const std::vector<KeySpec>& schema();

/// Parses "<number><unit>" into SI units. Dimensioned values must carry a
/// unit from the dimension's table; plain numbers must not.
double parse_quantity(std::string_view text, Dim dim);

/// "[a, b, c]" or "linspace(a, b, n)", each element parsed as parse_quantity.
/// Empty lists are rejected.
std::vector<double> parse_list(std::string_view text, Dim dim);

/// Flat key = value document with dotted keys. '#' starts a comment.
class Config {
 public:
  /// Schema defaults only.
  Config();

  /// Throws ConfigError with the line number on any problem.
  void merge_document(std::string_view text, std::string_view origin);
  /// "key=value"; same validation as a document line.
  void apply_override(std::string_view assignment);

  bool has(std::string_view key) const;
  double quantity(std::string_view key) const;
  std::vector<double> list(std::string_view key) const;
  std::int64_t integer(std::string_view key) const;
  std::string text(std::string_view key) const;
  std::optional<double> optional_quantity(std::string_view key) const;
  /// True when the value is the key's keyword alternative.
  bool is_keyword(std::string_view key) const;

 private:
  void set(std::string_view key, std::string_view value, std::string_view where);
  const std::string& raw(std::string_view key) const;

  std::map<std::string, std::string, std::less<>> values_;
};

std::string_view trim(std::string_view s);

}  // namespace jpmsim::cli
