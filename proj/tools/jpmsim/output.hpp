#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

namespace jpmsim::cli {

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A number, a label, or an empty cell (quantity not defined for the row).
using Cell = std::variant<double, std::string, std::monostate>;

struct Column {
  std::string name;
  std::string unit;  // "1" for dimensionless numbers, "-" for labels
};

struct Table {
  std::vector<Column> columns;
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> row);
  static Cell maybe(const std::optional<double>& v);
};

enum class Format { csv, json };

/// %.12g, with -0 written as 0 so reruns and platforms agree.
std::string format_number(double v);

std::string to_csv(const Table& t);
nlohmann::json to_json(const Table& t);

/// Writes text to dir/name, creating dir. Throws IoError.
std::filesystem::path write_file(const std::filesystem::path& dir, const std::string& name,
                                 const std::string& contents);

/// Table written as name.csv or name.json.
std::filesystem::path write_table(const std::filesystem::path& dir, const std::string& stem,
                                  const Table& t, Format format);

std::string read_file(const std::filesystem::path& path);

}  // namespace jpmsim::cli
