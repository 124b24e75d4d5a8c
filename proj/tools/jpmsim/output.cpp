#include "output.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>


namespace jpmsim::cli {

void Table::add(std::vector<Cell> row) {
  if (row.size() != columns.size()) throw std::logic_error("Table::add: row width mismatch");
  rows.push_back(std::move(row));
}

Cell Table::maybe(const std::optional<double>& v) {
  if (v) return *v;
  return std::monostate{};
}

std::string format_number(double v) {
  if (v == 0.0) v = 0.0;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string to_csv(const Table& t) {
  std::string out;
  for (std::size_t c = 0; c < t.columns.size(); ++c) {
    if (c) out += ',';
    out += t.columns[c].name + "[" + t.columns[c].unit + "]";
  }
  out += '\n';
  for (const auto& row : t.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out += ',';
      if (const double* d = std::get_if<double>(&row[c])) {
        out += format_number(*d);
      } else if (const std::string* s = std::get_if<std::string>(&row[c])) {
        out += *s;
      }
    }
    out += '\n';
  }
  return out;
}

nlohmann::json to_json(const Table& t) {
  nlohmann::json cols = nlohmann::json::array();
  for (const Column& c : t.columns) cols.push_back({{"name", c.name}, {"unit", c.unit}});
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : t.rows) {
    nlohmann::json r = nlohmann::json::array();
    for (const Cell& cell : row) {
      if (const double* d = std::get_if<double>(&cell)) {
        r.push_back(std::isfinite(*d) ? nlohmann::json(*d) : nlohmann::json(nullptr));
      } else if (const std::string* s = std::get_if<std::string>(&cell)) {
        r.push_back(*s);
      } else {
        r.push_back(nullptr);
      }
    }
    rows.push_back(std::move(r));
  }
  return {{"columns", cols}, {"rows", rows}};
}

std::filesystem::path write_file(const std::filesystem::path& dir, const std::string& name,
                                 const std::string& contents) {
  std::error_code ec;
  if (!dir.empty()) std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory " + dir.string() + ": " + ec.message());
  const std::filesystem::path path = dir / name;
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open " + path.string() + " for writing");
  f << contents;
  f.close();
  if (!f) throw IoError("write failed: " + path.string());
  return path;
}

std::filesystem::path write_table(const std::filesystem::path& dir, const std::string& stem,
                                  const Table& t, Format format) {
  if (format == Format::json) return write_file(dir, stem + ".json", to_json(t).dump(2) + "\n");
  return write_file(dir, stem + ".csv", to_csv(t));
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << f.rdbuf();
  if (f.bad()) throw IoError("read failed: " + path.string());
  return ss.str();
}

}  // namespace jpmsim::cli
