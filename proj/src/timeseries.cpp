#include "thermalcat/timeseries.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace thermalcat {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return std::string(buf);
}

std::vector<double>& TimeSeries::add_column(const std::string& name) {
  names.push_back(name);
  columns.emplace_back();
  return columns.back();
}

bool TimeSeries::has_column(const std::string& name) const {
  for (const auto& n : names) {
    if (n == name) return true;
  }
  return false;
}

const std::vector<double>& TimeSeries::column(const std::string& name) const {
  for (std::size_t c = 0; c < names.size(); ++c) {
    if (names[c] == name) return columns[c];
  }
  throw std::domain_error("TimeSeries: no column named '" + name + "'");
}

void TimeSeries::set_meta(const std::string& key, const std::string& value) {
  for (auto& kv : metadata) {
    if (kv.first == key) {
      kv.second = value;
      return;
    }
  }
  metadata.emplace_back(key, value);
}

void TimeSeries::validate() const {
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) {
      throw std::domain_error("TimeSeries: time grid must be strictly increasing");
    }
  }
  if (names.size() != columns.size()) throw std::domain_error("TimeSeries: name/column mismatch");
  for (const auto& col : columns) {
    if (col.size() != times.size()) {
      throw std::domain_error("TimeSeries: column length differs from time grid");
    }
  }
}

void TimeSeries::write_csv(std::ostream& out) const {
  validate();
  for (const auto& [key, value] : metadata) out << "# " << key << "=" << value << "\n";
  out << "time";
  for (const auto& name : names) out << "," << name;
  out << "\n";
  for (std::size_t i = 0; i < times.size(); ++i) {
    out << format_double(times[i]);
    for (const auto& col : columns) out << "," << format_double(col[i]);
    out << "\n";
  }
}

void TimeSeries::write_csv_file(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("TimeSeries: cannot open '" + path + "' for writing");
  write_csv(out);
}

}  // namespace thermalcat
