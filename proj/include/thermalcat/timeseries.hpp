#pragma once

#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace thermalcat {

/// Sampled observable record: strictly increasing time grid (units of 1/g),
/// named columns of equal length, and ordered metadata key/value pairs that
/// are embedded as comment lines when serialized.
struct TimeSeries {
  std::vector<double> times;
  std::vector<std::string> names;
  std::vector<std::vector<double>> columns;  // columns[c].size() == times.size()
  std::vector<std::pair<std::string, std::string>> metadata;

  std::size_t num_samples() const { return times.size(); }

  std::vector<double>& add_column(const std::string& name);
  const std::vector<double>& column(const std::string& name) const;
  bool has_column(const std::string& name) const;

  void set_meta(const std::string& key, const std::string& value);

  // Validates grid monotonicity and column lengths; throws std::domain_error.
  void validate() const;

  // CSV body: '# key=value' metadata comments, a header row, then one row per
  // sample with 17-significant-digit numbers. Deterministic byte-for-byte.
  void write_csv(std::ostream& out) const;
  void write_csv_file(const std::string& path) const;
};

// %.17g with C-locale formatting; round-trip exact for doubles.
std::string format_double(double v);

}  // namespace thermalcat
