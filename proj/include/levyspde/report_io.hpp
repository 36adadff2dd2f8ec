#pragma once

#include <filesystem>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "levyspde/conditions.hpp"
#include "levyspde/solver.hpp"

namespace levyspde {

/// Shortest decimal form that reads back to the same double.
std::string format_double(double value);

/// Ordered "key = value" lines, optionally grouped under "[section]" headers.
class KeyValueReport {
 public:
  void section(const std::string& name);
  void add(const std::string& key, const std::string& value);
  void add(const std::string& key, double value);
  void add(const std::string& key, long long value);
  void add(const std::string& key, int value) { add(key, static_cast<long long>(value)); }
  void add(const std::string& key, bool value);

  void write(std::ostream& out) const;
  void write(const std::filesystem::path& path) const;

 private:
  std::vector<std::pair<std::string, std::string>> lines_;  // empty value marks a section
};

/// Columns t, norm_H, norm_V and, when states were recorded, c0..c{dim-1}.
void write_trajectory_csv(const std::filesystem::path& path, const TrajectoryRecord& record);

void append_report(KeyValueReport& out, const ConditionReport& report);
void append_report(KeyValueReport& out, const MomentReport& report);

}  // namespace levyspde
