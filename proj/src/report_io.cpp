#include "levyspde/report_io.hpp"

#include <charconv>
#include <fstream>

#include "levyspde/errors.hpp"

namespace levyspde {

std::string format_double(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

void KeyValueReport::section(const std::string& name) { lines_.emplace_back("[" + name + "]", ""); }

void KeyValueReport::add(const std::string& key, const std::string& value) {
  lines_.emplace_back(key, value);
}

void KeyValueReport::add(const std::string& key, double value) { add(key, format_double(value)); }

void KeyValueReport::add(const std::string& key, long long value) { add(key, std::to_string(value)); }

void KeyValueReport::add(const std::string& key, bool value) {
  add(key, std::string(value ? "true" : "false"));
}

void KeyValueReport::write(std::ostream& out) const {
  bool first = true;
  for (const auto& [key, value] : lines_) {
    if (value.empty() && key.front() == '[') {
      if (!first) out << '\n';
      out << key << '\n';
    } else {
      out << key << " = " << value << '\n';
    }
    first = false;
  }
}

void KeyValueReport::write(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write(out);
}

void write_trajectory_csv(const std::filesystem::path& path, const TrajectoryRecord& record) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  const bool coeffs = !record.states.empty();
  out << "t,norm_H,norm_V";
  if (coeffs) {
    for (Eigen::Index i = 0; i < record.states.front().size(); ++i) out << ",c" << i;
  }
  out << '\n';
  for (std::size_t k = 0; k < record.times.size(); ++k) {
    out << format_double(record.times[k]) << ',' << format_double(record.norm_h[k]) << ','
        << format_double(record.norm_v[k]);
    if (coeffs) {
      for (Eigen::Index i = 0; i < record.states[k].size(); ++i) {
        out << ',' << format_double(record.states[k](i));
      }
    }
    out << '\n';
  }
}

void append_report(KeyValueReport& out, const ConditionReport& report) {
  out.section(to_string(report.condition_id));
  out.add("samples_evaluated", report.samples_evaluated);
  out.add("min_margin", report.min_margin);
  out.add("violations", report.violations);
  out.add("calibrated_constant", report.calibrated_constant ? format_double(*report.calibrated_constant)
                                                            : std::string("n/a"));
  out.add("rel_tol", report.rel_tol);
  out.add("sampling.distribution", report.sampling_spec.distribution());
  out.add("sampling.radius", report.sampling_spec.radius);
  out.add("sampling.decay", report.sampling_spec.decay);
  out.add("sampling.seed", std::to_string(report.sampling_spec.seed));
}

void append_report(KeyValueReport& out, const MomentReport& report) {
  out.section("moments");
  out.add("p", report.p);
  out.add("sup_mean_norm_p", report.sup_mean);
  out.add("sup_standard_error", report.sup_standard_error);
  out.add("sup_time", report.sup_time);
  out.add("energy_integral_mean", report.energy_mean);
  out.add("energy_integral_standard_error", report.energy_standard_error);
  out.add("ensemble_size", report.ensemble_size);
  out.add("blown_up", report.blown_up);
  out.add("blowup_fraction", report.blowup_fraction);
  out.add("conditional_on_non_explosion", report.blown_up > 0);
}

}  // namespace levyspde
