#include "pvrag/sim/profiles.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <string>

#include "pvrag/core/errors.hpp"
#include "pvrag/core/text.hpp"

namespace pvrag::sim {

namespace {

void check_tau(double tau) {
  if (!(tau >= 0.0 && tau < 24.0)) {
    throw Error("time of day " + std::to_string(tau) + " h is outside [0, 24)");
  }
}

double bump(double tau, double centre, double sigma) {
  const double z = (tau - centre) / sigma;
  return std::exp(-0.5 * z * z);
}

double default_load_peak() {
  static const double peak = [] {
    const TimeGrid grid;
    double m = 0.0;
    for (int t = 0; t < grid.steps; ++t) m = std::max(m, default_load_raw(grid.tau_hours(t)));
    return m;
  }();
  return peak;
}

}  // namespace

double TimeGrid::tau_hours(int step) const {
  if (step < 0 || step >= steps) throw Error("step " + std::to_string(step) + " out of range");
  return step * dt_minutes / 60.0;
}

double default_load_raw(double tau_hours) {
  check_tau(tau_hours);
  return 0.45 + 0.55 * bump(tau_hours, 12.0, 3.0) + 0.35 * bump(tau_hours, 19.0, 1.5);
}

double load_profile(double tau_hours) { return default_load_raw(tau_hours) / default_load_peak(); }

double pv_profile(double tau_hours) {
  check_tau(tau_hours);
  if (tau_hours < 6.0 || tau_hours > 18.0) return 0.0;
  const double s = std::sin(std::numbers::pi * (tau_hours - 6.0) / 12.0);
  return s * s;
}

DayProfiles DayProfiles::defaults(const TimeGrid& grid) {
  DayProfiles p;
  for (int t = 0; t < grid.steps; ++t) {
    const double tau = grid.tau_hours(t);
    p.load.push_back(load_profile(tau));
    p.pv.push_back(pv_profile(tau));
  }
  return p;
}

DayProfiles DayProfiles::from_directory(const std::filesystem::path& dir, const TimeGrid& grid) {
  if (!std::filesystem::is_directory(dir)) {
    throw Error("profile directory " + dir.string() + " does not exist");
  }
  auto p = defaults(grid);
  if (std::filesystem::exists(dir / "load.csv")) p.load = read_profile_file(dir / "load.csv", grid.steps);
  if (std::filesystem::exists(dir / "pv.csv")) p.pv = read_profile_file(dir / "pv.csv", grid.steps);
  return p;
}

std::vector<double> read_profile_file(const std::filesystem::path& path, int steps) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open profile file " + path.string());
  std::vector<double> values;
  std::string raw;
  int line_no = 0;
  bool first = true;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const auto line = text::trim(std::string_view(raw).substr(0, hash));
    if (line.empty()) continue;
    const auto fields = text::split(line, ',');
    const auto field = std::string(text::trim(fields.back()));
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(field, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    const bool numeric = used == field.size() && !field.empty();
    if (!numeric && first) {
      first = false;
      continue;
    }
    first = false;
    const auto at = path.string() + ":" + std::to_string(line_no);
    if (!numeric) throw FormatError(at + ": malformed profile value '" + field + "'");
    if (!(v >= 0.0 && v <= 1.0)) throw FormatError(at + ": profile value outside [0, 1]");
    values.push_back(v);
  }
  if (static_cast<int>(values.size()) != steps) {
    throw FormatError(path.string() + ": expected " + std::to_string(steps) + " profile values, found " +
                      std::to_string(values.size()));
  }
  return values;
}

}  // namespace pvrag::sim
