#pragma once

#include <filesystem>
#include <vector>

namespace pvrag::sim {

/// Daily time grid; steps are numbered from 0, step t starts at t * dt.
struct TimeGrid {
  int dt_minutes = 15;
  int steps = 96;

  double tau_hours(int step) const;
};

/// Unnormalized default load shape: 0.45 baseline plus Gaussian bumps at 12:00
/// (sigma 3 h, height 0.55) and 19:00 (sigma 1.5 h, height 0.35).
double default_load_raw(double tau_hours);

/// Default load shape normalized so its maximum over the default grid is 1.
double load_profile(double tau_hours);

/// Clear-sky PV shape sin^2(pi (tau - 6) / 12) on [6, 18], zero elsewhere.
double pv_profile(double tau_hours);

/// Load and PV shapes sampled on a time grid.
struct DayProfiles {
  std::vector<double> load;
  std::vector<double> pv;

  static DayProfiles defaults(const TimeGrid& grid = {});

  /// Starts from the defaults and replaces each shape whose file
  /// (`load.csv`, `pv.csv`) exists in `dir`.
  static DayProfiles from_directory(const std::filesystem::path& dir, const TimeGrid& grid = {});
};

/// Reads one value per step from a profile file. Lines hold either a value or
/// `step,value`; a non-numeric first line is taken as a header and `#` starts
/// a comment. Values must lie in [0, 1].
std::vector<double> read_profile_file(const std::filesystem::path& path, int steps = 96);

}  // namespace pvrag::sim
