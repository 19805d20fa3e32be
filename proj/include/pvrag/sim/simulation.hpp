#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "pvrag/core/errors.hpp"
#include "pvrag/grid/power_flow.hpp"
#include "pvrag/sim/profiles.hpp"
#include "pvrag/sim/scenario.hpp"

namespace pvrag::sim {

class SimulationError : public Error {
 public:
  SimulationError(const std::string& model, int step, const std::string& cause);
  const std::string& model() const noexcept { return model_; }
  int step() const noexcept { return step_; }

 private:
  std::string model_;
  int step_;
};

struct SimulationResult {
  TimeGrid grid;
  std::vector<std::string> models;  // "true" first
  std::vector<int> bus_ids;
  double kappa = 0.0;
  std::vector<std::vector<double>> capacities_kw;      // [model][bus]
  std::vector<double> total_capacity_mw;               // [model]
  std::vector<std::vector<double>> net_load_mw;        // [model][step]
  std::vector<std::vector<std::vector<double>>> v_mag_pu;  // [model][step][bus]

  std::size_t model_index(const std::string& name) const;
};

struct SimulationOptions {
  grid::PowerFlowOptions power_flow;
  unsigned threads = 0;  // 0: hardware concurrency
};

/// Solves one power flow per (model, step) with demands
/// alpha_load * load(t) * nominal minus pv(t) * scaled capacity.
SimulationResult run_day_simulation(const grid::Network& net, const std::vector<ModelSites>& models,
                                    const ScenarioConfig& cfg, const DayProfiles& profiles = DayProfiles::defaults(),
                                    const SimulationOptions& opts = {});

/// Injects errors for every configured model and runs the day.
SimulationResult simulate_scenario(const grid::Network& net, const SiteList& true_sites,
                                   const ScenarioConfig& cfg,
                                   const DayProfiles& profiles = DayProfiles::defaults(),
                                   const SimulationOptions& opts = {});

double rmse(const std::vector<double>& traj, const std::vector<double>& truth);

/// Mean absolute percentage error over steps with |truth| >= eps_frac * max |truth|.
/// Empty when no step qualifies.
std::optional<double> mape(const std::vector<double>& traj, const std::vector<double>& truth,
                           double eps_frac = 0.05);

/// Elementwise |v - v_true|, same [step][bus] shape as the inputs.
std::vector<std::vector<double>> voltage_deviation(const std::vector<std::vector<double>>& v,
                                                   const std::vector<std::vector<double>>& v_true);

struct ModelMetrics {
  std::string model;
  double total_capacity_mw = 0.0;
  std::optional<double> rmse_mw;   // absent for the true model
  std::optional<double> mape_pct;  // absent for the true model or when undefined
  double max_voltage_dev_pu = 0.0;
};

/// One row per model in result order, the true model first.
std::vector<ModelMetrics> compute_metrics(const SimulationResult& result, double eps_frac = 0.05);

/// Writes netload.csv, metrics.csv and voltage_dev_<model>.csv per non-true model.
/// Returns the paths written.
std::vector<std::filesystem::path> emit_simulation_report(const SimulationResult& result,
                                                          const std::vector<ModelMetrics>& metrics,
                                                          const std::filesystem::path& out_dir);

/// File-name-safe form of a model name.
std::string model_slug(const std::string& model);

}  // namespace pvrag::sim
