#include "pvrag/sim/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>

#include "pvrag/core/text.hpp"

namespace pvrag::sim {

SimulationError::SimulationError(const std::string& model, int step, const std::string& cause)
    : Error("model " + model + ", step " + std::to_string(step) + ": " + cause),
      model_(model),
      step_(step) {}

std::size_t SimulationResult::model_index(const std::string& name) const {
  auto it = std::find(models.begin(), models.end(), name);
  if (it == models.end()) throw Error("unknown model " + name);
  return static_cast<std::size_t>(it - models.begin());
}

SimulationResult run_day_simulation(const grid::Network& net, const std::vector<ModelSites>& models,
                                    const ScenarioConfig& cfg, const DayProfiles& profiles,
                                    const SimulationOptions& opts) {
  const TimeGrid grid;
  if (static_cast<int>(profiles.load.size()) != grid.steps ||
      static_cast<int>(profiles.pv.size()) != grid.steps) {
    throw Error("profiles must have " + std::to_string(grid.steps) + " values");
  }
  for (const auto& m : models) validate_sites(m.sites, net);

  // true model first, others in given order
  std::vector<const ModelSites*> ordered;
  for (const auto& m : models) {
    if (m.name == kTrueModel) ordered.insert(ordered.begin(), &m);
    else ordered.push_back(&m);
  }
  std::vector<ModelSites> sorted;
  for (auto* m : ordered) sorted.push_back(*m);
  const auto scaling = aggregate_and_scale(sorted, net, cfg);

  SimulationResult r;
  r.grid = grid;
  for (const auto& m : sorted) r.models.push_back(m.name);
  for (const auto& b : net.buses()) r.bus_ids.push_back(b.id);
  r.kappa = scaling.kappa;
  r.capacities_kw = scaling.capacities_kw;
  r.total_capacity_mw = scaling.total_capacity_mw;

  const auto nm = sorted.size();
  const auto nt = static_cast<std::size_t>(grid.steps);
  const auto nb = net.bus_count();
  r.net_load_mw.assign(nm, std::vector<double>(nt, 0.0));
  r.v_mag_pu.assign(nm, std::vector<std::vector<double>>(nt));

  const grid::PowerFlowSolver solver(net);
  const auto nominal = grid::nominal_demands(net);
  const std::size_t jobs = nm * nt;
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(jobs);

  auto worker = [&] {
    for (std::size_t j = next++; j < jobs; j = next++) {
      const auto m = j / nt;
      const auto t = j % nt;
      try {
        grid::DemandVector d(nb);
        const double load = cfg.alpha_load * profiles.load[t];
        const double pv = profiles.pv[t];
        for (std::size_t i = 0; i < nb; ++i) {
          d[i].p_mw = load * nominal[i].p_mw - pv * r.capacities_kw[m][i] / 1000.0;
          d[i].q_mvar = load * nominal[i].q_mvar;
        }
        auto sol = solver.solve(d, opts.power_flow);
        r.net_load_mw[m][t] = sol.slack_p_mw;
        r.v_mag_pu[m][t] = std::move(sol.v_mag_pu);
      } catch (const std::exception& e) {
        errors[j] = std::make_exception_ptr(SimulationError(r.models[m], static_cast<int>(t), e.what()));
      }
    }
  };

  unsigned threads = opts.threads ? opts.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, jobs));
  {
    std::vector<std::jthread> pool;
    for (unsigned i = 1; i < threads; ++i) pool.emplace_back(worker);
    worker();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return r;
}

SimulationResult simulate_scenario(const grid::Network& net, const SiteList& true_sites,
                                   const ScenarioConfig& cfg, const DayProfiles& profiles,
                                   const SimulationOptions& opts) {
  cfg.validate();
  validate_sites(true_sites, net);
  const auto adjacency = bus_adjacency(net);
  std::vector<ModelSites> models{{kTrueModel, true_sites}};
  for (const auto& m : cfg.models) {
    models.push_back({m.name, inject_errors(true_sites, adjacency, m.quantity_accuracy,
                                            m.location_accuracy, cfg.under_bias, cfg.seed)});
  }
  return run_day_simulation(net, models, cfg, profiles, opts);
}

double rmse(const std::vector<double>& traj, const std::vector<double>& truth) {
  if (traj.size() != truth.size()) throw Error("rmse: trajectory lengths differ");
  if (traj.empty()) throw Error("rmse: empty trajectory");
  double s = 0.0;
  for (std::size_t t = 0; t < traj.size(); ++t) {
    const double d = traj[t] - truth[t];
    s += d * d;
  }
  return std::sqrt(s / static_cast<double>(traj.size()));
}

std::optional<double> mape(const std::vector<double>& traj, const std::vector<double>& truth,
                           double eps_frac) {
  if (traj.size() != truth.size()) throw Error("mape: trajectory lengths differ");
  double peak = 0.0;
  for (double v : truth) peak = std::max(peak, std::abs(v));
  const double eps = eps_frac * peak;
  double s = 0.0;
  std::size_t n = 0;
  for (std::size_t t = 0; t < traj.size(); ++t) {
    if (std::abs(truth[t]) < eps || truth[t] == 0.0) continue;
    s += std::abs((traj[t] - truth[t]) / truth[t]);
    ++n;
  }
  if (n == 0) return std::nullopt;
  return 100.0 * s / static_cast<double>(n);
}

std::vector<std::vector<double>> voltage_deviation(const std::vector<std::vector<double>>& v,
                                                   const std::vector<std::vector<double>>& v_true) {
  if (v.size() != v_true.size()) throw Error("voltage_deviation: step counts differ");
  std::vector<std::vector<double>> out(v.size());
  for (std::size_t t = 0; t < v.size(); ++t) {
    if (v[t].size() != v_true[t].size()) throw Error("voltage_deviation: bus counts differ");
    out[t].resize(v[t].size());
    for (std::size_t i = 0; i < v[t].size(); ++i) out[t][i] = std::abs(v[t][i] - v_true[t][i]);
  }
  return out;
}

std::vector<ModelMetrics> compute_metrics(const SimulationResult& result, double eps_frac) {
  const auto ti = result.model_index(kTrueModel);
  std::vector<ModelMetrics> rows;
  for (std::size_t m = 0; m < result.models.size(); ++m) {
    ModelMetrics row;
    row.model = result.models[m];
    row.total_capacity_mw = result.total_capacity_mw[m];
    if (m != ti) {
      row.rmse_mw = rmse(result.net_load_mw[m], result.net_load_mw[ti]);
      row.mape_pct = mape(result.net_load_mw[m], result.net_load_mw[ti], eps_frac);
      for (const auto& step : voltage_deviation(result.v_mag_pu[m], result.v_mag_pu[ti])) {
        for (double d : step) row.max_voltage_dev_pu = std::max(row.max_voltage_dev_pu, d);
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string model_slug(const std::string& model) {
  std::string s;
  for (char c : model) {
    const bool keep = std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
    s += keep ? c : '_';
  }
  return s.empty() ? "_" : s;
}

namespace {

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error("cannot write " + p.string());
  return out;
}

std::string optional_fixed(const std::optional<double>& v, int decimals) {
  return v ? text::fixed(*v, decimals) : std::string();
}

}  // namespace

std::vector<std::filesystem::path> emit_simulation_report(const SimulationResult& result,
                                                          const std::vector<ModelMetrics>& metrics,
                                                          const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  std::vector<std::filesystem::path> written;
  const auto nt = static_cast<std::size_t>(result.grid.steps);

  {
    const auto p = out_dir / "netload.csv";
    auto out = open_out(p);
    out << "step,hour";
    for (const auto& m : result.models) out << ',' << text::csv_field(m);
    out << '\n';
    for (std::size_t t = 0; t < nt; ++t) {
      out << t + 1 << ',' << text::fixed(result.grid.tau_hours(static_cast<int>(t)), 2);
      for (const auto& traj : result.net_load_mw) out << ',' << text::fixed(traj[t], 6);
      out << '\n';
    }
    written.push_back(p);
  }
  {
    const auto p = out_dir / "metrics.csv";
    auto out = open_out(p);
    out << "model,total_capacity_mw,rmse_mw,mape_pct\n";
    for (const auto& row : metrics) {
      out << text::csv_field(row.model) << ',' << text::fixed(row.total_capacity_mw, 6) << ','
          << optional_fixed(row.rmse_mw, 6) << ',' << optional_fixed(row.mape_pct, 6) << '\n';
    }
    written.push_back(p);
  }
  const auto ti = result.model_index(kTrueModel);
  for (std::size_t m = 0; m < result.models.size(); ++m) {
    if (m == ti) continue;
    const auto dev = voltage_deviation(result.v_mag_pu[m], result.v_mag_pu[ti]);
    const auto p = out_dir / ("voltage_dev_" + model_slug(result.models[m]) + ".csv");
    auto out = open_out(p);
    out << "bus";
    for (std::size_t t = 0; t < nt; ++t) out << ',' << t + 1;
    out << '\n';
    for (std::size_t i = 0; i < result.bus_ids.size(); ++i) {
      out << result.bus_ids[i];
      for (std::size_t t = 0; t < nt; ++t) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.6e", dev[t][i]);
        out << ',' << buf;
      }
      out << '\n';
    }
    written.push_back(p);
  }
  return written;
}

}  // namespace pvrag::sim
