#include "pvrag/sim/scenario.hpp"

#include <algorithm>
#include <set>

#include "pvrag/core/errors.hpp"
#include "pvrag/core/random.hpp"

namespace pvrag::sim {

namespace {

bool is_probability(double p) { return p >= 0.0 && p <= 1.0; }

std::size_t true_model_index(const std::vector<ModelSites>& models) {
  for (std::size_t m = 0; m < models.size(); ++m) {
    if (models[m].name == kTrueModel) return m;
  }
  throw Error("true-model site list is missing");
}

}  // namespace

std::vector<ModelAccuracy> default_models() {
  return {{"RAG", 0.862, 0.802}, {"GPT-4o", 0.834, 0.795}, {"GPT-5.2", 0.677, 0.710}};
}

void ScenarioConfig::validate() const {
  if (!(alpha_load > 1.0)) throw Error("alpha_load must be greater than 1");
  if (!(penetration > 0.0 && penetration <= 1.0)) throw Error("penetration must lie in (0, 1]");
  if (!(per_panel_kw > 0.0)) throw Error("per_panel_kw must be positive");
  if (!is_probability(under_bias)) throw Error("under_bias must lie in [0, 1]");
  if (!(mape_epsilon_frac >= 0.0)) throw Error("mape_epsilon_frac must be non-negative");
  std::set<std::string> names;
  for (const auto& m : models) {
    if (m.name.empty()) throw Error("model name must not be empty");
    if (m.name == kTrueModel) throw Error("model name 'true' is reserved");
    if (!names.insert(m.name).second) throw Error("duplicate model " + m.name);
    if (!is_probability(m.quantity_accuracy) || !is_probability(m.location_accuracy)) {
      throw Error("accuracies of model " + m.name + " must lie in [0, 1]");
    }
  }
}

SiteList inject_errors(const SiteList& sites, const BusAdjacency& adjacency, double quantity_accuracy,
                       double location_accuracy, double under_bias, std::uint64_t seed) {
  if (!is_probability(quantity_accuracy) || !is_probability(location_accuracy) ||
      !is_probability(under_bias)) {
    throw Error("accuracies and under_bias must lie in [0, 1]");
  }
  SiteList out;
  out.reserve(sites.size());
  for (const auto& site : sites) {
    auto it = adjacency.find(site.bus);
    if (it == adjacency.end()) {
      throw Error("site " + site.site_id + " is on unknown bus " + std::to_string(site.bus));
    }
    const auto& neighbours = it->second;
    if (neighbours.empty() && location_accuracy < 1.0) {
      throw Error("site " + site.site_id + " is on isolated bus " + std::to_string(site.bus) +
                  "; location errors need an adjacent bus");
    }

    const rng::CounterStream stream(seed, rng::hash_string(site.site_id));
    SiteRecord r = site;
    if (!(stream.uniform(0) < quantity_accuracy)) {
      const auto [lower, upper] = neighbor_intervals(site.quantity);
      const bool down = stream.uniform(1) < under_bias;
      if (down) {
        r.quantity = lower ? *lower : *upper;
      } else {
        r.quantity = upper ? *upper : *lower;
      }
    }
    if (!(stream.uniform(2) < location_accuracy)) {
      const auto n = neighbours.size();
      const auto pick = std::min(n - 1, static_cast<std::size_t>(stream.uniform(3) * n));
      r.bus = neighbours[pick];
    }
    out.push_back(std::move(r));
  }
  return out;
}

CapacityScaling aggregate_and_scale(const std::vector<ModelSites>& models, const grid::Network& net,
                                    const ScenarioConfig& cfg) {
  const auto t = true_model_index(models);
  CapacityScaling result;
  std::vector<std::vector<double>> raw(models.size(), std::vector<double>(net.bus_count(), 0.0));
  // totals in site order: independent of bus assignment
  std::vector<double> site_totals_kw(models.size(), 0.0);
  for (std::size_t m = 0; m < models.size(); ++m) {
    for (const auto& s : models[m].sites) {
      const double c = site_capacity_kw(s.quantity, cfg.per_panel_kw);
      raw[m][net.bus_index(s.bus)] += c;
      site_totals_kw[m] += c;
    }
  }
  const double true_total_kw = site_totals_kw[t];
  if (!(true_total_kw > 0.0)) throw Error("cannot scale empty PV population");

  const double demand_kw = net.total_p_demand_mw() * 1000.0;
  result.kappa = cfg.penetration * cfg.alpha_load * demand_kw / true_total_kw;
  for (std::size_t m = 0; m < models.size(); ++m) {
    for (auto& c : raw[m]) c *= result.kappa;
    result.total_capacity_mw.push_back(result.kappa * site_totals_kw[m] / 1000.0);
  }
  result.capacities_kw = std::move(raw);
  return result;
}

}  // namespace pvrag::sim
