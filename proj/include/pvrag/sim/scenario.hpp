#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pvrag/grid/network.hpp"
#include "pvrag/sim/sites.hpp"

namespace pvrag::sim {

inline constexpr const char* kTrueModel = "true";

struct ModelAccuracy {
  std::string name;
  double quantity_accuracy = 1.0;  // a_q
  double location_accuracy = 1.0;  // a_l
};

/// Overall quantity and location accuracies of the three assessed models.
std::vector<ModelAccuracy> default_models();

struct ScenarioConfig {
  double alpha_load = 1.3;
  double penetration = 0.6;
  double per_panel_kw = 0.4;
  double under_bias = 0.75;
  std::uint64_t seed = 1;
  double mape_epsilon_frac = 0.05;
  std::vector<ModelAccuracy> models;

  /// Throws on out-of-range parameters or a model named "true" / repeated.
  void validate() const;
};

/// Perturbs quantity and bus of every site. Draws come from a stream keyed by
/// (seed, site id), so a site's outcome does not depend on the other sites.
/// The same draws are used for every accuracy pair: a site that is wrong at
/// some accuracy stays wrong at any lower one.
SiteList inject_errors(const SiteList& sites, const BusAdjacency& adjacency, double quantity_accuracy,
                       double location_accuracy, double under_bias, std::uint64_t seed);

struct ModelSites {
  std::string name;
  SiteList sites;
};

struct CapacityScaling {
  double kappa = 0.0;
  std::vector<std::vector<double>> capacities_kw;  // [model][bus position], scaled
  std::vector<double> total_capacity_mw;           // [model]
};

/// Aggregates site capacities per bus and scales every model by the common
/// factor that makes the true fleet's peak output equal
/// penetration * alpha_load * total nominal demand. The model named "true"
/// must be present.
CapacityScaling aggregate_and_scale(const std::vector<ModelSites>& models, const grid::Network& net,
                                    const ScenarioConfig& cfg);

}  // namespace pvrag::sim
