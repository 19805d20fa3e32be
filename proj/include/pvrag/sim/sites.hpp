#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "pvrag/core/descriptor.hpp"
#include "pvrag/grid/network.hpp"

namespace pvrag::sim {

struct SiteRecord {
  std::string site_id;
  int bus = 0;  // case-file bus id
  QuantityInterval quantity = QuantityInterval::OneToFive;

  bool operator==(const SiteRecord&) const = default;
};

using SiteList = std::vector<SiteRecord>;

/// Throws when a site is on an unknown bus, has an NA quantity, or repeats an id.
void validate_sites(const SiteList& sites, const grid::Network& net);

/// CSV with header `site_id,bus,quantity`.
SiteList read_sites(const std::filesystem::path& path);
void write_sites(const std::filesystem::path& path, const SiteList& sites);

/// Relative weights of the four non-NA intervals in ascending order.
using IntervalWeights = std::array<double, 4>;

/// `count` sites with intervals drawn from `weights` and buses drawn uniformly
/// over the PQ buses. Site i depends only on (seed, i).
SiteList synthetic_sites(const grid::Network& net, std::size_t count, std::uint64_t seed,
                         const IntervalWeights& weights = {1.0, 1.0, 1.0, 1.0});

/// Bus id -> sorted neighbour bus ids over in-service branches.
using BusAdjacency = std::map<int, std::vector<int>>;
BusAdjacency bus_adjacency(const grid::Network& net);

}  // namespace pvrag::sim
