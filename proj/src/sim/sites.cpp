#include "pvrag/sim/sites.hpp"

#include <array>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <set>

#include "pvrag/core/errors.hpp"
#include "pvrag/core/random.hpp"
#include "pvrag/core/text.hpp"

namespace pvrag::sim {

void validate_sites(const SiteList& sites, const grid::Network& net) {
  std::set<std::string> seen;
  for (const auto& s : sites) {
    if (!seen.insert(s.site_id).second) throw Error("duplicate site id " + s.site_id);
    if (!net.has_bus(s.bus)) {
      throw Error("site " + s.site_id + " is on unknown bus " + std::to_string(s.bus));
    }
    if (s.quantity == QuantityInterval::NA) throw Error("site " + s.site_id + " has NA quantity");
  }
}

SiteList read_sites(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open site file " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw FormatError(path.string() + ": empty site file");
  const auto header = text::parse_csv_line(text::trim(line));
  if (header != std::vector<std::string>{"site_id", "bus", "quantity"}) {
    throw FormatError(path.string() + ":1: expected header site_id,bus,quantity");
  }
  SiteList sites;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = text::trim(line);
    if (body.empty()) continue;
    const auto at = path.string() + ":" + std::to_string(line_no);
    const auto f = text::parse_csv_line(body);
    if (f.size() != 3) throw FormatError(at + ": expected 3 fields");
    SiteRecord s;
    s.site_id = f[0];
    try {
      std::size_t used = 0;
      s.bus = std::stoi(f[1], &used);
      if (used != f[1].size()) throw std::invalid_argument("bus");
    } catch (const std::exception&) {
      throw FormatError(at + ": malformed bus '" + f[1] + "'");
    }
    try {
      s.quantity = parse_quantity(f[2]);
    } catch (const VocabularyError& e) {
      throw VocabularyError(e.token(), at);
    }
    sites.push_back(std::move(s));
  }
  return sites;
}

void write_sites(const std::filesystem::path& path, const SiteList& sites) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write site file " + path.string());
  out << "site_id,bus,quantity\n";
  for (const auto& s : sites) {
    // quantity strings contain commas and are always quoted
    out << text::csv_field(s.site_id) << ',' << s.bus << ",\"" << to_string(s.quantity) << "\"\n";
  }
  if (!out) throw Error("failed writing site file " + path.string());
}

SiteList synthetic_sites(const grid::Network& net, std::size_t count, std::uint64_t seed,
                         const IntervalWeights& weights) {
  std::vector<int> pq;
  for (const auto& b : net.buses()) {
    if (b.kind == grid::BusKind::PQ) pq.push_back(b.id);
  }
  if (pq.empty()) throw Error("network has no PQ buses to host sites");
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  for (double w : weights) {
    if (!(w >= 0.0)) throw Error("interval weights must be non-negative");
  }
  if (!(total > 0.0)) throw Error("interval weights must not all be zero");

  SiteList sites;
  sites.reserve(count);
  const rng::CounterStream stream(seed, rng::hash_string("synthetic-sites"));
  for (std::size_t i = 0; i < count; ++i) {
    const double uq = stream.uniform(2 * i) * total;
    const double ub = stream.uniform(2 * i + 1);
    std::size_t qi = 0;
    double acc = weights[0];
    while (qi + 1 < weights.size() && uq >= acc) acc += weights[++qi];
    const auto bi = std::min(pq.size() - 1, static_cast<std::size_t>(ub * pq.size()));
    char id[32];
    std::snprintf(id, sizeof id, "site-%05zu", i);
    sites.push_back({id, pq[bi], kOrderedIntervals[qi]});
  }
  return sites;
}

BusAdjacency bus_adjacency(const grid::Network& net) {
  BusAdjacency adj;
  const auto& buses = net.buses();
  for (std::size_t i = 0; i < buses.size(); ++i) {
    auto& n = adj[buses[i].id];
    for (auto j : net.adjacency()[i]) n.push_back(buses[j].id);
    std::sort(n.begin(), n.end());
  }
  return adj;
}

}  // namespace pvrag::sim
