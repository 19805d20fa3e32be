#include <json.hpp>
#include <map>

#include "pvrag/assessor/backend.hpp"

namespace pvrag::assessor {

namespace {

// Most frequent value; ties resolved by first occurrence in `values`, which is
// ordered by descending similarity.
template <typename T>
T majority(const std::vector<T>& values) {
  std::map<T, std::size_t> counts;
  for (const auto& v : values) ++counts[v];
  T best = values.front();
  std::size_t best_count = 0;
  for (const auto& v : values) {
    if (counts[v] > best_count) {
      best = v;
      best_count = counts[v];
    }
  }
  return best;
}

}  // namespace

PVDescriptor MockBackend::decide(const AssessmentRequest& request) {
  const auto& refs = request.references;
  if (refs.empty()) return negative_descriptor("mock: no references");

  const std::string explanation = "mock: majority of " + std::to_string(refs.size()) + " references";
  std::size_t positives = 0;
  for (const auto& r : refs) positives += r.first.label.presence ? 1 : 0;
  const std::size_t negatives = refs.size() - positives;
  const bool presence =
      positives == negatives ? refs.front().first.label.presence : positives > negatives;
  if (!presence) return negative_descriptor(explanation);

  std::vector<QuantityInterval> quantities;
  std::vector<LocationLabel> locations;
  for (const auto& r : refs) {
    if (r.first.label.presence) {
      quantities.push_back(r.first.label.quantity);
      locations.push_back(r.first.label.location);
    }
  }
  return PVDescriptor{true, majority(quantities), majority(locations), explanation};
}

std::string MockBackend::complete(const AssessmentRequest& request) {
  const auto d = decide(request);
  nlohmann::ordered_json out;
  out["presence"] = d.presence;
  out["quantity"] = std::string(to_string(d.quantity));
  out["location"] = std::string(to_string(d.location));
  out["explanation"] = d.explanation;
  return out.dump();
}

}  // namespace pvrag::assessor
