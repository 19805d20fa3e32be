#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "pvrag/core/descriptor.hpp"
#include "pvrag/index/embedding.hpp"

namespace pvrag::index {

/// A validated rooftop case in the reference repository.
struct ReferenceEntry {
  std::string id;
  std::string city;
  std::string continent;
  Embedding embedding;  // unit L2 norm
  PVDescriptor label;

  friend bool operator==(const ReferenceEntry&, const ReferenceEntry&) = default;
};

struct RetrievalHit {
  ReferenceEntry entry;
  double distance = 0.0;
  double similarity = 1.0;
};

/// Returns true for entries that may be retrieved.
using EntryFilter = std::function<bool(const ReferenceEntry&)>;

EntryFilter exclude_city(std::string city);
EntryFilter exclude_id(std::string id);
/// Conjunction; empty filters are ignored.
EntryFilter both(EntryFilter a, EntryFilter b);

/// Exact nearest-neighbour index over normalized embeddings.
///
/// Search is an exhaustive scan: results are ordered by ascending distance with
/// ties broken by ascending entry id, so they do not depend on insertion order.
/// The index is not internally synchronized; concurrent const calls are safe.
class VectorIndex {
 public:
  static constexpr std::uint16_t kFormatVersion = 1;

  explicit VectorIndex(std::size_t dimension = kDefaultDimension);

  /// Adds an entry. The embedding must be normalized and have the index
  /// dimension, the label must be consistent and the id unused.
  void add(ReferenceEntry entry);

  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  std::size_t dimension() const noexcept { return dimension_; }
  const std::vector<ReferenceEntry>& entries() const noexcept { return entries_; }
  bool contains(const std::string& id) const;

  /// The min(k, |filtered|) nearest entries to a normalized query.
  std::vector<RetrievalHit> search_topk(std::span<const float> query, std::size_t k,
                                        const EntryFilter& filter = {}) const;

  /// k distinct filtered entries drawn uniformly without replacement.
  std::vector<ReferenceEntry> random_sample(std::size_t k, std::uint64_t seed,
                                            const EntryFilter& filter = {}) const;

  void save(const std::filesystem::path& path) const;
  static VectorIndex load(const std::filesystem::path& path);

 private:
  std::vector<std::size_t> filtered_positions(const EntryFilter& filter) const;

  std::size_t dimension_;
  std::vector<ReferenceEntry> entries_;
};

}  // namespace pvrag::index
