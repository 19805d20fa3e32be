#include "pvrag/index/vector_index.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <unordered_set>

#include "pvrag/core/errors.hpp"
#include "pvrag/core/random.hpp"
#include "pvrag/index/binary_io.hpp"

namespace pvrag::index {

namespace {

constexpr std::string_view kMagic = "PVIX";

}  // namespace

EntryFilter exclude_city(std::string city) {
  return [city = std::move(city)](const ReferenceEntry& e) { return e.city != city; };
}

EntryFilter exclude_id(std::string id) {
  return [id = std::move(id)](const ReferenceEntry& e) { return e.id != id; };
}

EntryFilter both(EntryFilter a, EntryFilter b) {
  if (!a) return b;
  if (!b) return a;
  return [a = std::move(a), b = std::move(b)](const ReferenceEntry& e) { return a(e) && b(e); };
}

VectorIndex::VectorIndex(std::size_t dimension) : dimension_(dimension) {
  if (dimension == 0 || dimension > std::numeric_limits<std::uint16_t>::max()) {
    throw Error("index dimension must be in [1, 65535]");
  }
}

bool VectorIndex::contains(const std::string& id) const {
  return std::any_of(entries_.begin(), entries_.end(),
                     [&](const ReferenceEntry& e) { return e.id == id; });
}

void VectorIndex::add(ReferenceEntry entry) {
  if (entry.embedding.dimension() != dimension_) {
    throw Error("entry " + entry.id + ": embedding dimension " +
                std::to_string(entry.embedding.dimension()) + " does not match index dimension " +
                std::to_string(dimension_));
  }
  if (!is_normalized(entry.embedding.values())) {
    throw Error("entry " + entry.id + ": embedding is not normalized");
  }
  if (auto violation = validate_descriptor(entry.label)) {
    throw ConsistencyError("entry " + entry.id + ": " + *violation);
  }
  if (contains(entry.id)) throw Error("duplicate index entry id: " + entry.id);
  entries_.push_back(std::move(entry));
}

std::vector<std::size_t> VectorIndex::filtered_positions(const EntryFilter& filter) const {
  std::vector<std::size_t> positions;
  positions.reserve(entries_.size());
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (!filter || filter(entries_[i])) positions.push_back(i);
  }
  if (positions.empty()) throw Error("no reference entries match filter");
  return positions;
}

std::vector<RetrievalHit> VectorIndex::search_topk(std::span<const float> query, std::size_t k,
                                                   const EntryFilter& filter) const {
  if (k == 0) throw Error("k must be at least 1");
  if (query.size() != dimension_) {
    throw Error("query dimension " + std::to_string(query.size()) +
                " does not match index dimension " + std::to_string(dimension_));
  }
  const auto positions = filtered_positions(filter);

  struct Scored {
    double distance;
    std::size_t position;
  };
  std::vector<Scored> scored;
  scored.reserve(positions.size());
  for (std::size_t pos : positions) {
    scored.push_back({distance(query, entries_[pos].embedding.values()), pos});
  }
  const auto by_distance_then_id = [this](const Scored& a, const Scored& b) {
    if (a.distance != b.distance) return a.distance < b.distance;
    return entries_[a.position].id < entries_[b.position].id;
  };
  const std::size_t n = std::min(k, scored.size());
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(n), scored.end(),
                    by_distance_then_id);

  std::vector<RetrievalHit> hits;
  hits.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& s = scored[i];
    hits.push_back({entries_[s.position], s.distance, similarity_from_distance(s.distance)});
  }
  return hits;
}

std::vector<ReferenceEntry> VectorIndex::random_sample(std::size_t k, std::uint64_t seed,
                                                       const EntryFilter& filter) const {
  if (k == 0) throw Error("k must be at least 1");
  auto positions = filtered_positions(filter);
  if (positions.size() < k) {
    throw Error("random sample of " + std::to_string(k) + " requested from " +
                std::to_string(positions.size()) + " entries");
  }
  // Canonical order first so the sample depends on the seed only.
  std::sort(positions.begin(), positions.end(),
            [this](std::size_t a, std::size_t b) { return entries_[a].id < entries_[b].id; });

  rng::Engine engine(seed);
  for (std::size_t i = 0; i < k; ++i) {
    const auto j = i + rng::uniform_below(engine, positions.size() - i);
    std::swap(positions[i], positions[j]);
  }
  std::vector<ReferenceEntry> sample;
  sample.reserve(k);
  for (std::size_t i = 0; i < k; ++i) sample.push_back(entries_[positions[i]]);
  return sample;
}

void VectorIndex::save(const std::filesystem::path& path) const {
  ByteWriter w;
  w.bytes(kMagic);
  w.u16(kFormatVersion);
  w.u16(static_cast<std::uint16_t>(dimension_));
  w.u32(static_cast<std::uint32_t>(entries_.size()));
  for (const auto& e : entries_) {
    w.str(e.id);
    w.str(e.city);
    w.str(e.continent);
    w.str(presence_to_string(e.label.presence));
    w.str(to_string(e.label.quantity));
    w.str(to_string(e.label.location));
    w.str(e.label.explanation);
    for (float x : e.embedding.values()) w.f32(x);
  }
  w.write_file(path);
}

VectorIndex VectorIndex::load(const std::filesystem::path& path) {
  auto r = ByteReader::from_file(path);
  if (r.bytes(kMagic.size(), "magic") != kMagic) r.fail("bad magic (expected PVIX)");
  const auto version = r.u16("format version");
  if (version != kFormatVersion) {
    r.fail("unsupported index format version " + std::to_string(version));
  }
  const auto dimension = r.u16("dimension");
  if (dimension == 0) r.fail("dimension must be positive");
  const auto count = r.u32("entry count");

  VectorIndex index(dimension);
  for (std::uint32_t i = 0; i < count; ++i) {
    ReferenceEntry e;
    e.id = r.str("entry id");
    e.city = r.str("city");
    e.continent = r.str("continent");
    const auto offset = r.offset();
    try {
      e.label.presence = parse_presence(r.str("presence"));
      e.label.quantity = parse_quantity(r.str("quantity"));
      e.label.location = parse_location(r.str("location"));
    } catch (const VocabularyError& err) {
      throw FormatError(path.string() + ": entry " + e.id + " at byte offset " +
                        std::to_string(offset) + ": " + err.what());
    }
    e.label.explanation = r.str("explanation");
    std::vector<float> values(dimension);
    for (auto& v : values) v = r.f32("embedding");
    e.embedding = Embedding(std::move(values));
    index.add(std::move(e));
  }
  if (!r.at_end()) r.fail("trailing bytes after last entry");
  return index;
}

}  // namespace pvrag::index
