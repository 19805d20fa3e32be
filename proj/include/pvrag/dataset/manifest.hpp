#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "pvrag/core/descriptor.hpp"
#include "pvrag/index/embedding_file.hpp"
#include "pvrag/index/vector_index.hpp"

namespace pvrag::dataset {

enum class Split { Eval, Reference };

std::string_view to_string(Split s);
Split parse_split(std::string_view text);

/// One labelled rooftop image.
struct ManifestRecord {
  std::string id;
  std::string city;
  std::string continent;
  Split split = Split::Eval;
  PVDescriptor label;          // ground truth; explanation may be empty
  std::string embedding_ref;   // id in the embedding file; empty means `id`
  std::string image_ref;       // optional path

  const std::string& embedding_key() const { return embedding_ref.empty() ? id : embedding_ref; }
};

/// Column order written by write_manifest. load_manifest maps columns by header name.
inline constexpr std::string_view kManifestColumns[] = {
    "id",       "city",     "continent",   "split",         "presence",
    "quantity", "location", "explanation", "embedding_ref", "image_ref"};

/// Reads a tab-separated manifest with a header line. Records are validated;
/// errors carry the line number. Duplicate ids are rejected.
std::vector<ManifestRecord> load_manifest(const std::filesystem::path& path);
void write_manifest(const std::filesystem::path& path, const std::vector<ManifestRecord>& records);

struct RegionSplit {
  std::string city;
  std::set<std::string> eval_ids;
  std::set<std::string> reference_ids;
};

/// Expected per-city split sizes.
struct SplitPattern {
  std::size_t eval = 240;
  std::size_t reference = 240;
};

struct SplitReport {
  std::vector<RegionSplit> splits;  // sorted by city
  std::vector<std::string> warnings;
  /// Cities whose counts differ from the expected pattern (when one was given).
  std::vector<std::string> pattern_violations;
};

/// Groups records by city. Throws SplitViolation listing ids that appear in
/// both splits of a city.
SplitReport validate_split(const std::vector<ManifestRecord>& records,
                           std::optional<SplitPattern> pattern = std::nullopt);

/// Index over the REFERENCE records, optionally without one city. Embeddings are
/// normalized on insertion.
index::VectorIndex build_reference_index(const std::vector<ManifestRecord>& records,
                                         const index::EmbeddingBatch& embeddings,
                                         const std::optional<std::string>& excluded_city = {});

/// Looks up (and normalizes) the embedding of one record.
index::Embedding record_embedding(const ManifestRecord& record,
                                  const index::EmbeddingBatch& embeddings);

}  // namespace pvrag::dataset
