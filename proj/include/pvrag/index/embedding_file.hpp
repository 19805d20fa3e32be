#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <unordered_map>
#include <vector>

#include "pvrag/index/embedding.hpp"

namespace pvrag::index {

/// Contents of an embedding batch file ("PVEB"), the hand-off format between
/// the offline image encoder and the index builder.
///
/// Layout (little-endian):
///   "PVEB" | version u16 | dimension u16 | count u32 | metadata (u32 len + UTF-8)
///   then per record: id (u32 len + UTF-8) | dimension x f32
struct EmbeddingBatch {
  static constexpr std::uint16_t kFormatVersion = 1;

  std::size_t dimension = kDefaultDimension;
  std::string metadata;  // free-form provenance (JSON by convention), may be empty
  std::vector<std::pair<std::string, Embedding>> records;

  /// id -> position in `records`. Throws on duplicate ids.
  std::unordered_map<std::string, std::size_t> by_id() const;
};

EmbeddingBatch read_embedding_batch(const std::filesystem::path& path);
void write_embedding_batch(const std::filesystem::path& path, const EmbeddingBatch& batch);

}  // namespace pvrag::index
