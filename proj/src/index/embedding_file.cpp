#include "pvrag/index/embedding_file.hpp"

#include <cmath>
#include <limits>

#include "pvrag/core/errors.hpp"
#include "pvrag/index/binary_io.hpp"

namespace pvrag::index {

namespace {

constexpr std::string_view kMagic = "PVEB";

}  // namespace

std::unordered_map<std::string, std::size_t> EmbeddingBatch::by_id() const {
  std::unordered_map<std::string, std::size_t> out;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (!out.emplace(records[i].first, i).second) {
      throw Error("duplicate embedding id: " + records[i].first);
    }
  }
  return out;
}

EmbeddingBatch read_embedding_batch(const std::filesystem::path& path) {
  auto r = ByteReader::from_file(path);
  if (r.bytes(kMagic.size(), "magic") != kMagic) r.fail("bad magic (expected PVEB)");
  const auto version = r.u16("format version");
  if (version != EmbeddingBatch::kFormatVersion) {
    r.fail("unsupported embedding format version " + std::to_string(version));
  }
  EmbeddingBatch batch;
  batch.dimension = r.u16("dimension");
  if (batch.dimension == 0) r.fail("dimension must be positive");
  const auto count = r.u32("record count");
  batch.metadata = r.str("metadata");
  batch.records.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    std::string id = r.str("record id");
    std::vector<float> values(batch.dimension);
    for (auto& v : values) {
      v = r.f32("embedding");
      if (!std::isfinite(v)) r.fail("non-finite embedding value in record " + id);
    }
    batch.records.emplace_back(std::move(id), Embedding(std::move(values)));
  }
  if (!r.at_end()) r.fail("trailing bytes after last record");
  return batch;
}

void write_embedding_batch(const std::filesystem::path& path, const EmbeddingBatch& batch) {
  if (batch.dimension == 0 || batch.dimension > std::numeric_limits<std::uint16_t>::max()) {
    throw Error("embedding dimension must be in [1, 65535]");
  }
  (void)batch.by_id();
  ByteWriter w;
  w.bytes(kMagic);
  w.u16(EmbeddingBatch::kFormatVersion);
  w.u16(static_cast<std::uint16_t>(batch.dimension));
  w.u32(static_cast<std::uint32_t>(batch.records.size()));
  w.str(batch.metadata);
  for (const auto& [id, embedding] : batch.records) {
    if (embedding.dimension() != batch.dimension) {
      throw Error("record " + id + ": dimension mismatch vs header");
    }
    w.str(id);
    for (float x : embedding.values()) w.f32(x);
  }
  w.write_file(path);
}

}  // namespace pvrag::index
