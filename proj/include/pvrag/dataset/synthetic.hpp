#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pvrag/dataset/manifest.hpp"
#include "pvrag/index/embedding_file.hpp"

namespace pvrag::dataset {

struct Region {
  std::string city;
  std::string continent;
};

/// The twelve default regions with their continents.
const std::vector<Region>& study_regions();

/// Parameters of the seeded synthetic dataset generator.
///
/// Each city gets `per_split` EVAL and `per_split` REFERENCE records. PV
/// prevalence is stratified: both splits receive round(prevalence * per_split)
/// positive records. Positive labels draw quantity and location uniformly.
///
/// Embeddings are label-clustered: every distinct label (presence, quantity,
/// location) owns a random unit direction, each city adds a weaker direction of
/// its own, and isotropic Gaussian noise of total norm ~`noise` is added before
/// normalization. Larger noise means weaker label/neighbourhood correlation.
struct SynthConfig {
  std::size_t cities = 2;
  std::size_t per_split = 240;
  double prevalence = 0.5;
  std::size_t dimension = 512;
  double noise = 0.8;
  double city_weight = 0.3;
  std::uint64_t seed = 1;
};

struct SynthDataset {
  std::vector<ManifestRecord> records;
  index::EmbeddingBatch embeddings;
};

SynthDataset generate_synthetic_dataset(const SynthConfig& config);

}  // namespace pvrag::dataset
