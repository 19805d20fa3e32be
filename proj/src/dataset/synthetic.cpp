#include "pvrag/dataset/synthetic.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>

#include "pvrag/core/errors.hpp"
#include "pvrag/core/random.hpp"

namespace pvrag::dataset {

namespace {

std::vector<double> random_unit(rng::Engine& engine, std::size_t dimension) {
  std::vector<double> v(dimension);
  double norm = 0.0;
  for (auto& x : v) {
    x = rng::standard_normal(engine);
    norm += x * x;
  }
  norm = std::sqrt(norm);
  for (auto& x : v) x /= norm;
  return v;
}

std::string slug(std::string_view city) {
  std::string out;
  for (char c : city) {
    const auto u = static_cast<unsigned char>(c);
    if (u < 0x80 && std::isalnum(u)) {
      out += static_cast<char>(std::tolower(u));
    } else if (c == ' ' && !out.empty() && out.back() != '-') {
      out += '-';
    }
  }
  return out;
}

// 0 = negative, then 4 quantities x 9 locations.
std::size_t label_class(const PVDescriptor& d) {
  if (!d.presence) return 0;
  return 1 + static_cast<std::size_t>(d.quantity) * kLocations.size() +
         static_cast<std::size_t>(d.location);
}

}  // namespace

const std::vector<Region>& study_regions() {
  static const std::vector<Region> regions = {
      {"Kuwait City", "Asia (Middle East)"},
      {"Sydney", "Oceania"},
      {"Cape Town", "Africa"},
      {"Oxford", "Europe"},
      {"S\xC3\xA3o Paulo", "South America"},
      {"Shanghai", "Asia (East Asia)"},
      {"Tempe", "North America"},
      {"Tacoma", "North America"},
      {"Seattle", "North America"},
      {"Orlando", "North America"},
      {"Osage Beach", "North America"},
      {"Harlem", "North America"},
  };
  return regions;
}

SynthDataset generate_synthetic_dataset(const SynthConfig& config) {
  if (config.cities == 0) throw Error("synthetic dataset needs at least one city");
  if (config.prevalence < 0.0 || config.prevalence > 1.0) {
    throw Error("prevalence must lie in [0, 1]");
  }
  if (config.dimension == 0) throw Error("dimension must be positive");

  rng::Engine engine(config.seed);
  const std::size_t n_classes = 1 + kOrderedIntervals.size() * kLocations.size();
  std::vector<std::vector<double>> class_dirs;
  for (std::size_t c = 0; c < n_classes; ++c) {
    class_dirs.push_back(random_unit(engine, config.dimension));
  }

  SynthDataset out;
  out.embeddings.dimension = config.dimension;
  char meta[160];
  std::snprintf(meta, sizeof meta,
                "{\"generator\":\"synthetic\",\"seed\":%llu,\"noise\":%.6g,\"city_weight\":%.6g}",
                static_cast<unsigned long long>(config.seed), config.noise, config.city_weight);
  out.embeddings.metadata = meta;

  const auto& regions = study_regions();
  const auto n_pos = static_cast<std::size_t>(
      std::llround(config.prevalence * static_cast<double>(config.per_split)));
  const double noise_scale = config.noise / std::sqrt(static_cast<double>(config.dimension));

  for (std::size_t c = 0; c < config.cities; ++c) {
    Region region = c < regions.size()
                        ? regions[c]
                        : Region{"City " + std::to_string(c + 1), "Synthetic"};
    const auto city_dir = random_unit(engine, config.dimension);
    const auto prefix = slug(region.city);

    for (Split split : {Split::Eval, Split::Reference}) {
      std::vector<bool> positive(config.per_split, false);
      for (std::size_t i = 0; i < n_pos; ++i) positive[i] = true;
      for (std::size_t i = positive.size(); i > 1; --i) {
        const auto j = rng::uniform_below(engine, i);
        const bool tmp = positive[i - 1];
        positive[i - 1] = positive[j];
        positive[j] = tmp;
      }

      for (std::size_t i = 0; i < config.per_split; ++i) {
        ManifestRecord r;
        char id[96];
        std::snprintf(id, sizeof id, "%s-%s-%04zu", prefix.c_str(),
                      split == Split::Eval ? "e" : "r", i);
        r.id = id;
        r.city = region.city;
        r.continent = region.continent;
        r.split = split;
        if (positive[i]) {
          r.label.presence = true;
          r.label.quantity = kOrderedIntervals[rng::uniform_below(engine, kOrderedIntervals.size())];
          r.label.location = kLocations[rng::uniform_below(engine, kLocations.size())];
          r.label.explanation = "synthetic positive";
        } else {
          r.label = negative_descriptor("synthetic negative");
        }

        const auto& dir = class_dirs[label_class(r.label)];
        std::vector<float> v(config.dimension);
        for (std::size_t k = 0; k < config.dimension; ++k) {
          v[k] = static_cast<float>(dir[k] + config.city_weight * city_dir[k] +
                                    noise_scale * rng::standard_normal(engine));
        }
        out.embeddings.records.emplace_back(r.id, index::normalize(v));
        out.records.push_back(std::move(r));
      }
    }
  }
  return out;
}

}  // namespace pvrag::dataset
