#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace pvrag::index {

inline constexpr std::size_t kDefaultDimension = 512;
inline constexpr double kNormTolerance = 1e-6;

/// Image embedding stored in single precision. Arithmetic on embeddings
/// accumulates in double.
class Embedding {
 public:
  Embedding() = default;
  explicit Embedding(std::vector<float> values) : values_(std::move(values)) {}

  std::size_t dimension() const noexcept { return values_.size(); }
  std::span<const float> values() const noexcept { return values_; }
  float operator[](std::size_t i) const { return values_[i]; }

  friend bool operator==(const Embedding&, const Embedding&) = default;

 private:
  std::vector<float> values_;
};

double l2_norm(std::span<const float> v);
double l2_norm(std::span<const double> v);
bool is_normalized(std::span<const float> v, double tolerance = kNormTolerance);

/// v / ||v||_2. Throws on a zero (or non-finite) vector.
Embedding normalize(std::span<const float> v);

/// Euclidean distance between two vectors of equal dimension. Both float
/// (stored) and double (query-side or test) inputs accumulate in double.
double distance(std::span<const float> a, std::span<const float> b);
double distance(std::span<const double> a, std::span<const double> b);

/// Cosine of the angle between a and b.
double cosine(std::span<const float> a, std::span<const float> b);
double cosine(std::span<const double> a, std::span<const double> b);

/// Reporting score in (0, 1]: 1 / (1 + d).
constexpr double similarity_from_distance(double d) noexcept { return 1.0 / (1.0 + d); }
double similarity(std::span<const float> a, std::span<const float> b);

}  // namespace pvrag::index
