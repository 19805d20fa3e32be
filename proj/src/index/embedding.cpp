#include "pvrag/index/embedding.hpp"

#include <cmath>
#include <string>

#include "pvrag/core/errors.hpp"

namespace pvrag::index {

namespace {

template <typename T>
void require_same_dimension(std::span<const T> a, std::span<const T> b) {
  if (a.size() != b.size()) {
    throw Error("embedding dimension mismatch: " + std::to_string(a.size()) + " vs " +
                std::to_string(b.size()));
  }
}

template <typename T>
double norm_impl(std::span<const T> v) {
  double sum = 0.0;
  for (T x : v) sum += static_cast<double>(x) * static_cast<double>(x);
  return std::sqrt(sum);
}

template <typename T>
double distance_impl(std::span<const T> a, std::span<const T> b) {
  require_same_dimension(a, b);
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
    sum += d * d;
  }
  return std::sqrt(sum);
}

template <typename T>
double cosine_impl(std::span<const T> a, std::span<const T> b) {
  require_same_dimension(a, b);
  double dot = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += static_cast<double>(a[i]) * static_cast<double>(b[i]);
  }
  return dot / (norm_impl(a) * norm_impl(b));
}

}  // namespace

double l2_norm(std::span<const float> v) { return norm_impl(v); }
double l2_norm(std::span<const double> v) { return norm_impl(v); }

bool is_normalized(std::span<const float> v, double tolerance) {
  return std::abs(l2_norm(v) - 1.0) <= tolerance;
}

Embedding normalize(std::span<const float> v) {
  const double norm = l2_norm(v);
  if (!(norm > 0.0) || !std::isfinite(norm)) throw Error("cannot normalize zero embedding");
  std::vector<float> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    out[i] = static_cast<float>(static_cast<double>(v[i]) / norm);
  }
  return Embedding(std::move(out));
}

double distance(std::span<const float> a, std::span<const float> b) { return distance_impl(a, b); }
double distance(std::span<const double> a, std::span<const double> b) {
  return distance_impl(a, b);
}

double cosine(std::span<const float> a, std::span<const float> b) { return cosine_impl(a, b); }
double cosine(std::span<const double> a, std::span<const double> b) { return cosine_impl(a, b); }

double similarity(std::span<const float> a, std::span<const float> b) {
  return similarity_from_distance(distance(a, b));
}

}  // namespace pvrag::index
