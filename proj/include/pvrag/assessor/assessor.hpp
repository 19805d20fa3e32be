#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pvrag/assessor/backend.hpp"
#include "pvrag/assessor/prompt.hpp"
#include "pvrag/index/vector_index.hpp"

namespace pvrag::assessor {

/// Plain (no references), similarity retrieval, or random references.
struct AssessmentMode {
  enum class Kind { Plain, Rag, Random };

  Kind kind = Kind::Plain;
  std::size_t k = 0;
  std::uint64_t seed = 0;

  static AssessmentMode plain() { return {Kind::Plain, 0, 0}; }
  static AssessmentMode rag(std::size_t k);
  static AssessmentMode random(std::size_t k, std::uint64_t seed);

  std::string label() const;  // "plain", "rag(3)", "random(3,seed=7)"
};

struct AssessmentResult {
  std::string query_id;
  PVDescriptor descriptor;
  std::string raw_output;
  std::string backend_name;
  std::chrono::milliseconds latency{0};
  AssessmentRequest request;
};

/// Parsing or validation of the backend output failed. The raw text is kept.
class AssessmentError : public Error {
 public:
  AssessmentError(const std::string& message, std::string raw_output)
      : Error(message), raw_output_(std::move(raw_output)) {}
  const std::string& raw_output() const noexcept { return raw_output_; }

 private:
  std::string raw_output_;
};

/// Exponential backoff applied to TransportError only.
struct RetryPolicy {
  int max_attempts = 3;
  std::chrono::milliseconds initial_delay{500};
  double multiplier = 2.0;
};

struct AssessOptions {
  PromptTemplates templates = PromptTemplates::defaults();
  RetryPolicy retry;
  /// Leave-one-out: references from this city are never retrieved.
  std::optional<std::string> excluded_city;
  /// Optional id -> image path/URL lookup for reference images.
  std::function<std::string(const std::string&)> reference_image;
};

struct AssessmentQuery {
  std::string id;
  std::vector<float> embedding;  // normalized on use
  std::string image_ref;
};

/// Retrieves references according to `mode` (the query id itself is always
/// excluded), builds the prompt, calls the backend once plus transport retries,
/// and parses the output into a validated descriptor.
AssessmentResult assess(const AssessmentQuery& query, const index::VectorIndex& index,
                        const AssessmentMode& mode, AssessmentBackend& backend,
                        const AssessOptions& options = {});

/// The request assess() would send, without calling a backend.
AssessmentRequest build_request(const AssessmentQuery& query, const index::VectorIndex& index,
                                const AssessmentMode& mode, const AssessOptions& options = {});

/// Runs assess() over `queries` with at most `max_in_flight` concurrent calls.
/// Results keep input order. The first failure (in input order) is rethrown
/// after all calls finish.
std::vector<AssessmentResult> assess_batch(const std::vector<AssessmentQuery>& queries,
                                           const index::VectorIndex& index,
                                           const AssessmentMode& mode, AssessmentBackend& backend,
                                           const AssessOptions& options = {},
                                           std::size_t max_in_flight = 1);

}  // namespace pvrag::assessor
