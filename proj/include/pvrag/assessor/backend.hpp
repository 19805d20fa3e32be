#pragma once

#include <chrono>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "pvrag/assessor/prompt.hpp"
#include "pvrag/core/errors.hpp"

namespace pvrag::assessor {

/// Network-level failure (connection refused, timeout, 5xx, 429). Retryable.
class TransportError : public Error {
 public:
  using Error::Error;
};

/// The backend could not produce an output (transport retries exhausted, or a
/// non-retryable protocol failure).
class BackendError : public Error {
 public:
  using Error::Error;
};

struct AssessmentRequest {
  std::string query_id;
  std::string query_image_ref;  // path or URL; may be empty
  std::vector<ScoredReference> references;  // empty in plain mode, descending similarity
  std::vector<std::string> reference_image_refs;  // parallel to references; entries may be empty
  std::string prompt_text;
};

/// Request -> raw model text. Implementations must be safe to call
/// concurrently.
class AssessmentBackend {
 public:
  virtual ~AssessmentBackend() = default;
  virtual std::string name() const = 0;
  /// Throws TransportError for retryable failures, BackendError otherwise.
  virtual std::string complete(const AssessmentRequest& request) = 0;
};

/// Deterministic offline stand-in for the remote model.
///
/// Without references it always answers "no PV". With references it takes a
/// majority vote: presence by strict majority (ties go to the most similar
/// reference), then quantity and location by majority among the references
/// that agree with the voted presence (ties again go to the most similar one).
class MockBackend final : public AssessmentBackend {
 public:
  std::string name() const override { return "mock"; }
  std::string complete(const AssessmentRequest& request) override;

  /// The descriptor the mock answers with, before serialization.
  static PVDescriptor decide(const AssessmentRequest& request);
};

struct RemoteBackendConfig {
  std::string url;  // e.g. https://host/v1/assess
  std::string api_key;
  std::string model = "gpt-4o";
  double temperature = 0.0;
  int max_output_tokens = 512;
  bool attach_reference_images = false;
  std::chrono::seconds timeout{60};
  std::optional<std::filesystem::path> audit_log;

  /// Fills url/api_key/model from PVRAG_BACKEND_URL, PVRAG_API_KEY, PVRAG_MODEL
  /// when those are set.
  void apply_environment();
};

/// HTTP(S) client for the assessment service.
///
/// Request body:  {"model", "prompt", "images": [...], "max_output_tokens", "temperature"}
/// Response body: {"output_text", "usage"}
/// Local image paths are sent base64-encoded; http(s) URLs are passed through.
class RemoteBackend final : public AssessmentBackend {
 public:
  explicit RemoteBackend(RemoteBackendConfig config);
  std::string name() const override { return "remote:" + config_.model; }
  std::string complete(const AssessmentRequest& request) override;

  /// The JSON body sent for `request` (exposed for tests and auditing).
  std::string request_body(const AssessmentRequest& request) const;

 private:
  void audit(const std::string& query_id, const std::string& body, int status,
             const std::string& response) const;

  RemoteBackendConfig config_;
  std::string scheme_host_port_;
  std::string path_;
  mutable std::mutex audit_mutex_;
};

}  // namespace pvrag::assessor
