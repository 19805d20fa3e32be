#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include <cstdlib>
#include <fstream>
#include <iterator>
#include <json.hpp>

#include "pvrag/assessor/backend.hpp"

namespace pvrag::assessor {

namespace {

using nlohmann::json;

bool is_url(const std::string& ref) {
  return ref.starts_with("http://") || ref.starts_with("https://") || ref.starts_with("data:");
}

std::string image_payload(const std::string& ref) {
  if (is_url(ref)) return ref;
  std::ifstream in(ref, std::ios::binary);
  if (!in) throw BackendError("cannot read image " + ref);
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return httplib::detail::base64_encode(bytes);
}

}  // namespace

void RemoteBackendConfig::apply_environment() {
  if (const char* v = std::getenv("PVRAG_BACKEND_URL"); v && *v) url = v;
  if (const char* v = std::getenv("PVRAG_API_KEY"); v && *v) api_key = v;
  if (const char* v = std::getenv("PVRAG_MODEL"); v && *v) model = v;
}

RemoteBackend::RemoteBackend(RemoteBackendConfig config) : config_(std::move(config)) {
  const auto scheme_end = config_.url.find("://");
  if (config_.url.empty() || scheme_end == std::string::npos) {
    throw BackendError("remote backend URL must look like http(s)://host[:port]/path (got \"" +
                       config_.url + "\")");
  }
  const auto path_start = config_.url.find('/', scheme_end + 3);
  scheme_host_port_ = config_.url.substr(0, path_start);
  path_ = path_start == std::string::npos ? "/" : config_.url.substr(path_start);
}

std::string RemoteBackend::request_body(const AssessmentRequest& request) const {
  json images = json::array();
  if (!request.query_image_ref.empty()) images.push_back(image_payload(request.query_image_ref));
  if (config_.attach_reference_images) {
    for (const auto& ref : request.reference_image_refs) {
      if (!ref.empty()) images.push_back(image_payload(ref));
    }
  }
  nlohmann::ordered_json body;
  body["model"] = config_.model;
  body["prompt"] = request.prompt_text;
  body["images"] = images;
  body["max_output_tokens"] = config_.max_output_tokens;
  body["temperature"] = config_.temperature;
  return body.dump();
}

std::string RemoteBackend::complete(const AssessmentRequest& request) {
  const std::string body = request_body(request);

  httplib::Client client(scheme_host_port_);
  client.set_connection_timeout(config_.timeout);
  client.set_read_timeout(config_.timeout);
  client.set_write_timeout(config_.timeout);
  httplib::Headers headers;
  if (!config_.api_key.empty()) {
    headers.emplace("Authorization", "Bearer " + config_.api_key);
  }

  auto res = client.Post(path_, headers, body, "application/json");
  if (!res) {
    audit(request.query_id, body, 0, httplib::to_string(res.error()));
    throw TransportError("request to " + config_.url + " failed: " + httplib::to_string(res.error()));
  }
  audit(request.query_id, body, res->status, res->body);
  if (res->status == 429 || res->status >= 500) {
    throw TransportError("backend returned HTTP " + std::to_string(res->status));
  }
  if (res->status < 200 || res->status >= 300) {
    throw BackendError("backend returned HTTP " + std::to_string(res->status) + ": " + res->body);
  }
  const json parsed = json::parse(res->body, nullptr, /*allow_exceptions=*/false);
  if (parsed.is_discarded() || !parsed.is_object() || !parsed.contains("output_text") ||
      !parsed["output_text"].is_string()) {
    throw BackendError("backend response lacks a string output_text field");
  }
  return parsed["output_text"].get<std::string>();
}

void RemoteBackend::audit(const std::string& query_id, const std::string& body, int status,
                          const std::string& response) const {
  if (!config_.audit_log) return;
  nlohmann::ordered_json record;
  record["query_id"] = query_id;
  record["backend"] = name();
  record["url"] = config_.url;
  record["request"] = json::parse(body);
  record["status"] = status;
  record["response"] = response;
  std::lock_guard lock(audit_mutex_);
  std::ofstream out(*config_.audit_log, std::ios::app);
  out << record.dump() << '\n';
}

}  // namespace pvrag::assessor
