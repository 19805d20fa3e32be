#include "pvrag/assessor/assessor.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <thread>

#include "pvrag/assessor/parse.hpp"
#include "pvrag/core/random.hpp"

namespace pvrag::assessor {

AssessmentMode AssessmentMode::rag(std::size_t k) {
  if (k == 0) throw Error("rag mode needs k >= 1");
  return {Kind::Rag, k, 0};
}

AssessmentMode AssessmentMode::random(std::size_t k, std::uint64_t seed) {
  if (k == 0) throw Error("random mode needs k >= 1");
  return {Kind::Random, k, seed};
}

std::string AssessmentMode::label() const {
  switch (kind) {
    case Kind::Plain:
      return "plain";
    case Kind::Rag:
      return "rag(" + std::to_string(k) + ")";
    case Kind::Random:
      return "random(" + std::to_string(k) + ",seed=" + std::to_string(seed) + ")";
  }
  return "?";
}

AssessmentRequest build_request(const AssessmentQuery& query, const index::VectorIndex& index,
                                const AssessmentMode& mode, const AssessOptions& options) {
  AssessmentRequest request;
  request.query_id = query.id;
  request.query_image_ref = query.image_ref;

  if (mode.kind == AssessmentMode::Kind::Plain) {
    request.prompt_text = build_autolabel_prompt(options.templates, query.id);
    return request;
  }

  const auto normalized = index::normalize(query.embedding);
  index::EntryFilter filter = index::exclude_id(query.id);
  if (options.excluded_city) filter = index::both(filter, index::exclude_city(*options.excluded_city));

  if (mode.kind == AssessmentMode::Kind::Rag) {
    for (auto& hit : index.search_topk(normalized.values(), mode.k, filter)) {
      request.references.emplace_back(std::move(hit.entry), hit.similarity);
    }
  } else {
    for (auto& entry : index.random_sample(mode.k, rng::mix64(mode.seed ^ rng::hash_string(query.id)), filter)) {
      const double sim = index::similarity(normalized.values(), entry.embedding.values());
      request.references.emplace_back(std::move(entry), sim);
    }
    std::stable_sort(request.references.begin(), request.references.end(),
                     [](const ScoredReference& a, const ScoredReference& b) {
                       if (a.second != b.second) return a.second > b.second;
                       return a.first.id < b.first.id;
                     });
  }
  for (const auto& [entry, sim] : request.references) {
    request.reference_image_refs.push_back(options.reference_image ? options.reference_image(entry.id)
                                                                   : std::string{});
  }
  request.prompt_text = build_rag_prompt(options.templates, query.id, request.references);
  return request;
}

AssessmentResult assess(const AssessmentQuery& query, const index::VectorIndex& index,
                        const AssessmentMode& mode, AssessmentBackend& backend,
                        const AssessOptions& options) {
  AssessmentResult result;
  result.query_id = query.id;
  result.backend_name = backend.name();
  result.request = build_request(query, index, mode, options);

  const auto start = std::chrono::steady_clock::now();
  auto delay = options.retry.initial_delay;
  const int attempts = std::max(1, options.retry.max_attempts);
  for (int attempt = 1;; ++attempt) {
    try {
      result.raw_output = backend.complete(result.request);
      break;
    } catch (const TransportError& e) {
      if (attempt >= attempts) {
        throw BackendError("backend " + backend.name() + " failed after " +
                           std::to_string(attempts) + " attempts for " + query.id + ": " +
                           e.what());
      }
      std::this_thread::sleep_for(delay);
      delay = std::chrono::milliseconds(
          static_cast<long long>(static_cast<double>(delay.count()) * options.retry.multiplier));
    }
  }
  result.latency = std::chrono::duration_cast<std::chrono::milliseconds>(
      std::chrono::steady_clock::now() - start);

  try {
    result.descriptor = parse_structured_output(result.raw_output);
  } catch (const Error& e) {
    throw AssessmentError("cannot use output for " + query.id + ": " + e.what(), result.raw_output);
  }
  return result;
}

std::vector<AssessmentResult> assess_batch(const std::vector<AssessmentQuery>& queries,
                                           const index::VectorIndex& index,
                                           const AssessmentMode& mode, AssessmentBackend& backend,
                                           const AssessOptions& options,
                                           std::size_t max_in_flight) {
  std::vector<AssessmentResult> results(queries.size());
  std::vector<std::exception_ptr> errors(queries.size());
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t i = next++; i < queries.size(); i = next++) {
      try {
        results[i] = assess(queries[i], index, mode, backend, options);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };

  const std::size_t n_workers = std::clamp<std::size_t>(max_in_flight, 1, std::max<std::size_t>(queries.size(), 1));
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < n_workers; ++w) pool.emplace_back(worker);
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

}  // namespace pvrag::assessor
