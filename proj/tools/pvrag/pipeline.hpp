#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pvrag/assessor/assessor.hpp"
#include "pvrag/dataset/manifest.hpp"
#include "pvrag/evaluation/aggregate.hpp"
#include "pvrag/index/embedding_file.hpp"

namespace pvrag::cli {

struct Dataset {
  std::vector<dataset::ManifestRecord> records;
  index::EmbeddingBatch embeddings;
};

Dataset load_dataset(const std::filesystem::path& manifest, const std::filesystem::path& embeddings);

struct RunSpec {
  assessor::AssessmentMode mode = assessor::AssessmentMode::rag(3);
  bool leave_city_out = false;  // exclude each query's own city from retrieval
  std::size_t jobs = 1;
  assessor::AssessOptions options;
};

/// Assesses every EVAL record (optionally only those of one city) against the
/// given reference index. Records come back in manifest order.
evaluation::Run run_assessment(const Dataset& data, const index::VectorIndex& references,
                               assessor::AssessmentBackend& backend, const RunSpec& spec,
                               const std::optional<std::string>& only_city = std::nullopt);

/// Overall accuracy per task, averaged over runs.
std::map<evaluation::Task, double> overall_accuracy(const std::vector<evaluation::Run>& runs);

/// Predictions CSV: run,id,city,presence,quantity,location,explanation.
void write_predictions(const std::filesystem::path& path, const std::vector<evaluation::Run>& runs);

struct Prediction {
  std::string id;
  PVDescriptor descriptor;
};

/// Run number -> predictions in file order.
std::map<int, std::vector<Prediction>> read_predictions(const std::filesystem::path& path);

/// Joins predictions with manifest ground truth. Unknown ids are an error.
std::vector<evaluation::Run> score_predictions(const std::map<int, std::vector<Prediction>>& predictions,
                                               const std::vector<dataset::ManifestRecord>& records);

}  // namespace pvrag::cli
