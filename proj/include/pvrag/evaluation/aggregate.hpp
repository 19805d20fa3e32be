#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "pvrag/evaluation/metrics.hpp"

namespace pvrag::evaluation {

/// One evaluated record within one run.
struct ScoredRecord {
  std::string id;
  std::string city;
  PVDescriptor truth;
  PVDescriptor prediction;
};

using Run = std::vector<ScoredRecord>;

enum class Averaging { Micro, Macro };

inline constexpr std::string_view kOverall = "Overall";

struct AggregateRow {
  std::string city;  // kOverall for the aggregate row
  Task task = Task::Presence;
  double mean = 0.0;
  double std = 0.0;
  std::size_t n_records = 0;
  std::size_t n_runs = 0;

  friend bool operator==(const AggregateRow&, const AggregateRow&) = default;
};

/// Overall rows first, then cities in lexicographic order; tasks in
/// presence/quantity/location order within each city.
struct AggregateTable {
  std::vector<AggregateRow> rows;
};

/// Per-city accuracy per task (correct / total), averaged over runs with the
/// sample standard deviation. The overall row pools all records (micro) or
/// averages the city accuracies (macro). Throws RunMismatchError when runs do
/// not score the same record ids.
AggregateTable aggregate(const std::vector<Run>& runs, Averaging averaging = Averaging::Micro);

/// Presence precision/recall/F1/accuracy over all records, mean and std over
/// the runs where each metric is defined.
struct PresenceSummaryRow {
  std::string metric;  // accuracy, precision, recall, f1
  std::optional<MeanStd> value;
  std::size_t n_defined_runs = 0;
};
std::vector<PresenceSummaryRow> presence_summary(const std::vector<Run>& runs);

enum class ReportFormat { Csv, Markdown };

/// Columns: city, task, mean, std, n_records, n_runs.
void emit_report(const AggregateTable& table, const std::filesystem::path& path,
                 ReportFormat format);
AggregateTable read_report(const std::filesystem::path& path, ReportFormat format);

void emit_presence_summary(const std::vector<PresenceSummaryRow>& rows,
                           const std::filesystem::path& path);

}  // namespace pvrag::evaluation
