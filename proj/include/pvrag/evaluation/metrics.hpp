#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pvrag/core/descriptor.hpp"
#include "pvrag/core/errors.hpp"

namespace pvrag::evaluation {

enum class Task { Presence, Quantity, Location };
inline constexpr Task kTasks[] = {Task::Presence, Task::Quantity, Task::Location};
std::string_view to_string(Task t);
Task parse_task(std::string_view text);

/// Per-task exact-match outcome of one prediction.
struct TaskMatch {
  bool presence = false;
  bool quantity = false;
  bool location = false;

  bool get(Task t) const;
};

/// Field-wise equality of canonical forms (explanations are not scored).
TaskMatch exact_match_score(const PVDescriptor& prediction, const PVDescriptor& truth);

struct PredictionPair {
  PVDescriptor prediction;
  PVDescriptor truth;
};

/// Presence confusion counts; the positive class is "PV present".
struct ConfusionCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;

  std::size_t total() const noexcept { return tp + fp + fn + tn; }
  friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

ConfusionCounts presence_confusion(std::span<const PredictionPair> pairs);

/// Metrics with a zero denominator are absent rather than 0.
struct PresenceMetrics {
  std::optional<double> accuracy;
  std::optional<double> precision;
  std::optional<double> recall;
  std::optional<double> f1;
};

PresenceMetrics precision_recall_f1(const ConfusionCounts& c);

/// Harmonic mean 2pr/(p+r); absent when p + r == 0.
std::optional<double> f1_score(double precision, double recall);

/// Inverts the harmonic mean: the precision p with f1_score(p, recall) == f1.
/// Absent when no precision in [0, 1] satisfies it.
std::optional<double> precision_from_recall_f1(double recall, double f1);

/// Mean and sample standard deviation (0 for a single value).
struct MeanStd {
  double mean = 0.0;
  double std = 0.0;
};
MeanStd mean_std(std::span<const double> values);

class RunMismatchError : public Error {
 public:
  using Error::Error;
};

}  // namespace pvrag::evaluation
