#include "pvrag/evaluation/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "pvrag/core/text.hpp"

namespace pvrag::evaluation {

std::string_view to_string(Task t) {
  switch (t) {
    case Task::Presence:
      return "presence";
    case Task::Quantity:
      return "quantity";
    case Task::Location:
      return "location";
  }
  return "?";
}

Task parse_task(std::string_view raw) {
  const auto token = text::to_lower(text::trim(raw));
  for (Task t : kTasks) {
    if (token == to_string(t)) return t;
  }
  throw VocabularyError(std::string(raw));
}

bool TaskMatch::get(Task t) const {
  switch (t) {
    case Task::Presence:
      return presence;
    case Task::Quantity:
      return quantity;
    case Task::Location:
      return location;
  }
  return false;
}

TaskMatch exact_match_score(const PVDescriptor& prediction, const PVDescriptor& truth) {
  return {presence_to_string(prediction.presence) == presence_to_string(truth.presence),
          to_string(prediction.quantity) == to_string(truth.quantity),
          to_string(prediction.location) == to_string(truth.location)};
}

ConfusionCounts presence_confusion(std::span<const PredictionPair> pairs) {
  ConfusionCounts c;
  for (const auto& p : pairs) {
    if (p.truth.presence) {
      ++(p.prediction.presence ? c.tp : c.fn);
    } else {
      ++(p.prediction.presence ? c.fp : c.tn);
    }
  }
  return c;
}

std::optional<double> f1_score(double precision, double recall) {
  if (precision + recall <= 0.0) return std::nullopt;
  return 2.0 * precision * recall / (precision + recall);
}

std::optional<double> precision_from_recall_f1(double recall, double f1) {
  // f1 = 2pr/(p+r)  =>  p = f1 r / (2r - f1)
  const double denom = 2.0 * recall - f1;
  if (denom <= 0.0) return std::nullopt;
  const double p = f1 * recall / denom;
  if (p < 0.0 || p > 1.0) return std::nullopt;
  return p;
}

PresenceMetrics precision_recall_f1(const ConfusionCounts& c) {
  PresenceMetrics m;
  const auto ratio = [](std::size_t num, std::size_t den) -> std::optional<double> {
    if (den == 0) return std::nullopt;
    return static_cast<double>(num) / static_cast<double>(den);
  };
  m.accuracy = ratio(c.tp + c.tn, c.total());
  m.precision = ratio(c.tp, c.tp + c.fp);
  m.recall = ratio(c.tp, c.tp + c.fn);
  if (m.precision && m.recall) m.f1 = f1_score(*m.precision, *m.recall);
  return m;
}

MeanStd mean_std(std::span<const double> values) {
  MeanStd out;
  if (values.empty()) return out;
  if (std::all_of(values.begin(), values.end(), [&](double v) { return v == values.front(); })) {
    out.mean = values.front();
    return out;
  }
  double sum = 0.0;
  for (double v : values) sum += v;
  out.mean = sum / static_cast<double>(values.size());
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - out.mean) * (v - out.mean);
    out.std = std::sqrt(ss / static_cast<double>(values.size() - 1));
  }
  return out;
}

}  // namespace pvrag::evaluation
