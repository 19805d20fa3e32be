#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

#include "pvrag/evaluation/aggregate.hpp"
#include "pvrag/evaluation/metrics.hpp"
#include "test_support.hpp"

using namespace pvrag;
using namespace pvrag::evaluation;
using Q = QuantityInterval;
using L = LocationLabel;
using EvalRun = pvrag::evaluation::Run;

namespace {

PVDescriptor pos(Q q = Q::OneToFive, L l = L::Top) { return {true, q, l, "x"}; }

ScoredRecord rec(std::string id, std::string city, PVDescriptor truth, PVDescriptor pred) {
  return {std::move(id), std::move(city), std::move(truth), std::move(pred)};
}

EvalRun city_run(const std::string& city, std::size_t correct, std::size_t total, std::size_t offset = 0) {
  EvalRun r;
  for (std::size_t i = 0; i < total; ++i) {
    r.push_back(rec(city + std::to_string(offset + i), city, pos(), i < correct ? pos() : negative_descriptor()));
  }
  return r;
}

const AggregateRow& row(const AggregateTable& t, std::string_view city, Task task) {
  for (const auto& r : t.rows) {
    if (r.city == city && r.task == task) return r;
  }
  throw std::runtime_error("row not found");
}

EvalRun random_run(std::mt19937_64& gen, std::size_t n) {
  const std::vector<std::string> cities = {"Alpha", "Beta", "Gamma"};
  std::uniform_int_distribution<int> coin(0, 3);
  EvalRun r;
  for (std::size_t i = 0; i < n; ++i) {
    auto truth = coin(gen) ? pos(static_cast<Q>(coin(gen) % 4), L::Left) : negative_descriptor();
    auto pred = coin(gen) ? truth : (truth.presence ? negative_descriptor() : pos());
    r.push_back(rec("r" + std::to_string(i), cities[i % 3], truth, pred));
  }
  return r;
}

}  // namespace

TEST(ExactMatch, FieldWise) {
  const auto m = exact_match_score(pos(Q::OneToFive, L::Top), pos(Q::OneToFive, L::Bottom));
  EXPECT_TRUE(m.presence);
  EXPECT_TRUE(m.quantity);
  EXPECT_FALSE(m.location);
  const auto n = exact_match_score(negative_descriptor("a"), negative_descriptor("b"));
  EXPECT_TRUE(n.presence && n.quantity && n.location);
  const auto fn = exact_match_score(negative_descriptor(), pos());
  EXPECT_FALSE(fn.presence || fn.quantity || fn.location);
}

TEST(Confusion, CountsAndMetrics) {
  std::vector<PredictionPair> pairs = {{pos(), pos()}, {pos(), pos()}, {pos(), negative_descriptor()},
                                       {negative_descriptor(), pos()}, {negative_descriptor(), negative_descriptor()}};
  const auto c = presence_confusion(pairs);
  EXPECT_EQ(c, (ConfusionCounts{2, 1, 1, 1}));
  const auto m = precision_recall_f1(c);
  EXPECT_DOUBLE_EQ(*m.accuracy, 0.6);
  EXPECT_DOUBLE_EQ(*m.precision, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(*m.recall, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(*m.f1, 2.0 / 3.0);
}

TEST(Confusion, UndefinedMetricsAreAbsent) {
  const auto none = precision_recall_f1(ConfusionCounts{0, 0, 0, 5});
  EXPECT_DOUBLE_EQ(*none.accuracy, 1.0);
  EXPECT_FALSE(none.precision);
  EXPECT_FALSE(none.recall);
  EXPECT_FALSE(none.f1);
  const auto empty = precision_recall_f1(ConfusionCounts{});
  EXPECT_FALSE(empty.accuracy);
  const auto wrong = precision_recall_f1(ConfusionCounts{0, 3, 2, 0});
  EXPECT_DOUBLE_EQ(*wrong.precision, 0.0);
  EXPECT_FALSE(wrong.f1);
}

TEST(F1, ReportedValues) {
  EXPECT_NEAR(*f1_score(0.987, 0.819), 0.8952, 5e-5);
  const auto p = precision_from_recall_f1(0.978, 0.969);
  ASSERT_TRUE(p);
  EXPECT_NEAR(*p, 0.960, 5e-4);
  EXPECT_NEAR(*f1_score(*p, 0.978), 0.969, 1e-12);
  EXPECT_FALSE(f1_score(0, 0));
  EXPECT_FALSE(precision_from_recall_f1(0.4, 0.9));
}

TEST(F1, HarmonicMeanIdentity) {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const double p = u(gen), r = u(gen);
    const auto f = f1_score(p, r);
    ASSERT_TRUE(f);
    EXPECT_NEAR(*f * (p + r), 2 * p * r, 1e-12);
    EXPECT_LE(*f, std::max(p, r) + 1e-15);
    EXPECT_GE(*f, std::min(p, r) - 1e-15);
    const auto back = precision_from_recall_f1(r, *f);
    ASSERT_TRUE(back);
    EXPECT_NEAR(*back, p, 1e-9);
  }
}

TEST(MeanStd, SampleDeviation) {
  const std::vector<double> v = {1, 2, 3, 4};
  const auto m = mean_std(v);
  EXPECT_DOUBLE_EQ(m.mean, 2.5);
  EXPECT_NEAR(m.std, std::sqrt(5.0 / 3.0), 1e-15);
  const std::vector<double> one = {0.7};
  EXPECT_DOUBLE_EQ(mean_std(one).std, 0.0);
}

TEST(Aggregate, CityAccuracy) {
  const auto t = aggregate({city_run("Paris", 229, 240)});
  EXPECT_NEAR(row(t, "Paris", Task::Presence).mean, 0.9542, 5e-5);
  EXPECT_EQ(row(t, "Paris", Task::Presence).n_records, 240u);
  EXPECT_EQ(row(t, kOverall, Task::Presence).n_runs, 1u);
}

TEST(Aggregate, MicroVersusMacro) {
  EvalRun r = city_run("A", 1, 4);
  const auto b = city_run("B", 4, 4);
  r.insert(r.end(), b.begin(), b.end());
  EvalRun uneven = city_run("A", 1, 4);
  const auto big = city_run("B", 2, 2);
  uneven.insert(uneven.end(), big.begin(), big.end());
  EXPECT_DOUBLE_EQ(row(aggregate({uneven}, Averaging::Micro), kOverall, Task::Presence).mean, 0.5);
  EXPECT_DOUBLE_EQ(row(aggregate({uneven}, Averaging::Macro), kOverall, Task::Presence).mean, 0.625);
  EXPECT_DOUBLE_EQ(row(aggregate({r}, Averaging::Micro), kOverall, Task::Presence).mean, 0.625);
  EXPECT_DOUBLE_EQ(row(aggregate({r}, Averaging::Macro), kOverall, Task::Presence).mean, 0.625);
}

TEST(Aggregate, IdenticalRunsHaveZeroSpread) {
  std::mt19937_64 gen(5);
  const auto r = random_run(gen, 60);
  const auto t = aggregate({r, r, r});
  for (const auto& row : t.rows) {
    EXPECT_EQ(row.std, 0.0);
    EXPECT_EQ(row.n_runs, 3u);
  }
}

TEST(Aggregate, RunSpreadAcrossRuns) {
  const auto t = aggregate({city_run("A", 1, 2), city_run("A", 2, 2)});
  EXPECT_DOUBLE_EQ(row(t, "A", Task::Presence).mean, 0.75);
  EXPECT_NEAR(row(t, "A", Task::Presence).std, std::sqrt(0.125), 1e-15);
}

TEST(Aggregate, RowOrder) {
  EvalRun r = city_run("Zurich", 1, 2);
  for (auto& x : city_run("Athens", 1, 2)) r.push_back(x);
  const auto t = aggregate({r});
  ASSERT_EQ(t.rows.size(), 9u);
  const std::vector<std::string> cities = {"Overall", "Overall", "Overall", "Athens", "Athens",
                                           "Athens",  "Zurich",  "Zurich",  "Zurich"};
  for (std::size_t i = 0; i < 9; ++i) {
    EXPECT_EQ(t.rows[i].city, cities[i]);
    EXPECT_EQ(t.rows[i].task, kTasks[i % 3]);
  }
}

TEST(Aggregate, PermutationInvariant) {
  std::mt19937_64 gen(7);
  const auto a = random_run(gen, 90);
  const auto b = random_run(gen, 90);
  auto pa = a, pb = b;
  std::shuffle(pa.begin(), pa.end(), gen);
  std::shuffle(pb.begin(), pb.end(), gen);
  for (auto avg : {Averaging::Micro, Averaging::Macro}) {
    const auto x = aggregate({a, b}, avg);
    const auto y = aggregate({pa, pb}, avg);
    ASSERT_EQ(x.rows.size(), y.rows.size());
    for (std::size_t i = 0; i < x.rows.size(); ++i) {
      EXPECT_EQ(x.rows[i].city, y.rows[i].city);
      EXPECT_NEAR(x.rows[i].mean, y.rows[i].mean, 1e-15);
      EXPECT_NEAR(x.rows[i].std, y.rows[i].std, 1e-15);
    }
  }
}

TEST(Aggregate, RunMismatch) {
  EXPECT_THROW(aggregate({city_run("A", 1, 3), city_run("A", 1, 2)}), RunMismatchError);
  EXPECT_THROW(aggregate({city_run("A", 1, 2), city_run("A", 1, 2, 5)}), RunMismatchError);
  EvalRun dup = city_run("A", 1, 2);
  dup.push_back(dup.front());
  EXPECT_THROW(aggregate({dup}), RunMismatchError);
}

TEST(Aggregate, EmptyInputGivesEmptyTable) {
  EXPECT_TRUE(aggregate({}).rows.empty());
  EXPECT_TRUE(aggregate({EvalRun{}}).rows.empty());
}

TEST(Report, RoundTripBothFormats) {
  std::mt19937_64 gen(9);
  const auto t = aggregate({random_run(gen, 45), random_run(gen, 45)}, Averaging::Macro);
  testkit::TempDir dir("report");
  for (auto fmt : {ReportFormat::Csv, ReportFormat::Markdown}) {
    const auto path = dir / (fmt == ReportFormat::Csv ? "r.csv" : "r.md");
    emit_report(t, path, fmt);
    const auto back = read_report(path, fmt);
    ASSERT_EQ(back.rows.size(), t.rows.size());
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
      EXPECT_EQ(back.rows[i].city, t.rows[i].city);
      EXPECT_EQ(back.rows[i].task, t.rows[i].task);
      EXPECT_NEAR(back.rows[i].mean, t.rows[i].mean, 5e-7);
      EXPECT_NEAR(back.rows[i].std, t.rows[i].std, 5e-7);
      EXPECT_EQ(back.rows[i].n_records, t.rows[i].n_records);
      EXPECT_EQ(back.rows[i].n_runs, t.rows[i].n_runs);
    }
  }
}

TEST(Report, EmptyTableIsHeaderOnly) {
  testkit::TempDir dir("empty");
  emit_report({}, dir / "e.csv", ReportFormat::Csv);
  std::ifstream in(dir / "e.csv");
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "city,task,mean,std,n_records,n_runs");
  EXPECT_FALSE(std::getline(in, line));
  EXPECT_TRUE(read_report(dir / "e.csv", ReportFormat::Csv).rows.empty());
}

TEST(PresenceSummary, SkipsUndefinedRuns) {
  EvalRun all_neg = {rec("a", "A", negative_descriptor(), negative_descriptor()),
                 rec("b", "A", negative_descriptor(), negative_descriptor())};
  EvalRun one_pos = {rec("a", "A", negative_descriptor(), pos()), rec("b", "A", negative_descriptor(), negative_descriptor())};
  const auto rows = presence_summary({all_neg, one_pos});
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_EQ(rows[0].metric, "accuracy");
  EXPECT_EQ(rows[0].n_defined_runs, 2u);
  EXPECT_DOUBLE_EQ(rows[0].value->mean, 0.75);
  EXPECT_EQ(rows[1].metric, "precision");
  EXPECT_EQ(rows[1].n_defined_runs, 1u);
  EXPECT_DOUBLE_EQ(rows[1].value->mean, 0.0);
  EXPECT_EQ(rows[2].metric, "recall");
  EXPECT_FALSE(rows[2].value);
  EXPECT_FALSE(rows[3].value);
}
