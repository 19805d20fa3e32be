#include "pvrag/evaluation/aggregate.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <map>
#include <set>

#include "pvrag/core/text.hpp"

namespace pvrag::evaluation {

namespace {

struct Tally {
  std::array<std::size_t, 3> correct{};
  std::size_t total = 0;

  double accuracy(Task t) const {
    return static_cast<double>(correct[static_cast<std::size_t>(t)]) / static_cast<double>(total);
  }
};

std::set<std::string> ids_of(const Run& run) {
  std::set<std::string> ids;
  for (const auto& r : run) {
    if (!ids.insert(r.id).second) throw RunMismatchError("record " + r.id + " scored twice in one run");
  }
  return ids;
}

void check_runs(const std::vector<Run>& runs) {
  if (runs.empty()) return;
  const auto reference = ids_of(runs.front());
  for (std::size_t i = 1; i < runs.size(); ++i) {
    if (ids_of(runs[i]) != reference) {
      throw RunMismatchError("run " + std::to_string(i + 1) +
                             " scores a different record set than run 1");
    }
  }
}

std::string fmt(double v) { return text::fixed(v, 6); }

}  // namespace

AggregateTable aggregate(const std::vector<Run>& runs, Averaging averaging) {
  check_runs(runs);
  AggregateTable table;
  if (runs.empty() || runs.front().empty()) return table;

  // city -> per-run tallies
  std::map<std::string, std::vector<Tally>> per_city;
  std::vector<Tally> overall(runs.size());
  for (std::size_t run = 0; run < runs.size(); ++run) {
    for (const auto& rec : runs[run]) {
      auto& tallies = per_city[rec.city];
      tallies.resize(runs.size());
      const auto match = exact_match_score(rec.prediction, rec.truth);
      for (Task t : kTasks) {
        const auto ti = static_cast<std::size_t>(t);
        tallies[run].correct[ti] += match.get(t) ? 1 : 0;
        overall[run].correct[ti] += match.get(t) ? 1 : 0;
      }
      ++tallies[run].total;
      ++overall[run].total;
    }
  }

  for (Task t : kTasks) {
    std::vector<double> values;
    for (std::size_t run = 0; run < runs.size(); ++run) {
      if (averaging == Averaging::Micro) {
        values.push_back(overall[run].accuracy(t));
      } else {
        double sum = 0.0;
        for (const auto& [city, tallies] : per_city) sum += tallies[run].accuracy(t);
        values.push_back(sum / static_cast<double>(per_city.size()));
      }
    }
    const auto ms = mean_std(values);
    table.rows.push_back({std::string(kOverall), t, ms.mean, ms.std, overall.front().total, runs.size()});
  }
  for (const auto& [city, tallies] : per_city) {
    for (Task t : kTasks) {
      std::vector<double> values;
      for (const auto& tally : tallies) values.push_back(tally.accuracy(t));
      const auto ms = mean_std(values);
      table.rows.push_back({city, t, ms.mean, ms.std, tallies.front().total, runs.size()});
    }
  }
  return table;
}

std::vector<PresenceSummaryRow> presence_summary(const std::vector<Run>& runs) {
  check_runs(runs);
  std::array<std::vector<double>, 4> values;
  for (const auto& run : runs) {
    std::vector<PredictionPair> pairs;
    for (const auto& r : run) pairs.push_back({r.prediction, r.truth});
    const auto m = precision_recall_f1(presence_confusion(pairs));
    const std::array<std::optional<double>, 4> per = {m.accuracy, m.precision, m.recall, m.f1};
    for (std::size_t i = 0; i < per.size(); ++i) {
      if (per[i]) values[i].push_back(*per[i]);
    }
  }
  static constexpr std::array<std::string_view, 4> kNames = {"accuracy", "precision", "recall", "f1"};
  std::vector<PresenceSummaryRow> rows;
  for (std::size_t i = 0; i < kNames.size(); ++i) {
    PresenceSummaryRow row{std::string(kNames[i]), std::nullopt, values[i].size()};
    if (!values[i].empty()) row.value = mean_std(values[i]);
    rows.push_back(std::move(row));
  }
  return rows;
}

void emit_report(const AggregateTable& table, const std::filesystem::path& path,
                 ReportFormat format) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  if (format == ReportFormat::Csv) {
    out << "city,task,mean,std,n_records,n_runs\n";
    for (const auto& r : table.rows) {
      out << text::csv_field(r.city) << ',' << to_string(r.task) << ',' << fmt(r.mean) << ','
          << fmt(r.std) << ',' << r.n_records << ',' << r.n_runs << '\n';
    }
  } else {
    out << "| city | task | mean | std | n_records | n_runs |\n";
    out << "|---|---|---|---|---|---|\n";
    for (const auto& r : table.rows) {
      if (r.city.find('|') != std::string::npos) throw Error("city name contains '|': " + r.city);
      out << "| " << r.city << " | " << to_string(r.task) << " | " << fmt(r.mean) << " | "
          << fmt(r.std) << " | " << r.n_records << " | " << r.n_runs << " |\n";
    }
  }
  if (!out) throw Error("write failed: " + path.string());
}

AggregateTable read_report(const std::filesystem::path& path, ReportFormat format) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  AggregateTable table;
  std::string line;
  std::size_t line_no = 0;
  const std::size_t skip = format == ReportFormat::Csv ? 1 : 2;
  while (std::getline(in, line)) {
    if (++line_no <= skip || text::trim(line).empty()) continue;
    std::vector<std::string> fields;
    if (format == ReportFormat::Csv) {
      fields = text::parse_csv_line(line);
    } else {
      auto cells = text::split(text::trim(line), '|');
      // Leading and trailing pipes produce empty outer cells.
      for (std::size_t i = 1; i + 1 < cells.size(); ++i) {
        fields.emplace_back(text::trim(cells[i]));
      }
    }
    if (fields.size() != 6) {
      throw FormatError(path.string() + ":" + std::to_string(line_no) + ": expected 6 columns");
    }
    table.rows.push_back({fields[0], parse_task(fields[1]), std::stod(fields[2]),
                          std::stod(fields[3]), std::stoul(fields[4]), std::stoul(fields[5])});
  }
  return table;
}

void emit_presence_summary(const std::vector<PresenceSummaryRow>& rows,
                           const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << "metric,mean,std,n_defined_runs\n";
  for (const auto& r : rows) {
    out << r.metric << ',';
    if (r.value) {
      out << fmt(r.value->mean) << ',' << fmt(r.value->std);
    } else {
      out << ',';
    }
    out << ',' << r.n_defined_runs << '\n';
  }
}

}  // namespace pvrag::evaluation
