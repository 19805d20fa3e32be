#include "pipeline.hpp"

#include <fstream>
#include <unordered_map>

#include "pvrag/core/text.hpp"

namespace pvrag::cli {

Dataset load_dataset(const std::filesystem::path& manifest, const std::filesystem::path& embeddings) {
  Dataset d;
  d.records = dataset::load_manifest(manifest);
  d.embeddings = index::read_embedding_batch(embeddings);
  return d;
}

evaluation::Run run_assessment(const Dataset& data, const index::VectorIndex& references,
                               assessor::AssessmentBackend& backend, const RunSpec& spec,
                               const std::optional<std::string>& only_city) {
  std::vector<const dataset::ManifestRecord*> selected;
  for (const auto& r : data.records) {
    if (r.split != dataset::Split::Eval) continue;
    if (only_city && r.city != *only_city) continue;
    selected.push_back(&r);
  }

  // queries grouped by city when the city is excluded from retrieval
  std::map<std::string, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < selected.size(); ++i) {
    groups[spec.leave_city_out ? selected[i]->city : std::string()].push_back(i);
  }

  evaluation::Run run(selected.size());
  for (const auto& [city, positions] : groups) {
    std::vector<assessor::AssessmentQuery> queries;
    for (auto i : positions) {
      const auto& rec = *selected[i];
      const auto emb = dataset::record_embedding(rec, data.embeddings);
      queries.push_back({rec.id, {emb.values().begin(), emb.values().end()}, rec.image_ref});
    }
    auto options = spec.options;
    if (spec.leave_city_out) options.excluded_city = city;
    const auto results =
        assessor::assess_batch(queries, references, spec.mode, backend, options, spec.jobs);
    for (std::size_t q = 0; q < positions.size(); ++q) {
      const auto& rec = *selected[positions[q]];
      run[positions[q]] = {rec.id, rec.city, rec.label, results[q].descriptor};
    }
  }
  return run;
}

std::map<evaluation::Task, double> overall_accuracy(const std::vector<evaluation::Run>& runs) {
  std::map<evaluation::Task, double> acc;
  for (const auto& row : evaluation::aggregate(runs).rows) {
    if (row.city == evaluation::kOverall) acc[row.task] = row.mean;
  }
  return acc;
}

void write_predictions(const std::filesystem::path& path, const std::vector<evaluation::Run>& runs) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << "run,id,city,presence,quantity,location,explanation\n";
  for (std::size_t r = 0; r < runs.size(); ++r) {
    for (const auto& rec : runs[r]) {
      const auto& d = rec.prediction;
      out << r + 1 << ',' << text::csv_field(rec.id) << ',' << text::csv_field(rec.city) << ','
          << presence_to_string(d.presence) << ',' << text::csv_field(to_string(d.quantity)) << ','
          << to_string(d.location) << ',' << text::csv_field(d.explanation) << '\n';
    }
  }
  if (!out) throw Error("failed writing " + path.string());
}

std::map<int, std::vector<Prediction>> read_predictions(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open predictions file " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw FormatError(path.string() + ": empty predictions file");
  const auto header = text::parse_csv_line(text::trim(line));
  std::unordered_map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;
  for (const char* c : {"run", "id", "presence", "quantity", "location"}) {
    if (!col.contains(c)) throw FormatError(path.string() + ":1: missing column " + c);
  }
  std::map<int, std::vector<Prediction>> out;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (text::trim(line).empty()) continue;
    const auto at = path.string() + ":" + std::to_string(line_no);
    const auto f = text::parse_csv_line(text::trim(line));
    if (f.size() != header.size()) throw FormatError(at + ": wrong number of fields");
    int run = 0;
    try {
      run = std::stoi(f[col["run"]]);
    } catch (const std::exception&) {
      throw FormatError(at + ": malformed run number");
    }
    Prediction p;
    p.id = f[col["id"]];
    try {
      p.descriptor.presence = parse_presence(f[col["presence"]]);
      p.descriptor.quantity = parse_quantity(f[col["quantity"]]);
      p.descriptor.location = parse_location(f[col["location"]]);
    } catch (const VocabularyError& e) {
      throw VocabularyError(e.token(), at);
    }
    if (col.contains("explanation")) p.descriptor.explanation = f[col["explanation"]];
    out[run].push_back(std::move(p));
  }
  return out;
}

std::vector<evaluation::Run> score_predictions(const std::map<int, std::vector<Prediction>>& predictions,
                                               const std::vector<dataset::ManifestRecord>& records) {
  std::unordered_map<std::string, const dataset::ManifestRecord*> by_id;
  for (const auto& r : records) by_id[r.id] = &r;
  std::vector<evaluation::Run> runs;
  for (const auto& [run, preds] : predictions) {
    evaluation::Run scored;
    for (const auto& p : preds) {
      auto it = by_id.find(p.id);
      if (it == by_id.end()) {
        throw Error("run " + std::to_string(run) + ": prediction for unknown id " + p.id);
      }
      scored.push_back({p.id, it->second->city, it->second->label, p.descriptor});
    }
    runs.push_back(std::move(scored));
  }
  return runs;
}

}  // namespace pvrag::cli
