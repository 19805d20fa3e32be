#include "pvrag/dataset/manifest.hpp"

#include <algorithm>
#include <fstream>
#include <unordered_map>
#include <unordered_set>

#include "pvrag/core/errors.hpp"
#include "pvrag/core/text.hpp"

namespace pvrag::dataset {

std::string_view to_string(Split s) { return s == Split::Eval ? "EVAL" : "REFERENCE"; }

Split parse_split(std::string_view raw) {
  const auto token = text::to_lower(text::trim(raw));
  if (token == "eval") return Split::Eval;
  if (token == "reference") return Split::Reference;
  throw VocabularyError(std::string(raw));
}

std::vector<ManifestRecord> load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open manifest " + path.string());

  const std::string where = path.string();
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw FormatError(where + ": empty manifest (missing header)");
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();

  const auto header = text::split(line, '\t');
  std::unordered_map<std::string, std::size_t> column;
  for (std::size_t i = 0; i < header.size(); ++i) {
    column[std::string(text::trim(header[i]))] = i;
  }
  for (auto name : kManifestColumns) {
    if (name == "image_ref" || name == "embedding_ref") continue;
    if (!column.contains(std::string(name))) {
      throw FormatError(where + ":1: missing column '" + std::string(name) + "'");
    }
  }

  std::vector<ManifestRecord> records;
  std::unordered_set<std::string> seen;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (text::trim(line).empty()) continue;
    const std::string at = where + ":" + std::to_string(line_no);
    const auto fields = text::split(line, '\t');
    if (fields.size() != header.size()) {
      throw FormatError(at + ": expected " + std::to_string(header.size()) + " fields, found " +
                        std::to_string(fields.size()));
    }
    auto field = [&](std::string_view name) -> std::string {
      auto it = column.find(std::string(name));
      return it == column.end() ? std::string{} : std::string(text::trim(fields[it->second]));
    };

    ManifestRecord r;
    r.id = field("id");
    if (r.id.empty()) throw FormatError(at + ": empty id");
    r.city = field("city");
    r.continent = field("continent");
    try {
      r.split = parse_split(field("split"));
      r.label.presence = parse_presence(field("presence"));
      r.label.quantity = parse_quantity(field("quantity"));
      r.label.location = parse_location(field("location"));
    } catch (const VocabularyError& e) {
      throw VocabularyError(e.token(), at);
    }
    r.label.explanation = field("explanation");
    r.embedding_ref = field("embedding_ref");
    r.image_ref = field("image_ref");
    if (auto violation = validate_descriptor(r.label)) {
      throw ConsistencyError(at + ": record " + r.id + ": " + *violation);
    }
    if (!seen.insert(r.id).second) throw Error(at + ": duplicate id " + r.id);
    records.push_back(std::move(r));
  }
  return records;
}

void write_manifest(const std::filesystem::path& path, const std::vector<ManifestRecord>& records) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  bool first = true;
  for (auto name : kManifestColumns) {
    out << (first ? "" : "\t") << name;
    first = false;
  }
  out << '\n';
  for (const auto& r : records) {
    for (const auto& s : {r.id, r.city, r.continent, r.label.explanation, r.image_ref}) {
      if (s.find_first_of("\t\n") != std::string::npos) {
        throw Error("record " + r.id + ": tab or newline in manifest field");
      }
    }
    out << r.id << '\t' << r.city << '\t' << r.continent << '\t' << to_string(r.split) << '\t'
        << presence_to_string(r.label.presence) << '\t' << to_string(r.label.quantity) << '\t'
        << to_string(r.label.location) << '\t' << r.label.explanation << '\t' << r.embedding_ref
        << '\t' << r.image_ref << '\n';
  }
  if (!out) throw Error("write failed: " + path.string());
}

SplitReport validate_split(const std::vector<ManifestRecord>& records,
                           std::optional<SplitPattern> pattern) {
  std::map<std::string, RegionSplit> by_city;
  for (const auto& r : records) {
    auto& split = by_city[r.city];
    split.city = r.city;
    (r.split == Split::Eval ? split.eval_ids : split.reference_ids).insert(r.id);
  }

  SplitReport report;
  std::vector<std::string> overlap;
  for (auto& [city, split] : by_city) {
    std::set_intersection(split.eval_ids.begin(), split.eval_ids.end(),
                          split.reference_ids.begin(), split.reference_ids.end(),
                          std::back_inserter(overlap));
    if (split.reference_ids.empty()) {
      report.warnings.push_back(city + ": empty reference split (retrieval impossible, plain mode only)");
    }
    if (pattern && (split.eval_ids.size() != pattern->eval ||
                    split.reference_ids.size() != pattern->reference)) {
      report.pattern_violations.push_back(city);
    }
    report.splits.push_back(std::move(split));
  }
  if (!overlap.empty()) {
    std::string message = "evaluation and reference splits overlap:";
    for (const auto& id : overlap) message += " " + id;
    throw SplitViolation(message, overlap);
  }
  return report;
}

index::Embedding record_embedding(const ManifestRecord& record,
                                  const index::EmbeddingBatch& embeddings) {
  for (const auto& [id, embedding] : embeddings.records) {
    if (id == record.embedding_key()) return index::normalize(embedding.values());
  }
  throw Error("missing embedding for record " + record.id);
}

index::VectorIndex build_reference_index(const std::vector<ManifestRecord>& records,
                                         const index::EmbeddingBatch& embeddings,
                                         const std::optional<std::string>& excluded_city) {
  const auto lookup = embeddings.by_id();
  index::VectorIndex out(embeddings.dimension);
  for (const auto& r : records) {
    if (r.split != Split::Reference) continue;
    if (excluded_city && r.city == *excluded_city) continue;
    auto it = lookup.find(r.embedding_key());
    if (it == lookup.end()) throw Error("missing embedding for record " + r.id);
    out.add(index::ReferenceEntry{r.id, r.city, r.continent,
                                  index::normalize(embeddings.records[it->second].second.values()),
                                  r.label});
  }
  return out;
}

}  // namespace pvrag::dataset
