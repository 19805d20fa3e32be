#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "pvrag/core/errors.hpp"
#include "pvrag/index/vector_index.hpp"

namespace pvrag::assessor {

/// Thrown when a prompt template is missing a required placeholder or uses an
/// unknown one.
class TemplateError : public Error {
 public:
  using Error::Error;
};

/// Prompt wording lives in text files with {{name}} placeholders; the
/// structure (which fields appear, in which order) is fixed by the builders.
///
///   autolabel        {{query_id}} {{output_schema}}
///   rag              {{query_id}} {{references}} {{output_schema}}
///   reference block  {{rank}} {{city}} {{similarity}} {{presence}}
///                    {{quantity}} {{location}} {{explanation}}
///   output schema    no placeholders; must name all four descriptor fields
struct PromptTemplates {
  std::string autolabel;
  std::string rag;
  std::string reference_block;
  std::string output_schema;

  /// The templates shipped in templates/ (compiled in).
  static PromptTemplates defaults();
  /// Reads autolabel.txt, rag.txt, reference.txt and output_schema.txt from `dir`
  /// and validates them.
  static PromptTemplates load(const std::filesystem::path& dir);

  /// Throws TemplateError on the first problem found.
  void validate() const;
};

using ScoredReference = std::pair<index::ReferenceEntry, double>;  // entry, similarity

std::string build_autolabel_prompt(const PromptTemplates& templates, const std::string& query_id);

/// References must be non-empty and sorted by descending similarity; their
/// order is preserved in the prompt.
std::string build_rag_prompt(const PromptTemplates& templates, const std::string& query_id,
                             const std::vector<ScoredReference>& references);

}  // namespace pvrag::assessor
