#include "pvrag/assessor/prompt.hpp"

#include <fstream>
#include <iterator>
#include <map>
#include <set>
#include <sstream>

#include "default_templates.hpp"
#include "pvrag/core/text.hpp"

namespace pvrag::assessor {

namespace {

using Values = std::map<std::string, std::string, std::less<>>;

std::set<std::string> placeholders_in(const std::string& tpl) {
  std::set<std::string> names;
  std::size_t pos = 0;
  while ((pos = tpl.find("{{", pos)) != std::string::npos) {
    const auto end = tpl.find("}}", pos + 2);
    if (end == std::string::npos) break;
    names.insert(tpl.substr(pos + 2, end - pos - 2));
    pos = end + 2;
  }
  return names;
}

void check_placeholders(const std::string& name, const std::string& tpl,
                        const std::set<std::string>& required) {
  const auto found = placeholders_in(tpl);
  for (const auto& r : required) {
    if (!found.contains(r)) {
      throw TemplateError(name + " template is missing placeholder {{" + r + "}}");
    }
  }
  for (const auto& f : found) {
    if (!required.contains(f)) {
      throw TemplateError(name + " template uses unknown placeholder {{" + f + "}}");
    }
  }
}

std::string render(const std::string& tpl, const Values& values) {
  std::string out;
  out.reserve(tpl.size() + 256);
  std::size_t pos = 0;
  while (true) {
    const auto open = tpl.find("{{", pos);
    if (open == std::string::npos) break;
    const auto close = tpl.find("}}", open + 2);
    if (close == std::string::npos) break;
    out.append(tpl, pos, open - pos);
    const auto key = std::string_view(tpl).substr(open + 2, close - open - 2);
    auto it = values.find(key);
    out += (it == values.end()) ? std::string(tpl, open, close + 2 - open) : it->second;
    pos = close + 2;
  }
  out.append(tpl, pos, std::string::npos);
  return out;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw TemplateError("cannot read prompt template " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

PromptTemplates PromptTemplates::defaults() {
  PromptTemplates t{generated::kAutolabel, generated::kRag, generated::kReference,
                    generated::kOutputSchema};
  t.validate();
  return t;
}

PromptTemplates PromptTemplates::load(const std::filesystem::path& dir) {
  PromptTemplates t{read_text(dir / "autolabel.txt"), read_text(dir / "rag.txt"),
                    read_text(dir / "reference.txt"), read_text(dir / "output_schema.txt")};
  t.validate();
  return t;
}

void PromptTemplates::validate() const {
  check_placeholders("autolabel", autolabel, {"query_id", "output_schema"});
  check_placeholders("rag", rag, {"query_id", "references", "output_schema"});
  check_placeholders("reference", reference_block,
                     {"rank", "city", "similarity", "presence", "quantity", "location",
                      "explanation"});
  check_placeholders("output_schema", output_schema, {});
  for (const char* field : {"presence", "quantity", "location", "explanation"}) {
    if (output_schema.find(std::string("\"") + field + "\"") == std::string::npos) {
      throw TemplateError(std::string("output_schema template does not name field \"") + field +
                          "\"");
    }
  }
}

std::string build_autolabel_prompt(const PromptTemplates& templates, const std::string& query_id) {
  return render(templates.autolabel,
                {{"query_id", query_id}, {"output_schema", templates.output_schema}});
}

std::string build_rag_prompt(const PromptTemplates& templates, const std::string& query_id,
                             const std::vector<ScoredReference>& references) {
  if (references.empty()) throw Error("RAG prompt requires references");
  for (std::size_t i = 1; i < references.size(); ++i) {
    if (references[i].second > references[i - 1].second) {
      throw Error("RAG prompt references must be sorted by descending similarity");
    }
  }
  std::string blocks;
  for (std::size_t i = 0; i < references.size(); ++i) {
    const auto& [entry, sim] = references[i];
    blocks += render(templates.reference_block,
                     {{"rank", std::to_string(i + 1)},
                      {"city", entry.city},
                      {"similarity", text::fixed(sim, 4)},
                      {"presence", std::string(presence_to_string(entry.label.presence))},
                      {"quantity", std::string(to_string(entry.label.quantity))},
                      {"location", std::string(to_string(entry.label.location))},
                      {"explanation", entry.label.explanation}});
  }
  return render(templates.rag, {{"query_id", query_id},
                                {"references", blocks},
                                {"output_schema", templates.output_schema}});
}

}  // namespace pvrag::assessor
