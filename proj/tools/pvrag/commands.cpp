#include "commands.hpp"

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pipeline.hpp"
#include "pvrag/assessor/backend.hpp"
#include "pvrag/core/text.hpp"
#include "pvrag/dataset/synthetic.hpp"
#include "pvrag/evaluation/aggregate.hpp"
#include "pvrag/grid/network.hpp"
#include "pvrag/sim/simulation.hpp"

namespace pvrag::cli {

namespace {

constexpr int kRuntimeFailure = 1;
constexpr int kUsageError = 2;

class UsageError : public Error {
 public:
  using Error::Error;
};

std::ofstream open_out(const std::filesystem::path& p) {
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error("cannot write " + p.string());
  return out;
}

// ---------------------------------------------------------------- backend

struct BackendFlags {
  std::string kind = "mock";
  std::string url;
  std::string model;
  std::string audit_log;
  std::string templates;
  bool attach_reference_images = false;
  double temperature = 0.0;
  std::size_t jobs = 1;

  void add_to(CLI::App& cmd) {
    cmd.add_option("--backend", kind, "Assessment backend")
        ->check(CLI::IsMember({"mock", "remote"}))
        ->capture_default_str();
    cmd.add_option("--backend-url", url, "Remote endpoint (default: $PVRAG_BACKEND_URL)");
    cmd.add_option("--remote-model", model, "Remote model name (default: $PVRAG_MODEL)");
    cmd.add_option("--temperature", temperature, "Remote sampling temperature")->capture_default_str();
    cmd.add_option("--audit-log", audit_log, "Append remote request/response records (JSONL)");
    cmd.add_flag("--attach-reference-images", attach_reference_images,
                 "Send reference images alongside the query image");
    cmd.add_option("--templates", templates, "Directory with prompt templates");
    cmd.add_option("--jobs", jobs, "Concurrent backend requests")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
  }

  std::unique_ptr<assessor::AssessmentBackend> make() const {
    if (kind == "mock") return std::make_unique<assessor::MockBackend>();
    assessor::RemoteBackendConfig cfg;
    cfg.apply_environment();
    if (!url.empty()) cfg.url = url;
    if (!model.empty()) cfg.model = model;
    cfg.temperature = temperature;
    cfg.attach_reference_images = attach_reference_images;
    if (!audit_log.empty()) cfg.audit_log = audit_log;
    if (cfg.url.empty()) throw UsageError("remote backend needs --backend-url or PVRAG_BACKEND_URL");
    return std::make_unique<assessor::RemoteBackend>(cfg);
  }

  assessor::AssessOptions options(const Dataset& data) const {
    assessor::AssessOptions opts;
    if (!templates.empty()) opts.templates = assessor::PromptTemplates::load(templates);
    std::map<std::string, std::string> images;
    for (const auto& r : data.records) {
      if (!r.image_ref.empty()) images[r.id] = r.image_ref;
    }
    opts.reference_image = [images = std::move(images)](const std::string& id) {
      auto it = images.find(id);
      return it == images.end() ? std::string() : it->second;
    };
    return opts;
  }
};

index::VectorIndex reference_index(const Dataset& data, const std::string& index_path) {
  if (!index_path.empty()) return index::VectorIndex::load(index_path);
  return dataset::build_reference_index(data.records, data.embeddings);
}

assessor::AssessmentMode make_mode(const std::string& mode, std::size_t k, std::uint64_t seed) {
  if (mode == "plain" || k == 0) return assessor::AssessmentMode::plain();
  if (mode == "rag") return assessor::AssessmentMode::rag(k);
  return assessor::AssessmentMode::random(k, seed);
}

std::string accuracy_cells(const std::map<evaluation::Task, double>& acc) {
  std::string s;
  for (auto t : evaluation::kTasks) {
    if (!s.empty()) s += ',';
    auto it = acc.find(t);
    s += it == acc.end() ? std::string() : text::fixed(it->second, 6);
  }
  return s;
}

// ---------------------------------------------------------------- synth

struct SynthCmd {
  dataset::SynthConfig cfg;
  std::string out_dir;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("synth", "Generate a synthetic manifest and embedding file");
    c->add_option("--out", out_dir, "Output directory")->required();
    c->add_option("--cities", cfg.cities, "Number of study regions")->capture_default_str();
    c->add_option("--per-split", cfg.per_split, "Records per city and split")->capture_default_str();
    c->add_option("--prevalence", cfg.prevalence, "Fraction of rooftops with PV")->capture_default_str();
    c->add_option("--dimension", cfg.dimension, "Embedding dimension")->capture_default_str();
    c->add_option("--noise", cfg.noise, "Embedding noise level")->capture_default_str();
    c->add_option("--seed", cfg.seed, "Random seed")->capture_default_str();
    c->callback([this] { pending = true; });
  }

  bool pending = false;

  void exec(std::ostream& out) const {
    const auto ds = dataset::generate_synthetic_dataset(cfg);
    std::filesystem::create_directories(out_dir);
    const auto manifest = std::filesystem::path(out_dir) / "manifest.tsv";
    const auto emb = std::filesystem::path(out_dir) / "embeddings.pveb";
    dataset::write_manifest(manifest, ds.records);
    index::write_embedding_batch(emb, ds.embeddings);
    out << "wrote " << ds.records.size() << " records to " << manifest.string() << " and "
        << emb.string() << '\n';
  }
};

// ---------------------------------------------------------------- ingest

struct IngestCmd {
  std::string manifest;
  std::string embeddings;
  std::string pattern = "240/240";
  std::string out_path;
  bool strict = false;
  bool pending = false;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("ingest", "Validate a manifest and report per-city split counts");
    c->add_option("--manifest", manifest, "Manifest TSV")->required()->check(CLI::ExistingFile);
    c->add_option("--embeddings", embeddings, "Embedding file; every record must resolve")
        ->check(CLI::ExistingFile);
    c->add_option("--pattern", pattern, "Expected EVAL/REFERENCE counts per city, or 'none'")
        ->capture_default_str();
    c->add_option("--out", out_path, "Also write the count table as CSV");
    c->add_flag("--strict", strict, "Fail when a city violates the pattern");
    c->callback([this] { pending = true; });
  }

  int exec(std::ostream& out, std::ostream& err) const {
    std::optional<dataset::SplitPattern> pat;
    if (pattern != "none") {
      const auto parts = text::split(pattern, '/');
      if (parts.size() != 2) throw UsageError("--pattern must look like 240/240 or be 'none'");
      try {
        pat = dataset::SplitPattern{std::stoul(parts[0]), std::stoul(parts[1])};
      } catch (const std::exception&) {
        throw UsageError("--pattern must look like 240/240 or be 'none'");
      }
    }
    const auto records = dataset::load_manifest(manifest);
    if (!embeddings.empty()) {
      const auto batch = index::read_embedding_batch(embeddings);
      for (const auto& r : records) (void)dataset::record_embedding(r, batch);
    }
    const auto report = dataset::validate_split(records, pat);
    for (const auto& w : report.warnings) err << "warning: " << w << '\n';

    std::string table = "city,eval,reference,status\n";
    for (const auto& s : report.splits) {
      const bool ok = !pat || (s.eval_ids.size() == pat->eval && s.reference_ids.size() == pat->reference);
      table += text::csv_field(s.city) + ',' + std::to_string(s.eval_ids.size()) + ',' +
               std::to_string(s.reference_ids.size()) + ',' + (ok ? "ok" : "pattern-violation") + '\n';
    }
    out << table;
    if (!out_path.empty()) open_out(out_path) << table;
    for (const auto& v : report.pattern_violations) err << "pattern: " << v << '\n';
    return strict && !report.pattern_violations.empty() ? kRuntimeFailure : 0;
  }
};

// ---------------------------------------------------------------- index

struct IndexCmd {
  std::string manifest;
  std::string embeddings;
  std::string out_path;
  std::string exclude_city;
  bool pending = false;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("index", "Build a reference index file from REFERENCE records");
    c->add_option("--manifest", manifest, "Manifest TSV")->required()->check(CLI::ExistingFile);
    c->add_option("--embeddings", embeddings, "Embedding file")->required()->check(CLI::ExistingFile);
    c->add_option("--out", out_path, "Index file to write")->required();
    c->add_option("--exclude-city", exclude_city, "Leave this city out of the index");
    c->callback([this] { pending = true; });
  }

  void exec(std::ostream& out) const {
    const auto data = load_dataset(manifest, embeddings);
    std::optional<std::string> excluded;
    if (!exclude_city.empty()) excluded = exclude_city;
    const auto idx = dataset::build_reference_index(data.records, data.embeddings, excluded);
    const auto p = std::filesystem::path(out_path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    idx.save(p);
    out << "indexed " << idx.size() << " reference entries (dimension " << idx.dimension() << ") to "
        << out_path << '\n';
  }
};

// ---------------------------------------------------------------- retrieve

struct RetrieveCmd {
  std::string manifest;
  std::string embeddings;
  std::string index_path;
  std::string query;
  std::size_t k = 5;
  std::string leave_out;
  std::string out_path;
  bool pending = false;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("retrieve", "List the most similar reference entries for a record");
    c->add_option("--manifest", manifest, "Manifest TSV")->required()->check(CLI::ExistingFile);
    c->add_option("--embeddings", embeddings, "Embedding file")->required()->check(CLI::ExistingFile);
    c->add_option("--index", index_path, "Prebuilt index (default: built from the manifest)")
        ->check(CLI::ExistingFile);
    c->add_option("--query", query, "Record id to query")->required();
    c->add_option("-k,--k", k, "Number of hits")->check(CLI::PositiveNumber)->capture_default_str();
    c->add_option("--leave-out", leave_out, "Exclude references from this city");
    c->add_option("--out", out_path, "Also write the listing as CSV");
    c->callback([this] { pending = true; });
  }

  void exec(std::ostream& out, std::ostream& err) const {
    const auto data = load_dataset(manifest, embeddings);
    const dataset::ManifestRecord* rec = nullptr;
    for (const auto& r : data.records) {
      if (r.id == query) rec = &r;
    }
    if (!rec) throw Error("unknown query id " + query);
    const auto idx = reference_index(data, index_path);
    const auto q = index::normalize(dataset::record_embedding(*rec, data.embeddings).values());
    index::EntryFilter filter = index::exclude_id(query);
    if (!leave_out.empty()) filter = index::both(filter, index::exclude_city(leave_out));
    const auto hits = idx.search_topk(q.values(), k, filter);
    if (hits.size() < k) {
      err << "warning: requested " << k << " hits but only " << hits.size()
          << " reference entries are eligible\n";
    }
    std::string table = "rank,id,city,distance,similarity\n";
    for (std::size_t i = 0; i < hits.size(); ++i) {
      table += std::to_string(i + 1) + ',' + text::csv_field(hits[i].entry.id) + ',' +
               text::csv_field(hits[i].entry.city) + ',' + text::fixed(hits[i].distance, 4) + ',' +
               text::fixed(hits[i].similarity, 4) + '\n';
    }
    out << table;
    if (!out_path.empty()) open_out(out_path) << table;
  }
};

// ---------------------------------------------------------------- assess

struct AssessCmd {
  std::string manifest;
  std::string embeddings;
  std::string index_path;
  std::string mode = "rag";
  std::size_t k = 3;
  std::uint64_t seed = 1;
  int runs = 1;
  bool leave_city_out = false;
  std::string city;
  std::string out_path;
  BackendFlags backend;
  bool pending = false;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("assess", "Assess EVAL records and write predictions");
    c->add_option("--manifest", manifest, "Manifest TSV")->required()->check(CLI::ExistingFile);
    c->add_option("--embeddings", embeddings, "Embedding file")->required()->check(CLI::ExistingFile);
    c->add_option("--index", index_path, "Prebuilt index (default: built from the manifest)")
        ->check(CLI::ExistingFile);
    c->add_option("--mode", mode, "Assessment mode")
        ->check(CLI::IsMember({"plain", "rag", "random"}))
        ->capture_default_str();
    c->add_option("-k,--k", k, "References per query")->capture_default_str();
    c->add_option("--seed", seed, "Seed of the first random-mode run")->capture_default_str();
    c->add_option("--runs", runs, "Repeated runs (random mode uses seed, seed+1, ...)")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    c->add_flag("--leave-city-out", leave_city_out, "Never retrieve references from the query's city");
    c->add_option("--city", city, "Only assess records of this city");
    c->add_option("--out", out_path, "Predictions CSV to write")->required();
    backend.add_to(*c);
    c->callback([this] { pending = true; });
  }

  void exec(std::ostream& out) const {
    const auto data = load_dataset(manifest, embeddings);
    const auto idx = reference_index(data, index_path);
    auto be = backend.make();
    RunSpec spec;
    spec.leave_city_out = leave_city_out;
    spec.jobs = backend.jobs;
    spec.options = backend.options(data);
    std::optional<std::string> only;
    if (!city.empty()) only = city;
    std::vector<evaluation::Run> all;
    for (int r = 0; r < runs; ++r) {
      spec.mode = make_mode(mode, k, seed + static_cast<std::uint64_t>(r));
      all.push_back(run_assessment(data, idx, *be, spec, only));
    }
    const auto p = std::filesystem::path(out_path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    write_predictions(p, all);
    out << "assessed " << (all.empty() ? 0 : all.front().size()) << " records x " << runs << " run(s) with "
        << be->name() << ", mode " << spec.mode.label() << "; predictions in " << out_path << '\n';
  }
};

// ---------------------------------------------------------------- evaluate

struct EvaluateCmd {
  std::string manifest;
  std::string predictions;
  std::string out_path;
  std::string format = "csv";
  std::string averaging = "micro";
  std::string summary_path;
  bool pending = false;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("evaluate", "Score predictions against manifest ground truth");
    c->add_option("--manifest", manifest, "Manifest TSV")->required()->check(CLI::ExistingFile);
    c->add_option("--predictions", predictions, "Predictions CSV")->required()->check(CLI::ExistingFile);
    c->add_option("--out", out_path, "Report file")->required();
    c->add_option("--format", format, "Report format")
        ->check(CLI::IsMember({"csv", "markdown"}))
        ->capture_default_str();
    c->add_option("--averaging", averaging, "Overall row: micro (pooled) or macro (mean of cities)")
        ->check(CLI::IsMember({"micro", "macro"}))
        ->capture_default_str();
    c->add_option("--presence-summary", summary_path, "Write presence accuracy/precision/recall/F1");
    c->callback([this] { pending = true; });
  }

  void exec(std::ostream& out) const {
    const auto records = dataset::load_manifest(manifest);
    const auto runs = score_predictions(read_predictions(predictions), records);
    const auto table = evaluation::aggregate(
        runs, averaging == "macro" ? evaluation::Averaging::Macro : evaluation::Averaging::Micro);
    const auto p = std::filesystem::path(out_path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    evaluation::emit_report(table, p,
                            format == "markdown" ? evaluation::ReportFormat::Markdown
                                                 : evaluation::ReportFormat::Csv);
    if (!summary_path.empty()) {
      evaluation::emit_presence_summary(evaluation::presence_summary(runs), summary_path);
    }
    for (const auto& row : table.rows) {
      if (row.city != evaluation::kOverall) continue;
      out << evaluation::to_string(row.task) << ": " << text::fixed(100.0 * row.mean, 2) << " +/- "
          << text::fixed(100.0 * row.std, 2) << " % (" << row.n_records << " records, " << row.n_runs
          << " run(s))\n";
    }
  }
};

// ---------------------------------------------------------------- ablate

struct AblateCmd {
  std::string kind;
  std::string manifest;
  std::string embeddings;
  std::string out_dir;
  std::vector<std::size_t> ks = {0, 1, 3, 5, 10};
  std::size_t k = 3;
  std::uint64_t seed = 1;
  int runs = 1;
  BackendFlags backend;
  bool pending = false;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("ablate", "Retrieval ablations: k-sweep, random-vs-similar, leave-one-out");
    c->add_option("--kind", kind, "Ablation")
        ->required()
        ->check(CLI::IsMember({"k-sweep", "random-vs-similar", "leave-one-out"}));
    c->add_option("--manifest", manifest, "Manifest TSV")->required()->check(CLI::ExistingFile);
    c->add_option("--embeddings", embeddings, "Embedding file")->required()->check(CLI::ExistingFile);
    c->add_option("--out", out_dir, "Output directory")->required();
    c->add_option("--ks", ks, "K values for k-sweep (0 = plain)")->delimiter(',')->capture_default_str();
    c->add_option("-k,--k", k, "K for random-vs-similar and leave-one-out")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    c->add_option("--seed", seed, "Seed of the first random run")->capture_default_str();
    c->add_option("--runs", runs, "Random-mode runs to average")->check(CLI::PositiveNumber)->capture_default_str();
    backend.add_to(*c);
    c->callback([this] { pending = true; });
  }

  void exec(std::ostream& out) const {
    const auto data = load_dataset(manifest, embeddings);
    const auto idx = dataset::build_reference_index(data.records, data.embeddings);
    auto be = backend.make();
    RunSpec spec;
    spec.jobs = backend.jobs;
    spec.options = backend.options(data);
    std::filesystem::create_directories(out_dir);
    const auto dir = std::filesystem::path(out_dir);
    const std::string task_header = "presence,quantity,location";

    if (kind == "k-sweep") {
      std::string table = "k,mode," + task_header + '\n';
      for (auto kv : ks) {
        spec.mode = make_mode("rag", kv, seed);
        const auto acc = overall_accuracy({run_assessment(data, idx, *be, spec)});
        table += std::to_string(kv) + ',' + spec.mode.label() + ',' + accuracy_cells(acc) + '\n';
      }
      open_out(dir / "k_sweep.csv") << table;
      out << table;
    } else if (kind == "random-vs-similar") {
      spec.mode = assessor::AssessmentMode::rag(k);
      const auto similar = overall_accuracy({run_assessment(data, idx, *be, spec)});
      std::vector<evaluation::Run> random_runs;
      for (int r = 0; r < runs; ++r) {
        spec.mode = assessor::AssessmentMode::random(k, seed + static_cast<std::uint64_t>(r));
        random_runs.push_back(run_assessment(data, idx, *be, spec));
      }
      const auto random = overall_accuracy(random_runs);
      std::string table = "task,similar,random,difference\n";
      for (auto t : evaluation::kTasks) {
        table += std::string(evaluation::to_string(t)) + ',' + text::fixed(similar.at(t), 6) + ',' +
                 text::fixed(random.at(t), 6) + ',' + text::fixed(similar.at(t) - random.at(t), 6) + '\n';
      }
      open_out(dir / "random_vs_similar.csv") << table;
      out << table;
    } else {
      spec.mode = assessor::AssessmentMode::rag(k);
      spec.leave_city_out = true;
      std::set<std::string> cities;
      for (const auto& r : data.records) {
        if (r.split == dataset::Split::Eval) cities.insert(r.city);
      }
      std::string table = "city," + task_header + ",n_records\n";
      for (const auto& city : cities) {
        const auto run = run_assessment(data, idx, *be, spec, city);
        table += text::csv_field(city) + ',' + accuracy_cells(overall_accuracy({run})) + ',' +
                 std::to_string(run.size()) + '\n';
      }
      open_out(dir / "leave_one_out.csv") << table;
      out << table;
    }
  }
};

// ---------------------------------------------------------------- simulate

sim::ModelAccuracy parse_model(const std::string& spec) {
  const auto eq = spec.find('=');
  const auto fail = [&] { return UsageError("--model expects name=a_q,a_ell, got '" + spec + "'"); };
  if (eq == std::string::npos || eq == 0) throw fail();
  const auto parts = text::split(std::string_view(spec).substr(eq + 1), ',');
  if (parts.size() != 2) throw fail();
  sim::ModelAccuracy m;
  m.name = spec.substr(0, eq);
  try {
    std::size_t u1 = 0, u2 = 0;
    m.quantity_accuracy = std::stod(parts[0], &u1);
    m.location_accuracy = std::stod(parts[1], &u2);
    if (u1 != parts[0].size() || u2 != parts[1].size()) throw fail();
  } catch (const std::invalid_argument&) {
    throw fail();
  }
  return m;
}

sim::SiteList load_sites(const std::string& spec, const grid::Network& net) {
  if (spec.starts_with("synth:")) {
    const auto parts = text::split(spec, ':');
    if (parts.size() != 3) throw UsageError("--sites expects a file or synth:N:seed");
    try {
      return sim::synthetic_sites(net, std::stoul(parts[1]), std::stoull(parts[2]));
    } catch (const std::invalid_argument&) {
      throw UsageError("--sites expects a file or synth:N:seed");
    }
  }
  return sim::read_sites(spec);
}

struct SimulateCmd {
  std::string case_path;
  std::string sites = "synth:1000:1";
  sim::ScenarioConfig cfg;
  std::vector<std::string> models;
  std::string profiles;
  std::string out_dir;
  grid::PowerFlowOptions pf;
  unsigned threads = 0;
  bool pending = false;

  void add(CLI::App& app) {
    auto* c = app.add_subcommand("simulate", "Day-long feeder simulation with descriptor errors");
    c->add_option("--case", case_path, "MATPOWER case file")->required()->check(CLI::ExistingFile);
    c->add_option("--sites", sites, "Site CSV or synth:N:seed")->capture_default_str();
    c->add_option("--alpha-load", cfg.alpha_load, "Load scaling factor")->capture_default_str();
    c->add_option("--penetration", cfg.penetration, "True peak PV / peak load")->capture_default_str();
    c->add_option("--per-panel-kw", cfg.per_panel_kw, "Capacity per panel")->capture_default_str();
    c->add_option("--under-bias", cfg.under_bias, "Probability a quantity error moves down")
        ->capture_default_str();
    c->add_option("--seed", cfg.seed, "Error-injection seed")->capture_default_str();
    c->add_option("--model", models, "name=a_q,a_ell (repeatable; default: RAG, GPT-4o and GPT-5.2)");
    c->add_option("--mape-epsilon", cfg.mape_epsilon_frac, "MAPE threshold as a fraction of max |net load|")
        ->capture_default_str();
    c->add_option("--profiles", profiles, "Directory with load.csv / pv.csv overrides")
        ->check(CLI::ExistingDirectory);
    c->add_option("--out", out_dir, "Output directory")->required();
    c->add_option("--pf-tol", pf.tolerance, "Power-flow mismatch tolerance (pu)")->capture_default_str();
    c->add_option("--pf-max-iter", pf.max_iterations, "Power-flow iteration limit")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    c->add_option("--threads", threads, "Worker threads (0 = all cores)")->capture_default_str();
    c->callback([this] { pending = true; });
  }

  void exec(std::ostream& out) {
    cfg.models.clear();
    if (models.empty()) {
      cfg.models = sim::default_models();
    } else {
      for (const auto& m : models) cfg.models.push_back(parse_model(m));
    }
    cfg.validate();
    const auto net = grid::parse_case(case_path);
    const auto site_list = load_sites(sites, net);
    const auto day = profiles.empty() ? sim::DayProfiles::defaults() : sim::DayProfiles::from_directory(profiles);
    const auto result = sim::simulate_scenario(net, site_list, cfg, day, {pf, threads});
    const auto metrics = sim::compute_metrics(result, cfg.mape_epsilon_frac);
    sim::emit_simulation_report(result, metrics, out_dir);

    const double true_total = result.total_capacity_mw[result.model_index(sim::kTrueModel)];
    char line[256];
    std::snprintf(line, sizeof line, "%-12s %12s %9s %9s %9s %12s\n", "model", "capacity_mw", "bias_pct",
                  "rmse_mw", "mape_pct", "max_dv_pu");
    out << line;
    for (const auto& m : metrics) {
      const double bias = 100.0 * (m.total_capacity_mw - true_total) / true_total;
      const auto opt = [](const std::optional<double>& v) { return v ? text::fixed(*v, 2) : std::string("--"); };
      std::snprintf(line, sizeof line, "%-12s %12.2f %9s %9s %9s %12.6f\n", m.model.c_str(),
                    m.total_capacity_mw, m.model == sim::kTrueModel ? "--" : text::fixed(bias, 2).c_str(),
                    opt(m.rmse_mw).c_str(), opt(m.mape_pct).c_str(), m.max_voltage_dev_pu);
      out << line;
    }
    out << "simulated " << site_list.size() << " sites, " << result.models.size() << " scenarios x "
        << result.grid.steps << " steps, kappa " << text::fixed(result.kappa, 6) << "; reports in "
        << out_dir << '\n';
  }
};

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Rooftop PV retrieval-augmented assessment and feeder simulation", "pvrag"};
  app.set_config("--config", "", "TOML/INI file with flag values (command-line flags take precedence)");
  app.require_subcommand(1);

  SynthCmd synth;
  IngestCmd ingest;
  IndexCmd index_cmd;
  RetrieveCmd retrieve;
  AssessCmd assess;
  EvaluateCmd evaluate;
  AblateCmd ablate;
  SimulateCmd simulate;
  synth.add(app);
  ingest.add(app);
  index_cmd.add(app);
  retrieve.add(app);
  assess.add(app);
  evaluate.add(app);
  ablate.add(app);
  simulate.add(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    if (e.get_exit_code() == 0) return 0;
    err << "run with --help for usage\n";
    return kUsageError;
  }

  try {
    int code = 0;
    if (synth.pending) synth.exec(out);
    if (ingest.pending) code = ingest.exec(out, err);
    if (index_cmd.pending) index_cmd.exec(out);
    if (retrieve.pending) retrieve.exec(out, err);
    if (assess.pending) assess.exec(out);
    if (evaluate.pending) evaluate.exec(out);
    if (ablate.pending) ablate.exec(out);
    if (simulate.pending) simulate.exec(out);
    return code;
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntimeFailure;
  }
}

}  // namespace pvrag::cli
