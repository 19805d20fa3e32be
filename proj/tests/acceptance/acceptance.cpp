#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "commands.hpp"
#include "pipeline.hpp"
#include "pvrag/assessor/backend.hpp"
#include "pvrag/dataset/synthetic.hpp"
#include "pvrag/evaluation/aggregate.hpp"
#include "pvrag/evaluation/metrics.hpp"
#include "pvrag/grid/power_flow.hpp"
#include "pvrag/index/embedding.hpp"
#include "pvrag/index/vector_index.hpp"
#include "pvrag/sim/scenario.hpp"
#include "pvrag/sim/simulation.hpp"
#include "pvrag/sim/sites.hpp"
#include "test_support.hpp"

using namespace pvrag;

namespace {

using Clock = std::chrono::steady_clock;

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* format, double a = 0, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, format, a, b, c, d);
  return buf;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::filesystem::path case30_path() { return testkit::source_dir() / "data" / "cases" / "case30.m"; }

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

// Retrieval exactness

Verdict retrieval_exactness() {
  const std::size_t n = 1000, queries = 100, dim = 512;
  std::mt19937_64 gen(2024);
  index::VectorIndex idx(dim);
  std::vector<std::vector<float>> data;
  char id[32];
  for (std::size_t i = 0; i < n; ++i) {
    data.push_back(testkit::random_unit(gen, dim));
    std::snprintf(id, sizeof id, "e%04zu", i);
    idx.add(testkit::make_entry(id, "C", data.back()));
  }
  std::vector<std::vector<float>> qs;
  for (std::size_t q = 0; q < queries; ++q) qs.push_back(testkit::random_unit(gen, dim));

  std::size_t mismatches = 0;
  const auto t0 = Clock::now();
  std::vector<std::vector<index::RetrievalHit>> got;
  for (const auto& q : qs) {
    for (std::size_t k : {1, 3, 5, 10}) got.push_back(idx.search_topk(q, k));
  }
  const double elapsed = seconds_since(t0);

  std::size_t slot = 0;
  for (const auto& q : qs) {
    std::vector<std::pair<long double, std::size_t>> scan;
    for (std::size_t i = 0; i < n; ++i) {
      long double s = 0;
      for (std::size_t j = 0; j < dim; ++j) {
        const long double d = static_cast<long double>(q[j]) - data[i][j];
        s += d * d;
      }
      scan.emplace_back(std::sqrt(s), i);
    }
    std::sort(scan.begin(), scan.end());
    for (std::size_t k : {1, 3, 5, 10}) {
      const auto& hits = got[slot++];
      bool same = hits.size() == k;
      for (std::size_t r = 0; same && r < k; ++r) {
        std::snprintf(id, sizeof id, "e%04zu", scan[r].second);
        same = hits[r].entry.id == id;
      }
      mismatches += same ? 0 : 1;
    }
  }
  return {mismatches == 0 && elapsed < 1.0,
          fmt("%.0f/400 searches differ from exhaustive scan, %.3f s", static_cast<double>(mismatches), elapsed)};
}

// Metric identity

Verdict metric_identity() {
  std::mt19937_64 gen(7);
  std::normal_distribution<double> g;
  double worst_identity = 0.0, worst_sim = 0.0;
  for (int i = 0; i < 10000; ++i) {
    std::vector<double> a(512), b(512);
    for (auto& x : a) x = g(gen);
    for (auto& x : b) x = g(gen);
    const double na = index::l2_norm(std::span<const double>(a)), nb = index::l2_norm(std::span<const double>(b));
    for (auto& x : a) x /= na;
    for (auto& x : b) x /= nb;
    const double d = index::distance(std::span<const double>(a), std::span<const double>(b));
    const double c = index::cosine(std::span<const double>(a), std::span<const double>(b));
    worst_identity = std::max(worst_identity, std::abs(d * d - 2.0 * (1.0 - c)));

    const auto fa = testkit::random_unit(gen, 64), fb = testkit::random_unit(gen, 64);
    const double fd = index::distance(fa, fb);
    worst_sim = std::max(worst_sim, std::abs(index::similarity(fa, fb) - 1.0 / (1.0 + fd)));
  }
  return {worst_identity <= 1e-9 && worst_sim <= 1e-12,
          fmt("max |d^2 - 2(1-cos)| = %.2e, max |sim - 1/(1+d)| = %.2e", worst_identity, worst_sim)};
}

// F1 reproduction

Verdict f1_reproduction() {
  const auto f1 = evaluation::f1_score(0.987, 0.819);
  const auto p = evaluation::precision_from_recall_f1(0.978, 0.969);
  const bool ok = f1 && p && std::abs(*f1 - 0.895) <= 0.001 && std::abs(*p - 0.960) <= 0.002;
  return {ok, fmt("F1(98.7%%, 81.9%%) = %.2f%%, precision(recall 97.8%%, F1 96.9%%) = %.2f%%", f1.value_or(0) * 100,
                  p.value_or(0) * 100)};
}

// Power flow

std::string two_bus_case(double load_mw) {
  std::ostringstream s;
  s << "mpc.baseMVA = 100;\n"
    << "mpc.bus = [\n1 3 0 0 0 0 1 1 0 135 1 1.1 0.9;\n2 1 " << load_mw << " 0 0 0 1 1 0 135 1 1.1 0.9;\n];\n"
    << "mpc.gen = [\n1 0 0 300 -300 1 100 1;\n];\n"
    << "mpc.branch = [\n1 2 0 0.1 0 250 250 250 0 0 1 -360 360;\n];\n";
  return s.str();
}

struct OracleFixture {
  double slack_p_mw = 0.0;
  std::map<int, double> vm;
};

OracleFixture read_oracle() {
  std::ifstream in(testkit::source_dir() / "tests" / "fixtures" / "case30_pf_oracle.csv");
  OracleFixture o;
  for (std::string line; std::getline(in, line);) {
    if (line.empty() || line[0] == '#' || line.starts_with("bus,")) continue;
    std::istringstream row(line);
    std::string a, b;
    std::getline(row, a, ',');
    std::getline(row, b, ',');
    if (a == "slack_p_mw") {
      o.slack_p_mw = std::stod(b);
    } else {
      o.vm[std::stoi(a)] = std::stod(b);
    }
  }
  return o;
}

double jacobian_fd_error(const grid::Network& net) {
  const grid::PowerFlowSolver solver(net);
  const auto eq = solver.equations(grid::nominal_demands(net));
  std::mt19937_64 gen(99);
  std::uniform_real_distribution<double> vm_d(0.9, 1.1), va_d(-0.3, 0.3);
  const auto n = static_cast<Eigen::Index>(net.bus_count());
  double worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    Eigen::VectorXd vm(n), va(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      vm(i) = vm_d(gen);
      va(i) = va_d(gen);
    }
    const Eigen::MatrixXd j = eq.jacobian(vm, va);
    const Eigen::VectorXd x0 = eq.pack(vm, va);
    const double h = 1e-6;
    for (Eigen::Index c = 0; c < x0.size(); ++c) {
      Eigen::VectorXd xp = x0, xm = x0;
      xp(c) += h;
      xm(c) -= h;
      Eigen::VectorXd vmp = vm, vap = va, vmm = vm, vam = va;
      eq.unpack(xp, vmp, vap);
      eq.unpack(xm, vmm, vam);
      const Eigen::VectorXd fd = (eq.mismatch(vmp, vap) - eq.mismatch(vmm, vam)) / (2 * h);
      for (Eigen::Index r = 0; r < fd.size(); ++r) {
        worst = std::max(worst, std::abs(j(r, c) - fd(r)) / std::max(1.0, std::abs(fd(r))));
      }
    }
  }
  return worst;
}

Verdict power_flow() {
  const auto flat_net = grid::parse_case_text(two_bus_case(0));
  const auto flat = grid::solve_power_flow(flat_net);
  double flat_dev = 0.0;
  for (std::size_t i = 0; i < flat_net.bus_count(); ++i) {
    flat_dev = std::max(flat_dev, std::abs(flat.v_mag_pu[i] - flat_net.buses()[i].v_setpoint_pu));
  }
  const bool a = flat_dev == 0.0 && std::abs(flat.slack_p_mw) <= 1e-10;

  const auto two = grid::solve_power_flow(grid::parse_case_text(two_bus_case(100)), std::nullopt, {1e-13, 20});
  const double delta = std::asin(0.2) / 2;
  const double b_err = std::max(std::abs(two.v_mag_pu[1] - std::cos(delta)), std::abs(two.v_ang_rad[1] + delta));
  const bool b = b_err <= 1e-8;

  const auto net = grid::parse_case(case30_path());
  const auto oracle = read_oracle();
  const auto sol = grid::solve_power_flow(net, std::nullopt, {1e-10, 20});
  double vm_err = 0.0;
  for (const auto& [id, vm] : oracle.vm) vm_err = std::max(vm_err, std::abs(sol.v_mag_pu[net.bus_index(id)] - vm));
  const double slack_err = std::abs(sol.slack_p_mw - oracle.slack_p_mw);
  const bool c = oracle.vm.size() == 30 && vm_err <= 1e-6 && slack_err <= 1e-4;

  const double jac_err = jacobian_fd_error(net);
  const bool d = jac_err <= 1e-6;

  const auto sites = sim::synthetic_sites(net, 1000, 1);
  sim::ScenarioConfig cfg;
  cfg.models = sim::default_models();
  const auto t0 = Clock::now();
  const auto day = sim::simulate_scenario(net, sites, cfg);
  const double elapsed = seconds_since(t0);
  const bool timing = elapsed < 10.0 && day.models.size() == 4;

  std::string detail = fmt("flat |dV| %.1e slack %.1e MW; 2-bus err %.1e pu; ", flat_dev, flat.slack_p_mw, b_err);
  detail += fmt("case30 |V| err %.1e pu slack err %.1e MW; Jacobian rel err %.1e; ", vm_err, slack_err, jac_err);
  detail += fmt("day simulation %.2f s", elapsed);
  return {a && b && c && d && timing, detail};
}

// Zero-error baseline

Verdict zero_error_baseline() {
  const auto net = grid::parse_case(case30_path());
  sim::ScenarioConfig cfg;
  cfg.models = {{"RAG", 1, 1}, {"GPT-4o", 1, 1}, {"GPT-5.2", 1, 1}};
  const grid::PowerFlowOptions pf;
  const auto metrics = sim::compute_metrics(sim::simulate_scenario(net, sim::synthetic_sites(net, 1000, 1), cfg));
  double worst_rmse = 0.0, worst_mape = 0.0, worst_v = 0.0;
  for (std::size_t m = 1; m < metrics.size(); ++m) {
    worst_rmse = std::max(worst_rmse, metrics[m].rmse_mw.value_or(1e9));
    worst_mape = std::max(worst_mape, metrics[m].mape_pct.value_or(1e9));
    worst_v = std::max(worst_v, metrics[m].max_voltage_dev_pu);
  }
  const bool ok = worst_rmse < 0.005 && worst_mape < 0.005 && worst_v <= 2 * pf.tolerance;
  return {ok, fmt("max RMSE %.2f MW, max MAPE %.2f%%, max voltage deviation %.1e pu", worst_rmse, worst_mape, worst_v)};
}

// Capacity ordering and sign

Verdict capacity_ordering() {
  const auto net = grid::parse_case(case30_path());
  const int seeds = 400;
  int ordered = 0, all_negative = 0;
  std::array<double, 3> mean_bias{}, mean_rmse{};
  for (int s = 1; s <= seeds; ++s) {
    sim::ScenarioConfig cfg;
    cfg.models = sim::default_models();
    cfg.seed = static_cast<std::uint64_t>(s);
    const auto sites = sim::synthetic_sites(net, 1000, cfg.seed);
    const auto metrics = sim::compute_metrics(sim::simulate_scenario(net, sites, cfg));
    std::array<double, 3> bias{}, rmse{};
    for (std::size_t m = 0; m < 3; ++m) {
      bias[m] = metrics[m + 1].total_capacity_mw - metrics[0].total_capacity_mw;
      rmse[m] = *metrics[m + 1].rmse_mw;
      mean_bias[m] += bias[m] / seeds;
      mean_rmse[m] += rmse[m] / seeds;
    }
    const bool bias_order = std::abs(bias[0]) < std::abs(bias[1]) && std::abs(bias[1]) < std::abs(bias[2]);
    const bool rmse_order = rmse[0] < rmse[1] && rmse[1] < rmse[2];
    ordered += bias_order && rmse_order ? 1 : 0;
    all_negative += bias[0] < 0 && bias[1] < 0 && bias[2] < 0 ? 1 : 0;
  }
  const double frac = static_cast<double>(ordered) / seeds;
  const bool negative = all_negative == seeds;
  std::string detail = fmt("ordered in %.0f/%.0f seeds (%.2f%%); ", ordered, seeds, 100 * frac);
  detail += fmt("all biases negative in %.0f/%.0f seeds; ", all_negative, seeds);
  detail += fmt("mean bias %.2f / %.2f / %.2f MW; ", mean_bias[0], mean_bias[1], mean_bias[2]);
  detail += fmt("mean RMSE %.2f / %.2f / %.2f MW", mean_rmse[0], mean_rmse[1], mean_rmse[2]);
  return {negative && frac >= 0.95, detail};
}

// Capacity conservation

Verdict capacity_conservation() {
  const auto net = grid::parse_case(case30_path());
  const auto adj = sim::bus_adjacency(net);
  int exact = 0, moved = 0;
  const int seeds = 50;
  for (int s = 1; s <= seeds; ++s) {
    const auto seed = static_cast<std::uint64_t>(s);
    const auto sites = sim::synthetic_sites(net, 1000, seed);
    const auto relocated = sim::inject_errors(sites, adj, 1.0, 0.5, 0.75, seed);
    const auto scaled = sim::aggregate_and_scale({{sim::kTrueModel, sites}, {"relocated", relocated}}, net, {});
    exact += scaled.total_capacity_mw[0] == scaled.total_capacity_mw[1] ? 1 : 0;
    for (std::size_t i = 0; i < sites.size(); ++i) moved += sites[i].bus != relocated[i].bus ? 1 : 0;
  }
  return {exact == seeds && moved > 0,
          fmt("total capacity identical in %.0f/%.0f seeds (%.0f sites relocated)", exact, seeds, moved)};
}

// Error-injection calibration

Verdict injection_calibration() {
  const auto net = grid::parse_case(case30_path());
  const std::size_t n = 100000;
  const double aq = 0.862;
  const auto sites = sim::synthetic_sites(net, n, 17);
  const auto out = sim::inject_errors(sites, sim::bus_adjacency(net), aq, 0.802, 0.75, 17);
  std::size_t kept = 0;
  for (std::size_t i = 0; i < n; ++i) kept += out[i].quantity == sites[i].quantity ? 1 : 0;
  const double frac = static_cast<double>(kept) / n;
  const double sigma = std::sqrt(aq * (1 - aq) / n);
  return {std::abs(frac - aq) <= 3 * sigma,
          fmt("unchanged fraction %.5f, target %.3f +/- %.5f (3 sigma)", frac, aq, 3 * sigma)};
}

// End-to-end mock pipeline

Verdict end_to_end_mock() {
  testkit::TempDir dir("acceptance-e2e");
  assessor::MockBackend mock;
  double similar_sum = 0.0, random_sum = 0.0;
  const int seeds = 20;
  bool report_ok = false;
  for (int s = 1; s <= seeds; ++s) {
    dataset::SynthConfig sc;
    sc.cities = 2;
    sc.per_split = 240;
    sc.seed = static_cast<std::uint64_t>(s);
    auto synth = dataset::generate_synthetic_dataset(sc);
    cli::Dataset data{std::move(synth.records), std::move(synth.embeddings)};
    const auto refs = dataset::build_reference_index(data.records, data.embeddings);

    cli::RunSpec rag;
    rag.mode = assessor::AssessmentMode::rag(3);
    const auto similar_run = cli::run_assessment(data, refs, mock, rag);
    cli::RunSpec random;
    random.mode = assessor::AssessmentMode::random(3, static_cast<std::uint64_t>(s));
    const auto random_run = cli::run_assessment(data, refs, mock, random);
    similar_sum += cli::overall_accuracy({similar_run}).at(evaluation::Task::Presence) / seeds;
    random_sum += cli::overall_accuracy({random_run}).at(evaluation::Task::Presence) / seeds;

    if (s == 1) {
      const auto table = evaluation::aggregate({similar_run});
      evaluation::emit_report(table, dir / "report.csv", evaluation::ReportFormat::Csv);
      const auto back = evaluation::read_report(dir / "report.csv", evaluation::ReportFormat::Csv);
      report_ok = similar_run.size() == 480 && back.rows.size() == 9;
    }
  }
  std::string detail = report_ok ? "report written; " : "report missing; ";
  detail += fmt("presence accuracy similar %.2f%% vs random %.2f%% over 20 seeds", 100 * similar_sum, 100 * random_sum);
  return {report_ok && similar_sum >= random_sum, detail};
}

// CLI determinism

std::map<std::string, std::string> snapshot(const std::filesystem::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : std::filesystem::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) files[std::filesystem::relative(e.path(), root).string()] = slurp(e.path());
  }
  return files;
}

std::map<std::string, std::string> run_cli_suite(const std::filesystem::path& root, bool& all_ok) {
  std::filesystem::remove_all(root);
  std::filesystem::create_directories(root);
  const auto d = [&](const std::string& p) { return (root / p).string(); };
  const std::vector<std::vector<std::string>> commands = {
      {"synth", "--out", d("data"), "--cities", "3", "--per-split", "40", "--seed", "5"},
      {"ingest", "--manifest", d("data/manifest.tsv"), "--embeddings", d("data/embeddings.pveb"), "--pattern", "none"},
      {"index", "--manifest", d("data/manifest.tsv"), "--embeddings", d("data/embeddings.pveb"), "--out", d("refs.pvix")},
      {"retrieve", "--manifest", d("data/manifest.tsv"), "--embeddings", d("data/embeddings.pveb"), "--index",
       d("refs.pvix"), "--query", "__FIRST__", "-k", "5", "--out", d("retrieve.csv")},
      {"assess", "--manifest", d("data/manifest.tsv"), "--embeddings", d("data/embeddings.pveb"), "--mode", "rag",
       "--out", d("rag.csv")},
      {"assess", "--manifest", d("data/manifest.tsv"), "--embeddings", d("data/embeddings.pveb"), "--mode", "random",
       "--runs", "3", "--seed", "8", "--out", d("random.csv")},
      {"evaluate", "--manifest", d("data/manifest.tsv"), "--predictions", d("random.csv"), "--out", d("report.md"),
       "--format", "markdown", "--presence-summary", d("presence.csv")},
      {"ablate", "--kind", "k-sweep", "--manifest", d("data/manifest.tsv"), "--embeddings", d("data/embeddings.pveb"),
       "--out", d("ablate")},
      {"ablate", "--kind", "leave-one-out", "--manifest", d("data/manifest.tsv"), "--embeddings",
       d("data/embeddings.pveb"), "--out", d("ablate")},
      {"simulate", "--case", case30_path().string(), "--seed", "3", "--out", d("sim")},
  };
  std::map<std::string, std::string> outputs;
  for (std::size_t c = 0; c < commands.size(); ++c) {
    auto args = commands[c];
    for (auto& a : args) {
      if (a == "__FIRST__") {
        std::istringstream manifest(slurp(root / "data" / "manifest.tsv"));
        std::string line;
        std::getline(manifest, line);
        std::getline(manifest, line);
        a = line.substr(0, line.find('\t'));
      }
    }
    args.insert(args.begin(), "pvrag");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    all_ok = cli::run(static_cast<int>(argv.size()), argv.data(), out, err) == 0 && all_ok;
    outputs["stdout:" + std::to_string(c)] = out.str();
  }
  for (auto& [name, content] : snapshot(root)) outputs[name] = content;
  return outputs;
}

Verdict cli_determinism() {
  testkit::TempDir dir("acceptance-cli");
  bool ok = true;
  const auto first = run_cli_suite(dir / "work", ok);
  const auto second = run_cli_suite(dir / "work", ok);
  std::size_t differing = 0;
  for (const auto& [name, content] : first) {
    auto it = second.find(name);
    differing += it == second.end() || it->second != content ? 1 : 0;
  }
  differing += first.size() != second.size() ? 1 : 0;
  return {ok && differing == 0,
          fmt("%.0f outputs compared across 10 commands, %.0f differ", static_cast<double>(first.size()),
              static_cast<double>(differing))};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"retrieval exactness", retrieval_exactness},
      {"metric identity", metric_identity},
      {"F1 reproduction", f1_reproduction},
      {"power-flow correctness", power_flow},
      {"zero-error baseline", zero_error_baseline},
      {"capacity bias ordering and sign", capacity_ordering},
      {"capacity conservation under relocation", capacity_conservation},
      {"error-injection calibration", injection_calibration},
      {"end-to-end mock pipeline", end_to_end_mock},
      {"CLI determinism", cli_determinism},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failures += v.pass ? 0 : 1;
    std::printf("%s %s: %s\n", v.pass ? "PASS" : "FAIL", name.c_str(), v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
