#include "pvrag/grid/network.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <optional>
#include <sstream>

#include "pvrag/core/text.hpp"

namespace pvrag::grid {

Network::Network(double base_mva, std::vector<Bus> buses, std::vector<Generator> generators,
                 std::vector<Branch> branches)
    : base_mva_(base_mva),
      buses_(std::move(buses)),
      generators_(std::move(generators)),
      branches_(std::move(branches)) {
  if (!(base_mva_ > 0.0)) throw Error("baseMVA must be positive");
  if (buses_.empty()) throw Error("network has no buses");

  for (std::size_t i = 0; i < buses_.size(); ++i) {
    if (!index_of_.emplace(buses_[i].id, i).second) {
      throw Error("duplicate bus id " + std::to_string(buses_[i].id));
    }
  }

  gen_p_mw_.assign(buses_.size(), 0.0);
  gen_q_mvar_.assign(buses_.size(), 0.0);
  std::vector<bool> has_gen(buses_.size(), false);
  for (const auto& g : generators_) {
    if (!has_bus(g.bus)) throw Error("generator at unknown bus " + std::to_string(g.bus));
    if (!g.in_service) continue;
    const auto i = bus_index(g.bus);
    gen_p_mw_[i] += g.p_mw;
    gen_q_mvar_[i] += g.q_mvar;
    if (!has_gen[i] && buses_[i].kind != BusKind::PQ) buses_[i].v_setpoint_pu = g.v_setpoint_pu;
    has_gen[i] = true;
  }

  std::optional<std::size_t> slack;
  for (std::size_t i = 0; i < buses_.size(); ++i) {
    auto& b = buses_[i];
    if (b.kind == BusKind::PvGen && !has_gen[i]) b.kind = BusKind::PQ;
    if (b.kind == BusKind::Slack) {
      if (slack) {
        throw Error("network has more than one slack bus (" + std::to_string(buses_[*slack].id) +
                    ", " + std::to_string(b.id) + ")");
      }
      slack = i;
    }
    if (b.kind != BusKind::PQ && !(b.v_setpoint_pu > 0.0)) {
      throw Error("bus " + std::to_string(b.id) + ": voltage setpoint must be positive");
    }
  }
  if (!slack) throw Error("network has no slack bus");
  slack_ = *slack;

  adjacency_.assign(buses_.size(), {});
  for (const auto& br : branches_) {
    if (!has_bus(br.from_bus) || !has_bus(br.to_bus)) {
      throw Error("branch " + std::to_string(br.from_bus) + "-" + std::to_string(br.to_bus) +
                  " references an unknown bus");
    }
    if (br.from_bus == br.to_bus) {
      throw Error("branch from bus " + std::to_string(br.from_bus) + " to itself");
    }
    if (!br.in_service) continue;
    if (br.x_pu == 0.0) {
      throw Error("in-service branch " + std::to_string(br.from_bus) + "-" +
                  std::to_string(br.to_bus) + " has zero reactance");
    }
    const auto f = bus_index(br.from_bus);
    const auto t = bus_index(br.to_bus);
    adjacency_[f].push_back(t);
    adjacency_[t].push_back(f);
  }
  for (auto& n : adjacency_) {
    std::sort(n.begin(), n.end());
    n.erase(std::unique(n.begin(), n.end()), n.end());
  }

  std::vector<bool> seen(buses_.size(), false);
  std::vector<std::size_t> stack = {slack_};
  seen[slack_] = true;
  while (!stack.empty()) {
    const auto i = stack.back();
    stack.pop_back();
    for (auto j : adjacency_[i]) {
      if (!seen[j]) {
        seen[j] = true;
        stack.push_back(j);
      }
    }
  }
  for (std::size_t i = 0; i < buses_.size(); ++i) {
    if (!seen[i]) {
      throw Error("network is disconnected: bus " + std::to_string(buses_[i].id) +
                  " is not reachable from the slack bus over in-service branches");
    }
  }
}

std::size_t Network::bus_index(int id) const {
  auto it = index_of_.find(id);
  if (it == index_of_.end()) throw Error("unknown bus id " + std::to_string(id));
  return it->second;
}

double Network::total_p_demand_mw() const {
  double s = 0.0;
  for (const auto& b : buses_) s += b.p_demand_mw;
  return s;
}

double Network::total_q_demand_mvar() const {
  double s = 0.0;
  for (const auto& b : buses_) s += b.q_demand_mvar;
  return s;
}

namespace {

struct Row {
  std::vector<double> values;
  std::size_t line = 0;
};

struct CaseTables {
  std::optional<double> base_mva;
  std::vector<Row> bus;
  std::vector<Row> gen;
  std::vector<Row> branch;
};

std::string strip_comment(const std::string& line) {
  const auto pos = line.find('%');
  return pos == std::string::npos ? line : line.substr(0, pos);
}

std::vector<double> parse_numbers(std::string_view chunk, const std::string& at) {
  std::vector<double> values;
  std::string token;
  auto flush = [&] {
    if (token.empty()) return;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(token, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != token.size()) throw FormatError(at + ": malformed number '" + token + "'");
    values.push_back(v);
    token.clear();
  };
  for (char c : chunk) {
    if (c == ' ' || c == '\t' || c == ',' || c == '\r') {
      flush();
    } else {
      token += c;
    }
  }
  flush();
  return values;
}

CaseTables read_tables(std::string_view text, const std::string& source) {
  CaseTables tables;
  std::vector<Row>* current = nullptr;
  bool skipping = false;  // inside a table we do not use
  char closer = ']';
  std::size_t line_no = 0;

  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string at = source + ":" + std::to_string(line_no);
    std::string line = strip_comment(raw);
    auto body = std::string(text::trim(line));
    if (body.empty()) continue;

    if (!current && !skipping) {
      if (!body.starts_with("mpc.")) continue;
      const auto eq = body.find('=');
      if (eq == std::string::npos) continue;
      const auto name = std::string(text::trim(std::string_view(body).substr(4, eq - 4)));
      auto rhs = std::string(text::trim(std::string_view(body).substr(eq + 1)));
      if (name == "baseMVA") {
        if (!rhs.empty() && rhs.back() == ';') rhs.pop_back();
        const auto v = parse_numbers(rhs, at);
        if (v.size() != 1) throw FormatError(at + ": malformed baseMVA");
        tables.base_mva = v.front();
        continue;
      }
      if (rhs.empty() || (rhs.front() != '[' && rhs.front() != '{')) continue;
      closer = rhs.front() == '[' ? ']' : '}';
      if (name == "bus") {
        current = &tables.bus;
      } else if (name == "gen") {
        current = &tables.gen;
      } else if (name == "branch") {
        current = &tables.branch;
      } else {
        skipping = true;
      }
      body = rhs.substr(1);
      if (text::trim(body).empty()) continue;
    }

    const auto close = body.find(closer);
    const std::string data = close == std::string::npos ? body : body.substr(0, close);
    if (current) {
      for (const auto& chunk : text::split(data, ';')) {
        auto values = parse_numbers(chunk, at);
        if (!values.empty()) current->push_back({std::move(values), line_no});
      }
    }
    if (close != std::string::npos) {
      current = nullptr;
      skipping = false;
    }
  }
  if (current || skipping) throw FormatError(source + ": unterminated table at end of file");
  return tables;
}

void require_columns(const Row& row, std::size_t n, const std::string& table,
                     const std::string& source) {
  if (row.values.size() < n) {
    throw FormatError(source + ":" + std::to_string(row.line) + ": " + table + " row has " +
                      std::to_string(row.values.size()) + " columns, expected at least " +
                      std::to_string(n));
  }
}

int as_id(double v, const std::string& at) {
  if (v != std::floor(v)) throw FormatError(at + ": bus number must be an integer");
  return static_cast<int>(v);
}

}  // namespace

Network parse_case_text(std::string_view text, const std::string& source) {
  const auto tables = read_tables(text, source);
  if (!tables.base_mva) throw FormatError(source + ": missing mpc.baseMVA");
  if (tables.bus.empty()) throw FormatError(source + ": missing or empty mpc.bus table");

  std::vector<Bus> buses;
  for (const auto& row : tables.bus) {
    require_columns(row, 13, "bus", source);
    const auto at = source + ":" + std::to_string(row.line);
    const auto& v = row.values;
    Bus b;
    b.id = as_id(v[0], at);
    switch (static_cast<int>(v[1])) {
      case 1:
        b.kind = BusKind::PQ;
        break;
      case 2:
        b.kind = BusKind::PvGen;
        break;
      case 3:
        b.kind = BusKind::Slack;
        break;
      default:
        throw FormatError(at + ": unsupported bus type " + text::fixed(v[1], 0));
    }
    b.p_demand_mw = v[2];
    b.q_demand_mvar = v[3];
    b.g_shunt_mw = v[4];
    b.b_shunt_mvar = v[5];
    b.v_setpoint_pu = v[7];
    b.base_kv = v[9];
    b.v_max_pu = v[11];
    b.v_min_pu = v[12];
    buses.push_back(b);
  }

  std::vector<Generator> gens;
  for (const auto& row : tables.gen) {
    require_columns(row, 8, "gen", source);
    const auto& v = row.values;
    gens.push_back({as_id(v[0], source + ":" + std::to_string(row.line)), v[1], v[2], v[5],
                    v[7] > 0.0});
  }

  std::vector<Branch> branches;
  for (const auto& row : tables.branch) {
    require_columns(row, 11, "branch", source);
    const auto at = source + ":" + std::to_string(row.line);
    const auto& v = row.values;
    Branch br;
    br.from_bus = as_id(v[0], at);
    br.to_bus = as_id(v[1], at);
    br.r_pu = v[2];
    br.x_pu = v[3];
    br.b_shunt_pu = v[4];
    br.tap_ratio = v[8] == 0.0 ? 1.0 : v[8];
    br.shift_deg = v[9];
    br.in_service = v[10] > 0.0;
    branches.push_back(br);
  }

  return Network(*tables.base_mva, std::move(buses), std::move(gens), std::move(branches));
}

Network parse_case(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open case file " + path.string());
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_case_text(text, path.string());
}

}  // namespace pvrag::grid
