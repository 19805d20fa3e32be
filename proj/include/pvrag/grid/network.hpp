#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "pvrag/core/errors.hpp"

namespace pvrag::grid {

enum class BusKind { Slack, PvGen, PQ };

struct Bus {
  int id = 0;
  BusKind kind = BusKind::PQ;
  double p_demand_mw = 0.0;
  double q_demand_mvar = 0.0;
  double g_shunt_mw = 0.0;    // at 1 pu voltage
  double b_shunt_mvar = 0.0;  // at 1 pu voltage
  double base_kv = 0.0;
  double v_setpoint_pu = 1.0;  // held at slack and PV buses
  double v_min_pu = 0.0;
  double v_max_pu = 0.0;
};

struct Generator {
  int bus = 0;
  double p_mw = 0.0;
  double q_mvar = 0.0;
  double v_setpoint_pu = 1.0;
  bool in_service = true;
};

/// Standard pi-model branch with an off-nominal tap on the from side.
struct Branch {
  int from_bus = 0;
  int to_bus = 0;
  double r_pu = 0.0;
  double x_pu = 0.0;
  double b_shunt_pu = 0.0;  // total line charging
  double tap_ratio = 1.0;
  double shift_deg = 0.0;
  bool in_service = true;
};

/// Validated power network. Buses are addressed by position ("index") in
/// buses(); ids are the case-file numbers.
///
/// Invariants: unique bus ids, exactly one slack bus, every in-service branch
/// joins two distinct existing buses with x != 0, and the in-service branch
/// graph is connected. Voltage setpoints of slack/PV buses come from their
/// in-service generators; a PV bus without one is demoted to PQ.
class Network {
 public:
  Network(double base_mva, std::vector<Bus> buses, std::vector<Generator> generators,
          std::vector<Branch> branches);

  double base_mva() const noexcept { return base_mva_; }
  const std::vector<Bus>& buses() const noexcept { return buses_; }
  const std::vector<Generator>& generators() const noexcept { return generators_; }
  const std::vector<Branch>& branches() const noexcept { return branches_; }
  std::size_t bus_count() const noexcept { return buses_.size(); }

  std::size_t bus_index(int id) const;
  bool has_bus(int id) const { return index_of_.contains(id); }
  std::size_t slack_index() const noexcept { return slack_; }

  /// Sum of in-service generator active/reactive output scheduled at a bus.
  double scheduled_p_mw(std::size_t bus) const { return gen_p_mw_[bus]; }
  double scheduled_q_mvar(std::size_t bus) const { return gen_q_mvar_[bus]; }

  /// Sorted neighbour bus indices over in-service branches.
  const std::vector<std::vector<std::size_t>>& adjacency() const noexcept { return adjacency_; }

  double total_p_demand_mw() const;
  double total_q_demand_mvar() const;

 private:
  double base_mva_;
  std::vector<Bus> buses_;
  std::vector<Generator> generators_;
  std::vector<Branch> branches_;
  std::unordered_map<int, std::size_t> index_of_;
  std::vector<double> gen_p_mw_;
  std::vector<double> gen_q_mvar_;
  std::vector<std::vector<std::size_t>> adjacency_;
  std::size_t slack_ = 0;
};

/// Reads a MATPOWER-style case file: `mpc.baseMVA = <value>;` plus the
/// `mpc.bus`, `mpc.gen` and `mpc.branch` tables. Other tables are ignored.
/// Errors carry the source line.
Network parse_case(const std::filesystem::path& path);
Network parse_case_text(std::string_view text, const std::string& source = "<case>");

}  // namespace pvrag::grid
