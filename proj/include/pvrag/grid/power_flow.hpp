#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "pvrag/core/errors.hpp"
#include "pvrag/grid/network.hpp"

namespace pvrag::grid {

struct Demand {
  double p_mw = 0.0;
  double q_mvar = 0.0;
};

/// Per-bus demands in bus-position order.
using DemandVector = std::vector<Demand>;

DemandVector nominal_demands(const Network& net);

struct PowerFlowOptions {
  double tolerance = 1e-8;  // max |P,Q mismatch| in pu
  int max_iterations = 20;
};

struct PowerFlowSolution {
  std::vector<double> v_mag_pu;
  std::vector<double> v_ang_rad;
  double slack_p_mw = 0.0;  // slack generator output
  double slack_q_mvar = 0.0;
  int iterations = 0;
  double max_mismatch = 0.0;
};

class NonConvergence : public Error {
 public:
  NonConvergence(int iterations, double final_mismatch);
  int iterations() const noexcept { return iterations_; }
  double final_mismatch() const noexcept { return final_mismatch_; }

 private:
  int iterations_;
  double final_mismatch_;
};

class SingularSystem : public Error {
 public:
  explicit SingularSystem(int iteration);
};

/// Polar power-balance equations for a fixed admittance matrix and specified
/// injections. The state vector holds the angles of all non-slack buses
/// followed by the magnitudes of the PQ buses.
class PowerFlowEquations {
 public:
  PowerFlowEquations(Eigen::MatrixXcd ybus, std::vector<BusKind> kinds, Eigen::VectorXd p_spec_pu,
                     Eigen::VectorXd q_spec_pu);

  Eigen::Index state_size() const noexcept { return static_cast<Eigen::Index>(pvpq_.size() + pq_.size()); }
  const std::vector<Eigen::Index>& pvpq() const noexcept { return pvpq_; }
  const std::vector<Eigen::Index>& pq() const noexcept { return pq_; }

  Eigen::VectorXd pack(const Eigen::VectorXd& vm, const Eigen::VectorXd& va) const;
  void unpack(const Eigen::VectorXd& x, Eigen::VectorXd& vm, Eigen::VectorXd& va) const;

  /// Calculated minus specified injection: [dP(non-slack); dQ(PQ)].
  Eigen::VectorXd mismatch(const Eigen::VectorXd& vm, const Eigen::VectorXd& va) const;
  Eigen::MatrixXd jacobian(const Eigen::VectorXd& vm, const Eigen::VectorXd& va) const;

  /// Complex injections S = V conj(Y V) at every bus.
  Eigen::VectorXcd injections(const Eigen::VectorXd& vm, const Eigen::VectorXd& va) const;

 private:
  Eigen::MatrixXcd ybus_;
  Eigen::VectorXd p_spec_;
  Eigen::VectorXd q_spec_;
  std::vector<Eigen::Index> pvpq_;
  std::vector<Eigen::Index> pq_;
};

/// Reusable solver holding the admittance matrix of one network. Thread-safe:
/// solve() does not mutate the solver.
class PowerFlowSolver {
 public:
  explicit PowerFlowSolver(const Network& net);

  const Network& network() const noexcept { return *net_; }
  const Eigen::MatrixXcd& admittance() const noexcept { return ybus_; }

  PowerFlowEquations equations(const DemandVector& demands) const;
  PowerFlowSolution solve(const DemandVector& demands, const PowerFlowOptions& opts = {}) const;

 private:
  const Network* net_;
  Eigen::MatrixXcd ybus_;
};

PowerFlowSolution solve_power_flow(const Network& net,
                                   const std::optional<DemandVector>& demands = std::nullopt,
                                   const PowerFlowOptions& opts = {});

}  // namespace pvrag::grid
