#include "pvrag/grid/power_flow.hpp"

#include <cmath>
#include <complex>
#include <cstdio>

#include <Eigen/LU>

#include "pvrag/grid/admittance.hpp"

namespace pvrag::grid {

namespace {

std::string nonconvergence_message(int iterations, double mismatch) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "power flow did not converge after %d iterations (mismatch %.3e pu)",
                iterations, mismatch);
  return buf;
}

}  // namespace

NonConvergence::NonConvergence(int iterations, double final_mismatch)
    : Error(nonconvergence_message(iterations, final_mismatch)),
      iterations_(iterations),
      final_mismatch_(final_mismatch) {}

SingularSystem::SingularSystem(int iteration)
    : Error("singular power-flow Jacobian at iteration " + std::to_string(iteration)) {}

DemandVector nominal_demands(const Network& net) {
  DemandVector d;
  d.reserve(net.bus_count());
  for (const auto& b : net.buses()) d.push_back({b.p_demand_mw, b.q_demand_mvar});
  return d;
}

PowerFlowEquations::PowerFlowEquations(Eigen::MatrixXcd ybus, std::vector<BusKind> kinds,
                                       Eigen::VectorXd p_spec_pu, Eigen::VectorXd q_spec_pu)
    : ybus_(std::move(ybus)), p_spec_(std::move(p_spec_pu)), q_spec_(std::move(q_spec_pu)) {
  for (std::size_t i = 0; i < kinds.size(); ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    if (kinds[i] != BusKind::Slack) pvpq_.push_back(k);
    if (kinds[i] == BusKind::PQ) pq_.push_back(k);
  }
}

Eigen::VectorXd PowerFlowEquations::pack(const Eigen::VectorXd& vm,
                                         const Eigen::VectorXd& va) const {
  Eigen::VectorXd x(state_size());
  Eigen::Index r = 0;
  for (auto i : pvpq_) x(r++) = va(i);
  for (auto i : pq_) x(r++) = vm(i);
  return x;
}

void PowerFlowEquations::unpack(const Eigen::VectorXd& x, Eigen::VectorXd& vm,
                                Eigen::VectorXd& va) const {
  Eigen::Index r = 0;
  for (auto i : pvpq_) va(i) = x(r++);
  for (auto i : pq_) vm(i) = x(r++);
}

Eigen::VectorXcd PowerFlowEquations::injections(const Eigen::VectorXd& vm,
                                                const Eigen::VectorXd& va) const {
  const Eigen::Index n = vm.size();
  Eigen::VectorXcd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = std::polar(vm(i), va(i));
  const Eigen::VectorXcd current = ybus_ * v;
  return v.cwiseProduct(current.conjugate());
}

Eigen::VectorXd PowerFlowEquations::mismatch(const Eigen::VectorXd& vm,
                                             const Eigen::VectorXd& va) const {
  const auto s = injections(vm, va);
  Eigen::VectorXd f(state_size());
  Eigen::Index r = 0;
  for (auto i : pvpq_) f(r++) = s(i).real() - p_spec_(i);
  for (auto i : pq_) f(r++) = s(i).imag() - q_spec_(i);
  return f;
}

Eigen::MatrixXd PowerFlowEquations::jacobian(const Eigen::VectorXd& vm,
                                             const Eigen::VectorXd& va) const {
  using cd = std::complex<double>;
  const Eigen::Index n = vm.size();
  Eigen::VectorXcd v(n);
  Eigen::VectorXcd vnorm(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    v(i) = std::polar(vm(i), va(i));
    vnorm(i) = std::polar(1.0, va(i));
  }
  const Eigen::VectorXcd ibus = ybus_ * v;

  // dS/dVa = j diag(V) conj(diag(I) - Y diag(V))
  // dS/dVm = diag(V) conj(Y diag(V/|V|)) + conj(diag(I)) diag(V/|V|)
  Eigen::MatrixXcd ds_dva = -(ybus_ * v.asDiagonal());
  ds_dva.diagonal() += ibus;
  ds_dva = (cd(0.0, 1.0) * (v.asDiagonal() * ds_dva.conjugate())).eval();

  Eigen::MatrixXcd ds_dvm = v.asDiagonal() * (ybus_ * vnorm.asDiagonal()).conjugate();
  ds_dvm.diagonal() += ibus.conjugate().cwiseProduct(vnorm);

  const auto npvpq = static_cast<Eigen::Index>(pvpq_.size());
  const auto npq = static_cast<Eigen::Index>(pq_.size());
  Eigen::MatrixXd j(npvpq + npq, npvpq + npq);
  for (Eigen::Index r = 0; r < npvpq; ++r) {
    const auto bi = pvpq_[r];
    for (Eigen::Index c = 0; c < npvpq; ++c) j(r, c) = ds_dva(bi, pvpq_[c]).real();
    for (Eigen::Index c = 0; c < npq; ++c) j(r, npvpq + c) = ds_dvm(bi, pq_[c]).real();
  }
  for (Eigen::Index r = 0; r < npq; ++r) {
    const auto bi = pq_[r];
    for (Eigen::Index c = 0; c < npvpq; ++c) j(npvpq + r, c) = ds_dva(bi, pvpq_[c]).imag();
    for (Eigen::Index c = 0; c < npq; ++c) j(npvpq + r, npvpq + c) = ds_dvm(bi, pq_[c]).imag();
  }
  return j;
}

PowerFlowSolver::PowerFlowSolver(const Network& net) : net_(&net), ybus_(build_admittance(net)) {}

PowerFlowEquations PowerFlowSolver::equations(const DemandVector& demands) const {
  const auto& net = *net_;
  const auto n = net.bus_count();
  if (demands.size() != n) {
    throw Error("demand vector has " + std::to_string(demands.size()) + " entries, network has " +
                std::to_string(n) + " buses");
  }
  Eigen::VectorXd p(static_cast<Eigen::Index>(n));
  Eigen::VectorXd q(static_cast<Eigen::Index>(n));
  std::vector<BusKind> kinds;
  kinds.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto k = static_cast<Eigen::Index>(i);
    p(k) = (net.scheduled_p_mw(i) - demands[i].p_mw) / net.base_mva();
    q(k) = (net.scheduled_q_mvar(i) - demands[i].q_mvar) / net.base_mva();
    kinds.push_back(net.buses()[i].kind);
  }
  return PowerFlowEquations(ybus_, std::move(kinds), std::move(p), std::move(q));
}

PowerFlowSolution PowerFlowSolver::solve(const DemandVector& demands,
                                         const PowerFlowOptions& opts) const {
  const auto& net = *net_;
  const auto eq = equations(demands);
  const auto n = static_cast<Eigen::Index>(net.bus_count());

  Eigen::VectorXd vm = Eigen::VectorXd::Ones(n);
  Eigen::VectorXd va = Eigen::VectorXd::Zero(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& b = net.buses()[static_cast<std::size_t>(i)];
    if (b.kind != BusKind::PQ) vm(i) = b.v_setpoint_pu;
  }

  Eigen::VectorXd f = eq.mismatch(vm, va);
  double norm = f.size() ? f.lpNorm<Eigen::Infinity>() : 0.0;
  int it = 0;
  while (!(norm <= opts.tolerance)) {
    if (it >= opts.max_iterations || !std::isfinite(norm)) throw NonConvergence(it, norm);
    ++it;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(eq.jacobian(vm, va));
    if (!lu.isInvertible()) throw SingularSystem(it);
    const Eigen::VectorXd dx = lu.solve(-f);
    eq.unpack(eq.pack(vm, va) + dx, vm, va);
    f = eq.mismatch(vm, va);
    norm = f.lpNorm<Eigen::Infinity>();
  }

  PowerFlowSolution sol;
  sol.v_mag_pu.assign(vm.data(), vm.data() + n);
  sol.v_ang_rad.assign(va.data(), va.data() + n);
  const auto s = eq.injections(vm, va);
  const auto sl = net.slack_index();
  const auto k = static_cast<Eigen::Index>(sl);
  sol.slack_p_mw = s(k).real() * net.base_mva() + demands[sl].p_mw;
  sol.slack_q_mvar = s(k).imag() * net.base_mva() + demands[sl].q_mvar;
  sol.iterations = it;
  sol.max_mismatch = norm;
  return sol;
}

PowerFlowSolution solve_power_flow(const Network& net, const std::optional<DemandVector>& demands,
                                   const PowerFlowOptions& opts) {
  PowerFlowSolver solver(net);
  return solver.solve(demands ? *demands : nominal_demands(net), opts);
}

}  // namespace pvrag::grid
