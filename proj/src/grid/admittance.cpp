#include "pvrag/grid/admittance.hpp"

#include <complex>
#include <numbers>

namespace pvrag::grid {

Eigen::MatrixXcd build_admittance(const Network& net) {
  using cd = std::complex<double>;
  const auto n = static_cast<Eigen::Index>(net.bus_count());
  Eigen::MatrixXcd y = Eigen::MatrixXcd::Zero(n, n);

  for (const auto& br : net.branches()) {
    if (!br.in_service) continue;
    const auto f = static_cast<Eigen::Index>(net.bus_index(br.from_bus));
    const auto t = static_cast<Eigen::Index>(net.bus_index(br.to_bus));
    const cd ys = 1.0 / cd(br.r_pu, br.x_pu);
    const cd bc(0.0, br.b_shunt_pu / 2.0);
    const cd tap = std::polar(br.tap_ratio, br.shift_deg * std::numbers::pi / 180.0);

    y(f, f) += (ys + bc) / std::norm(tap);
    y(t, t) += ys + bc;
    y(f, t) -= ys / std::conj(tap);
    y(t, f) -= ys / tap;
  }

  for (std::size_t i = 0; i < net.bus_count(); ++i) {
    const auto& b = net.buses()[i];
    const auto k = static_cast<Eigen::Index>(i);
    y(k, k) += cd(b.g_shunt_mw, b.b_shunt_mvar) / net.base_mva();
  }
  return y;
}

}  // namespace pvrag::grid
