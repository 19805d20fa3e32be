#pragma once

#include <Eigen/Dense>

#include "pvrag/grid/network.hpp"

namespace pvrag::grid {

/// Dense complex bus admittance matrix in per unit, indexed by bus position.
/// Branches use the pi-model with the tap (ratio and phase shift) on the from
/// side; bus shunts are converted with baseMVA.
Eigen::MatrixXcd build_admittance(const Network& net);

}  // namespace pvrag::grid
