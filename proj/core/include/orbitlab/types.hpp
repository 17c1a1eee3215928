#pragma once

#include <Eigen/Dense>

namespace orbitlab {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

}  // namespace orbitlab
