#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace balmet {

using cxd = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

// Bad user input: unknown model names, malformed tables, out-of-range
// parameters.  The CLI maps this to exit code 1.
struct invalid_input : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// The numerics themselves degenerated: non-positive products, singular
// Gram matrices, underflowing densities.  The CLI maps this to exit code 3.
struct numerical_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace balmet
