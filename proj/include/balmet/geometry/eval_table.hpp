#pragma once

#include <vector>

#include "balmet/common.hpp"
#include "balmet/geometry/model.hpp"
#include "balmet/geometry/quadrature.hpp"

namespace balmet {

// Section frame evaluated on quadrature nodes.  This is the single data
// object every downstream computation consumes; nothing after this point
// needs to know which manifold it came from.
//
// Overflow control: row i of `values` holds e_j(x_i) * exp(-scale[i]).
// For the projective models scale[i] = (p k / 2) log(1 + |z|^2), which makes
// the scaled row exactly the value in a Fubini-Study-unitary frame, so its
// entries are O(1) even at kp ~ 60 where raw monomials overflow.  All
// quantities of interest (Gram matrices, kernels, symbols, densities) are
// ratios in which the scale cancels; code that needs the true log kernel
// adds 2*scale[i] back.  Derivative rows carry the same factor exp(-scale[i])
// (the derivative of the scale is *not* folded in: these are scaled copies of
// the true holomorphic derivatives, usable wherever a common per-node factor
// cancels, e.g. in the log-kernel Hessian combination).
struct EvalTable {
  int n = 1;
  int k = 2;
  int p = 1;
  int n_p = 0;
  RMat nodes;    // N x 2n
  RVec weights;  // N
  CMat values;   // N x n_p, row-scaled
  RVec scale;    // N, log of the per-row scale factor
  std::vector<CMat> derivs;  // n entries, N x n_p, same row scaling
  double quad_tol = 1e-15;   // copied from the quadrature

  int node_count() const { return static_cast<int>(weights.size()); }

  // Unscaled values; may overflow for large kp at far-out nodes.  Intended
  // for tests and small p.
  cxd value_at(int i, int j) const {
    return values(i, j) * std::exp(scale(i));
  }
  cxd deriv_at(int a, int i, int j) const {
    return derivs[a](i, j) * std::exp(scale(i));
  }
};

EvalTable eval_frame(const PolarizedModel& model, const Quadrature& quad);

}  // namespace balmet
