#pragma once

#include "balmet/common.hpp"
#include "balmet/geometry/eval_table.hpp"
#include "balmet/linalg/herm_product.hpp"

namespace balmet {

// Bergman kernel of a product at the quadrature nodes.
//
//   K_H(x) = v(x)^adj H^{-1} v(x),  v(x) the frame value column.
//
// log_k is the true log kernel; k_scaled = exp(log_k - 2*scale) is the
// kernel against the scaled frame rows, the quantity that actually appears
// in all ratio formulas.
struct KernelField {
  RVec log_k;
  RVec k_scaled;
};

KernelField kernel(const HermProduct& H, const EvalTable& table);

// Kernel at an arbitrary point from its raw frame value column:
// K = v^adj H^{-1} v.
double kernel_value(const HermProduct& H, const CVec& frame_values);

// Node values of an H-orthonormal frame: column i is chi_i = L^{-1} v(x_i)
// up to the table row scaling, so |chi_i|^2 = K_scaled(x_i).  Everything in
// the quantization layer (projectors, symbols, Gram matrices, channels) is
// assembled from these columns; the table scaling cancels in every ratio.
struct WorkingFrame {
  CMat B;        // n_p x N, column i = scaled chi_i
  RVec k_scaled; // column squared norms
  RVec log_k;    // true log kernel
};

WorkingFrame working_frame(const HermProduct& H, const EvalTable& table);

}  // namespace balmet
