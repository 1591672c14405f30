#include "balmet/quantization/kernel.hpp"

#include <cmath>

namespace balmet {

WorkingFrame working_frame(const HermProduct& H, const EvalTable& table) {
  if (H.dim() != table.n_p) {
    throw invalid_input("product dimension does not match the frame");
  }
  WorkingFrame f;
  // chi_i = L^{-1} v(x_i): plain transpose, the frame values are not
  // conjugated here (conjugation only ever enters through adjoints later).
  f.B = H.chol_lower().triangularView<Eigen::Lower>().solve(
      CMat(table.values.transpose()));
  const long N = table.node_count();
  f.k_scaled.resize(N);
  f.log_k.resize(N);
  for (long i = 0; i < N; ++i) {
    const double ks = f.B.col(i).squaredNorm();
    if (!(ks > 0.0) || !std::isfinite(ks)) {
      throw numerical_error("kernel vanished at node " + std::to_string(i) +
                            "; the frame does not span there");
    }
    f.k_scaled(i) = ks;
    f.log_k(i) = std::log(ks) + 2.0 * table.scale(i);
  }
  return f;
}

KernelField kernel(const HermProduct& H, const EvalTable& table) {
  WorkingFrame f = working_frame(H, table);
  return KernelField{std::move(f.log_k), std::move(f.k_scaled)};
}

double kernel_value(const HermProduct& H, const CVec& frame_values) {
  if (frame_values.size() != H.dim()) {
    throw invalid_input("frame value column has wrong length");
  }
  return frame_values.dot(H.solve(frame_values)).real();
}

}  // namespace balmet
