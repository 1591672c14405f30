#pragma once

#include "balmet/common.hpp"
#include "balmet/geometry/eval_table.hpp"
#include "balmet/linalg/herm_product.hpp"

namespace balmet {

// Choice of volume map: how a product H determines the measure nu(H) that
// the quantization integrates against.
//
// PowerOfKernel covers the one-parameter family nu = K_H^{eps/p} * (supplied
// reference density) with eps in {-1, 0, +1}:
//   eps = -1  anticanonical:  nu = K_H^{-1/p} * Lebesgue   (the default)
//   eps =  0  constant:       nu = supplied density, independent of H
//   eps = +1  canonical:      nu = K_H^{+1/p} * supplied density
// Liouville sets nu = omega_H^n / n! for the kernel metric of H, i.e. the
// determinant of the log-kernel Hessian over (pi p)^n times Lebesgue.
struct VolumeMapSpec {
  enum class Kind { PowerOfKernel, Liouville };

  Kind kind = Kind::PowerOfKernel;
  int eps = -1;
  RVec supplied_density;  // node values; required for eps in {0, +1}

  static VolumeMapSpec anticanonical() { return {}; }
  static VolumeMapSpec canonical(RVec density) {
    VolumeMapSpec s;
    s.eps = +1;
    s.supplied_density = std::move(density);
    return s;
  }
  static VolumeMapSpec constant(RVec density) {
    VolumeMapSpec s;
    s.eps = 0;
    s.supplied_density = std::move(density);
    return s;
  }
  static VolumeMapSpec liouville() {
    VolumeMapSpec s;
    s.kind = Kind::Liouville;
    return s;
  }
};

struct VolumeDensity {
  RVec density;      // nu at the nodes (with respect to chart Lebesgue)
  RVec log_density;  // computed first; density = exp(log_density)
  double volume;     // sum of weights * density
};

// Evaluates nu(H) at the nodes.  Densities are formed in the log domain, so
// scaling H -> cH shifts log_density exactly by -(eps/p) log c and leaves
// eps = 0 untouched.  A supplied density must be strictly positive and of
// node length; an underflowing or non-finite density value is a hard error
// naming the offending node.
VolumeDensity volume_density(const VolumeMapSpec& spec, const HermProduct& H,
                             const EvalTable& table);

// Same, reusing an already computed working frame for the log kernel.
struct WorkingFrame;
VolumeDensity volume_density(const VolumeMapSpec& spec, const HermProduct& H,
                             const WorkingFrame& frame, const EvalTable& table);

// Liouville measure omega_H^n / n! of the kernel metric, relative to chart
// Lebesgue measure, evaluated from exact first-derivative tensors of the
// frame (no finite differencing):
//
//   density = det( Hess_{a b-bar} log K_H ) / (pi p)^n.
//
// Scale invariant in H.  A non-positive Hessian determinant at any node is
// a numerical_error.
VolumeDensity liouville_density(const HermProduct& H, const EvalTable& table);

// Fubini-Study reference density (1 + |z|^2)^{-(n+1)} at the nodes; used as
// a smooth positive reference for supplied-density maps and in tests.
RVec reference_density(const EvalTable& table);

}  // namespace balmet
