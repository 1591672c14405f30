#pragma once

#include <string>
#include <vector>

#include "balmet/common.hpp"
#include "balmet/geometry/volume_map.hpp"

namespace balmet {

// A basis of the section space, stored as the coefficient matrix G against
// the reference frame: s_j = sum_k G_{jk} e_k.  The induced product is the
// one for which s is orthonormal: H_s = (G^adj G)^{-1}.
//
// Construction refuses a numerically unusable basis: condition number of G
// above 1e10.
class BasisState {
 public:
  explicit BasisState(CMat G);

  const CMat& coeffs() const { return G_; }
  int dim() const { return static_cast<int>(G_.rows()); }
  CMat induced_product_matrix() const;  // (G^adj G)^{-1}
  double log_det_abs() const;           // log |det G|

 private:
  CMat G_;
};

// Moment map of the basis state for the chosen volume map:
//
//   mu(s)_{jk} = <s_j, s_k>_{L2(FS(H_s), nu(H_s))} - (Vol / n_p) delta_{jk}
//
// Hermitian and exactly traceless at quadrature level.  Equivariant under
// unitary change of basis: mu(U s) = U mu(s) U^adj exactly.
CMat moment_map(const BasisState& s, const VolumeMapSpec& vm,
                const EvalTable& table);

struct FlowRecord {
  double t = 0.0;
  double mu_norm = 0.0;   // Frobenius norm of mu at this time
  double psi_value = 0.0;
  double logdet_g = 0.0;  // log |det G|, conserved by the flow
  double dt_used = 0.0;
};

struct FlowOptions {
  double t_end = 40.0;
  double dt = 0.25;       // initial step
  double dt_min = 1e-6;   // below this a rejected step is a hard error
  double safety = 0.9;    // step controller
  double rel_tol = 1e-8;  // local error target per unit step
  int max_records = 100000;
};

struct FlowReport {
  std::vector<FlowRecord> records;
  CMat G_final;
  double t_final = 0.0;
  int rejected_steps = 0;
};

// Downward moment flow on bases, dG/dt = -mu(s_t) G, integrated with
// classical RK4 and halve-on-reject step control (embedded comparison
// against two half steps).  det G is a first integral since tr mu = 0.
// Balanced states are stationary points.
FlowReport gradient_flow(const BasisState& s0, const VolumeMapSpec& vm,
                         const EvalTable& table, const FlowOptions& opt = {});

}  // namespace balmet
