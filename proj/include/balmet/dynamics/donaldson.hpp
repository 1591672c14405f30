#pragma once

#include <string>
#include <vector>

#include "balmet/common.hpp"
#include "balmet/geometry/volume_map.hpp"
#include "balmet/quantization/channel.hpp"

namespace balmet {

// One application of the Donaldson map T = Hilb after FS:
//
//   T(H)_{jk} = (n_p / Vol) sum_i w_i nu_i(H) v_j(x_i) conj(v_k(x_i)) / K_H(x_i)
//
// i.e. the Gram matrix of the reference frame under the L2(FS(H), nu(H))
// product, normalized to trace n_p against H^{-1}.  Exactly homogeneous:
// T(cH) = c T(H) at quadrature level, and tr[T(H) H^{-1}] = n_p.
CMat donaldson_step(const HermProduct& H, const VolumeMapSpec& vm,
                    const EvalTable& table);

// Balancing energy and its Lyapunov combination:
//
//   energy(H) = -log Vol(nu(H)),
//   psi(H)    = energy(H) + log det(H) / (p n_p).
//
// Along H -> T(H), exactly at quadrature level:
//  * log det H never increases (AM-GM applied to the L2 Gram spectrum,
//    whose trace is the volume);
//  * energy never increases for the anticanonical map, via Jensen and the
//    exact kernel update log K_{T(H)} = log K_H + log rho + log(Vol/n_p);
//  * hence psi never increases for eps in {-1, 0}, and for eps = -1 psi is
//    additionally invariant under H -> cH.
// No monotonicity is claimed for eps = +1 or the Liouville map; the values
// are still reported.
double energy(const HermProduct& H, const VolumeMapSpec& vm,
              const EvalTable& table);
double psi(const HermProduct& H, const VolumeMapSpec& vm,
           const EvalTable& table);

struct IterStepRecord {
  int k = 0;
  double psi_value = 0.0;
  double energy_value = 0.0;
  double logdet = 0.0;        // log det of the current product
  double step_dist = 0.0;     // distance between consecutive det-normalized products
  double dist_to_final = 0.0; // filled after the run
  double rho_dev = 0.0;       // sup_i |rho_i - n_p / Vol|
  double mu_norm = 0.0;       // Frobenius norm of the moment map
};

struct IterationReport {
  std::vector<IterStepRecord> steps;
  bool converged = false;
  std::string termination;  // "tolerance" or "max-steps"
  double tol_used = 0.0;
  double beta_hat = 0.0;    // contraction rate from the distance tail; NaN if short
  bool psi_nonincreasing = true;
  bool logdet_step_nonpositive = true;  // log det(T(H) H^{-1}) <= 0 each step
  CMat H_final;
};

struct IterateOptions {
  int max_steps = 500;
  double tol = 0.0;  // 0: use default_fixed_point_tol(table)
};

// Fixed-point iteration H_{k+1} = T(H_k) from H0.  Stops when the distance
// between consecutive det-normalized iterates drops below tol, or after
// max_steps (reported, not thrown).
IterationReport iterate(const CMat& H0, const VolumeMapSpec& vm,
                        const EvalTable& table, const IterateOptions& opt = {});

// max(10 * quadrature order-doubling discrepancy, 1e-9): don't ask the
// fixed point to be sharper than the quadrature can represent.
double default_fixed_point_tol(const EvalTable& table);

// Contraction rate from a distance-to-final history: geometric mean of the
// ratios over a tail window of usable steps (above 100x machine epsilon),
// excluding the last few steps where d_k = distance(H_k, H_K) is biased by
// the finite endpoint.  Returns NaN when fewer than 10 usable steps remain.
struct RateEstimate {
  double beta_hat = 0.0;
  int window_begin = 0;
  int window_end = 0;  // exclusive
};
RateEstimate rate_estimate(const std::vector<double>& dist_to_final);

}  // namespace balmet
