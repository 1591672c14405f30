#pragma once

#include <cstdint>
#include <vector>

#include "balmet/common.hpp"
#include "balmet/dynamics/donaldson.hpp"
#include "balmet/quantization/channel.hpp"

namespace balmet {

// Quadratic-form identity for the moment-map derivative at a balanced basis
// state s* (working frame of a balanced product H*): for Hermitian traceless
// A, with E the quantum channel at H*,
//
//   (n_p / (2 Vol)) d/dt tr[A mu(e^{tA} s*)] |_{t=0}
//       = tr[A^2] - (1 - eps/p) tr[A E(A)].
//
// lhs is computed by central finite differences in t, rhs from the channel.
// For the anticanonical map (eps = -1) the coefficient is (1 + 1/p).
// Not available for the Liouville volume map.
struct DmuCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double rel_gap = 0.0;
};

DmuCheck dmu_form(const CMat& A, const HermProduct& Hstar,
                  const VolumeMapSpec& vm, const EvalTable& table,
                  double fd_step = 1e-4);

// Linearization of the Donaldson map at a fixed point H*, in the working
// frame of H*.  Closed form on Hermitian tangents:
//
//   DT(A) = (1 - eps/p) E(A) + (eps/p) (tr A / n_p) Id,
//
// so DT(Id) = Id and on traceless tangents the eigenvalues are
// (1 - eps/p) gamma_k for the traceless channel eigenvalues gamma_k.
// Verified against central finite differences of T along geodesics in
// random Hermitian directions.
//
// H* must actually be fixed: |T(H*) - H*| beyond 10x the iteration
// tolerance is an error.  Not available for the Liouville volume map.
struct LinearizedMap {
  ChannelSpectrum spectrum;     // of the channel at H*
  double prefactor = 0.0;       // (1 - eps/p)
  double top_traceless = 0.0;   // prefactor * gamma1
  RVec dt_eigenvalues;          // descending map of channel eigenvalues (dense mode)
  std::vector<double> fd_rel_gaps;  // one per probed direction
  double max_fd_rel_gap = 0.0;
};

LinearizedMap linearized_map(const HermProduct& Hstar, const VolumeMapSpec& vm,
                             const EvalTable& table, int n_directions,
                             std::uint64_t seed, double fd_step = 1e-4);

}  // namespace balmet
