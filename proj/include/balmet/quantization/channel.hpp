#pragma once

#include <optional>

#include "balmet/common.hpp"
#include "balmet/geometry/volume_map.hpp"
#include "balmet/quantization/kernel.hpp"

namespace balmet {

// Rank-one coherent projector at node i, written in the H-orthonormal
// working frame: Pi(x_i) = chi_i chi_i^adj / K(x_i).  Trace one, idempotent.
CMat coherent_projector(const WorkingFrame& frame, int i);

// Berezin symbol sigma(A)(x_i) = tr[A Pi(x_i)] = chi_i^adj A chi_i / K(x_i)
// for A Hermitian in the working frame.  Real by Hermiticity.
RVec berezin_symbol(const WorkingFrame& frame, const CMat& A);

// Rawnsley function of (H, nu): rho(x) = K_L2(x) / K_H(x), where K_L2 is the
// Bergman kernel of the L2 product <s,t> = int <s,t>_{FS(H)} dnu.  At a
// balanced product rho is constant n_p / Vol.
struct RawnsleyField {
  RVec rho;
  double volume;      // of nu(H)
  RVec nu;            // density used
  CMat gram_working;  // L2 Gram in the working frame ("M")
};

RawnsleyField rawnsley(const HermProduct& H, const VolumeMapSpec& vm,
                       const EvalTable& table);

// Toeplitz quantization of a node function f:
//   T(f) = int f(x) Pi_L2(x) rho(x) dnu(x)
// assembled against an L2(FS(H), nu)-orthonormal frame, in which T(1) = Id
// holds exactly at quadrature level.  Returned in that frame.
CMat toeplitz(const RVec& f, const HermProduct& H, const VolumeMapSpec& vm,
              const EvalTable& table);

// Berezin transform E = sigma after T: the quantum channel on observables,
// assembled in the L2-orthonormal frame, where E is self-adjoint for the
// Frobenius pairing and E(Id) = Id exactly at quadrature level.  At a
// balanced product that frame agrees with the working frame up to a global
// scalar, so channel-frame and working-frame observables can be identified
// there.
//
// Node data: xi_i = unit coherent column, c_i = w_i nu_i rho_i, so that
//   E(A) = sum_i c_i (xi_i^adj A xi_i) xi_i xi_i^adj,
//   <A, E(A)> = sum_i c_i (xi_i^adj A xi_i)^2 >= 0.
//
// The dense representation expands E over the Hermitian orthonormal basis
// {E_jj, j = 0..n_p-1} then {(E_jk + E_kj)/sqrt2, (i E_jk - i E_kj)/sqrt2}
// for j < k lexicographic; it is built only when n_p <= kChannelDenseCap.
// The matrix-free path (apply / quadratic_form / channel_spectrum power
// iteration) works at any size.
struct ChannelOperator {
  int n_p = 0;
  int p = 1;
  double volume = 0.0;
  CMat xi;        // n_p x N unit coherent columns
  RVec cweight;   // N, strictly positive; sums to n_p (the rho integral)
  CMat to_l2;     // maps working-frame columns into the channel frame
  std::optional<RMat> dense;  // n_p^2 x n_p^2 symmetric

  CMat apply(const CMat& A) const;             // E(A) for Hermitian A
  double quadratic_form(const CMat& A) const;  // <A, E(A)>
};

inline constexpr int kChannelDenseCap = 60;

ChannelOperator channel(const HermProduct& H, const VolumeMapSpec& vm,
                        const EvalTable& table,
                        bool force_matrix_free = false);

// Spectrum of the channel.  Dense mode: full symmetric eigensolve.
// Matrix-free mode: power iteration for the top traceless eigenvalue after
// deflating the known fixed vector Id (eigenvalue 1).
struct ChannelSpectrum {
  RVec eigenvalues;         // descending; dense mode only (empty otherwise)
  double gamma0 = 0.0;      // leading eigenvalue, equals 1
  double gamma1 = 0.0;      // top traceless eigenvalue
  double gap = 0.0;         // 1 - gamma1
  double lambda1_est = 0.0; // 4 pi p (1 - gamma1)
  double id_overlap = 0.0;  // overlap of the leading eigenvector with Id
};

ChannelSpectrum channel_spectrum(const ChannelOperator& op);

}  // namespace balmet
