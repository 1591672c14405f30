#pragma once

#include <random>

#include "balmet/common.hpp"

namespace balmet {

// Hermitian inner product on the section space, stored as the Gram matrix
// of the reference frame with the product linear in its *first* slot:
//
//   H_{jk} = <e_j, e_k>.
//
// Conventions used throughout (all code assumes these, change nothing
// lightly):
//  * an endomorphism g acts on frames by (g s)_j = sum_k g_{jk} s_k, so the
//    Gram matrix of g s is  g H g^adj;
//  * the Bergman kernel of H against the frame value column v(x) is
//    K_H(x) = v(x)^adj H^{-1} v(x); consequently K_{cH} = K_H / c;
//  * with the Cholesky factorization H = L L^adj, the frame s = L^{-1} e is
//    H-orthonormal ("working frame"); its node value columns are rows of
//    the eval table mapped through L^{-1}.
//
// Construction validates Hermiticity and positivity: any eigenvalue below
// 1e-12 times the largest is rejected.
class HermProduct {
 public:
  explicit HermProduct(CMat H);

  int dim() const { return static_cast<int>(H_.rows()); }
  const CMat& mat() const { return H_; }
  const CMat& chol_lower() const { return L_; }  // H = L L^adj
  double log_det() const { return logdet_; }

  // H^{-1} x via the Cholesky factors.
  CVec solve(const CVec& x) const;
  CMat solve(const CMat& X) const;

 private:
  CMat H_;
  CMat L_;
  double logdet_ = 0.0;
};

// exp(scale * A) for Hermitian A, via eigendecomposition.
CMat herm_exp(const CMat& A, double scale);

// Geodesic of the nonpositively curved metric on products through H with
// (Hermitian) velocity data A:
//
//   geodesic(H, A, t) = L exp(-2 t A) L^adj,   H = L L^adj.
//
// The parametrization is chosen so that a basis path s_t with
// d/dt s_t = A s_t induces the product path geodesic(H, A, t): the working
// Gram of the induced product at time t is exp(-2tA).  In particular
// geodesic(Id, Id, t) = exp(-2t) Id and
// det geodesic(H, A, t) = det(H) exp(-2 t tr A).
HermProduct geodesic(const HermProduct& H, const CMat& A, double t);

// Distance in the same metric: the 2-norm of the vector of logarithms of
// the eigenvalues of H1^{-1} H2 (computed stably via a congruence by the
// Cholesky factor of H1, which makes the pencil Hermitian).  Symmetric,
// congruence invariant, and along geodesics linear in t.
double distance(const HermProduct& H1, const HermProduct& H2);

// Rescales to determinant one.  Idempotent.
HermProduct normalize_det(const HermProduct& H);

// Deterministic Gaussian Hermitian matrices for probes and tests.
CMat random_hermitian(std::mt19937_64& rng, int n);
CMat random_traceless_hermitian(std::mt19937_64& rng, int n);
// A random product with eigenvalue spread controlled by `spread` (log scale).
CMat random_product_matrix(std::mt19937_64& rng, int n, double spread);

}  // namespace balmet
