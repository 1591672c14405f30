#include "balmet/linalg/herm_product.hpp"

#include <cmath>

namespace balmet {

HermProduct::HermProduct(CMat H) : H_(std::move(H)) {
  if (H_.rows() != H_.cols() || H_.rows() == 0) {
    throw invalid_input("product matrix must be square and non-empty");
  }
  const double scale = H_.norm();
  if (!std::isfinite(scale)) {
    throw numerical_error("product matrix has non-finite entries");
  }
  if ((H_ - H_.adjoint()).norm() > 1e-12 * std::max(scale, 1.0)) {
    throw invalid_input("product matrix is not Hermitian");
  }
  H_ = 0.5 * (H_ + H_.adjoint().eval());  // kill rounding asymmetry

  Eigen::SelfAdjointEigenSolver<CMat> es(H_, Eigen::EigenvaluesOnly);
  const RVec ev = es.eigenvalues();
  const double lmax = ev(ev.size() - 1);
  if (!(lmax > 0.0) || ev(0) < 1e-12 * lmax) {
    // A degenerate product usually means the dynamics collapsed, not that
    // the caller typed something wrong; report it as a numerical failure.
    throw numerical_error("product matrix is not positive definite");
  }
  logdet_ = ev.array().log().sum();

  Eigen::LLT<CMat> llt(H_);
  if (llt.info() != Eigen::Success) {
    throw numerical_error("Cholesky factorization of the product failed");
  }
  L_ = llt.matrixL();
}

CVec HermProduct::solve(const CVec& x) const {
  CVec y = L_.triangularView<Eigen::Lower>().solve(x);
  return L_.adjoint().triangularView<Eigen::Upper>().solve(y);
}

CMat HermProduct::solve(const CMat& X) const {
  CMat Y = L_.triangularView<Eigen::Lower>().solve(X);
  return L_.adjoint().triangularView<Eigen::Upper>().solve(Y);
}

CMat herm_exp(const CMat& A, double scale) {
  Eigen::SelfAdjointEigenSolver<CMat> es(A);
  const RVec ev = es.eigenvalues();
  const CMat& U = es.eigenvectors();
  return U * (scale * ev.array()).exp().matrix().asDiagonal() * U.adjoint();
}

HermProduct geodesic(const HermProduct& H, const CMat& A, double t) {
  if (A.rows() != H.dim() || A.cols() != H.dim()) {
    throw invalid_input("geodesic direction has wrong dimensions");
  }
  const CMat& L = H.chol_lower();
  const CMat E = herm_exp(0.5 * (A + A.adjoint().eval()), -2.0 * t);
  return HermProduct(L * E * L.adjoint());
}

double distance(const HermProduct& H1, const HermProduct& H2) {
  if (H1.dim() != H2.dim()) {
    throw invalid_input("distance between products of different dimension");
  }
  // Congruence by L1^{-1} turns the pencil (H1, H2) into the Hermitian
  // matrix L1^{-1} H2 L1^{-adj} with the same relative eigenvalues.
  const CMat& L = H1.chol_lower();
  CMat S = L.triangularView<Eigen::Lower>().solve(H2.mat());
  S = L.triangularView<Eigen::Lower>().solve(S.adjoint().eval()).adjoint();
  Eigen::SelfAdjointEigenSolver<CMat> es(S, Eigen::EigenvaluesOnly);
  return es.eigenvalues().array().log().matrix().norm();
}

HermProduct normalize_det(const HermProduct& H) {
  const double c = std::exp(-H.log_det() / H.dim());
  return HermProduct(c * H.mat());
}

namespace {

CMat gaussian_complex(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> g(0.0, 1.0);
  CMat Z(n, n);
  for (int j = 0; j < n; ++j)
    for (int k = 0; k < n; ++k) Z(j, k) = cxd(g(rng), g(rng));
  return Z;
}

}  // namespace

CMat random_hermitian(std::mt19937_64& rng, int n) {
  const CMat Z = gaussian_complex(rng, n);
  return (0.5 / std::sqrt(2.0)) * (Z + Z.adjoint().eval());
}

CMat random_traceless_hermitian(std::mt19937_64& rng, int n) {
  CMat A = random_hermitian(rng, n);
  A -= (A.trace() / static_cast<double>(n)) * CMat::Identity(n, n);
  return A;
}

CMat random_product_matrix(std::mt19937_64& rng, int n, double spread) {
  const CMat A = random_hermitian(rng, n);
  return herm_exp((spread / std::sqrt(static_cast<double>(n))) * A, 1.0);
}

}  // namespace balmet
