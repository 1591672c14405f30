#include "balmet/quantization/channel.hpp"

#include <cmath>
#include <functional>

namespace balmet {

namespace {

constexpr double kPi = 3.14159265358979323846;

// L2(FS(H), nu) Gram matrix of the working frame:
//   M = sum_i w_i nu_i chi_i chi_i^adj / K_i.
CMat l2_gram(const WorkingFrame& f, const VolumeDensity& vd,
             const EvalTable& table) {
  const RVec d =
      (table.weights.array() * vd.density.array() / f.k_scaled.array());
  return f.B * d.asDiagonal() * f.B.adjoint();
}

Eigen::LLT<CMat> gram_factor(const CMat& M) {
  Eigen::LLT<CMat> llt(M);
  bool bad = llt.info() != Eigen::Success;
  if (!bad) {
    // Exact rank deficiency can pass the factorization with a zero pivot;
    // a collapsed pivot ratio means the nodes do not resolve the frame.
    const RVec piv = CMat(llt.matrixL()).diagonal().real();
    bad = !(piv.minCoeff() > 1e-6 * piv.maxCoeff());
  }
  if (bad) {
    throw numerical_error(
        "L2 Gram matrix is numerically singular; use a finer quadrature so "
        "the nodes resolve the section frame");
  }
  return llt;
}

}  // namespace

CMat coherent_projector(const WorkingFrame& frame, int i) {
  if (i < 0 || i >= frame.B.cols()) {
    throw invalid_input("coherent projector node index out of range");
  }
  const auto chi = frame.B.col(i);
  return (chi * chi.adjoint()) / frame.k_scaled(i);
}

RVec berezin_symbol(const WorkingFrame& frame, const CMat& A) {
  if (A.rows() != frame.B.rows() || A.cols() != frame.B.rows()) {
    throw invalid_input("observable has wrong dimensions");
  }
  const long N = frame.B.cols();
  const CMat AB = A * frame.B;
  RVec s(N);
  for (long i = 0; i < N; ++i) {
    s(i) = std::real(frame.B.col(i).dot(AB.col(i))) / frame.k_scaled(i);
  }
  return s;
}

RawnsleyField rawnsley(const HermProduct& H, const VolumeMapSpec& vm,
                       const EvalTable& table) {
  const WorkingFrame f = working_frame(H, table);
  const VolumeDensity vd = volume_density(vm, H, f, table);
  RawnsleyField out;
  out.gram_working = l2_gram(f, vd, table);
  const auto llt = gram_factor(out.gram_working);
  const CMat Minv_B = llt.solve(f.B);
  const long N = table.node_count();
  out.rho.resize(N);
  for (long i = 0; i < N; ++i) {
    out.rho(i) = std::real(f.B.col(i).dot(Minv_B.col(i))) / f.k_scaled(i);
  }
  out.volume = vd.volume;
  out.nu = vd.density;
  return out;
}

CMat toeplitz(const RVec& fvals, const HermProduct& H, const VolumeMapSpec& vm,
              const EvalTable& table) {
  if (fvals.size() != table.node_count()) {
    throw invalid_input("Toeplitz symbol has wrong node count");
  }
  const ChannelOperator op = channel(H, vm, table, /*force_matrix_free=*/true);
  const RVec d = op.cweight.array() * fvals.array();
  return op.xi * d.asDiagonal() * op.xi.adjoint();
}

ChannelOperator channel(const HermProduct& H, const VolumeMapSpec& vm,
                        const EvalTable& table, bool force_matrix_free) {
  const WorkingFrame f = working_frame(H, table);
  const VolumeDensity vd = volume_density(vm, H, f, table);
  const CMat M = l2_gram(f, vd, table);
  const auto llt = gram_factor(M);

  ChannelOperator op;
  op.n_p = table.n_p;
  op.p = table.p;
  op.volume = vd.volume;
  // Reorthonormalize: columns of R B are the coherent columns in an
  // L2-orthonormal frame (R M R^adj = Id for R = Mchol^{-1}).
  op.to_l2 = CMat(llt.matrixL())
                 .triangularView<Eigen::Lower>()
                 .solve(CMat::Identity(table.n_p, table.n_p));
  op.xi = op.to_l2 * f.B;
  const long N = table.node_count();
  op.cweight.resize(N);
  for (long i = 0; i < N; ++i) {
    const double nsq = op.xi.col(i).squaredNorm();  // = rho_i * K_i (scaled)
    const double rho = nsq / f.k_scaled(i);
    op.cweight(i) = table.weights(i) * vd.density(i) * rho;
    op.xi.col(i) /= std::sqrt(nsq);
  }

  if (force_matrix_free || op.n_p > kChannelDenseCap) return op;

  // Dense form over the Hermitian basis: diagonal units first, then
  // symmetric/antisymmetric pairs (j < k).  sigma-coordinate row per node:
  //   |xi_j|^2, sqrt2 Re(conj(xi_j) xi_k), -sqrt2 Im(conj(xi_j) xi_k).
  const int np = op.n_p;
  const int dimh = np * np;
  RMat S(N, dimh);
  const double rt2 = std::sqrt(2.0);
  for (long i = 0; i < N; ++i) {
    const auto xi = op.xi.col(i);
    int col = 0;
    for (int j = 0; j < np; ++j, ++col) S(i, col) = std::norm(xi(j));
    for (int j = 0; j < np; ++j) {
      for (int k = j + 1; k < np; ++k) {
        const cxd z = std::conj(xi(j)) * xi(k);
        S(i, col++) = rt2 * z.real();
        S(i, col++) = -rt2 * z.imag();
      }
    }
  }
  op.dense = S.transpose() * op.cweight.asDiagonal() * S;
  return op;
}

CMat ChannelOperator::apply(const CMat& A) const {
  const long N = xi.cols();
  const CMat AX = A * xi;
  RVec q(N);
  for (long i = 0; i < N; ++i) {
    q(i) = cweight(i) * std::real(xi.col(i).dot(AX.col(i)));
  }
  return xi * q.asDiagonal() * xi.adjoint();
}

double ChannelOperator::quadratic_form(const CMat& A) const {
  const long N = xi.cols();
  const CMat AX = A * xi;
  double total = 0.0;
  for (long i = 0; i < N; ++i) {
    const double s = std::real(xi.col(i).dot(AX.col(i)));
    total += cweight(i) * s * s;
  }
  return total;
}

namespace {

// Power iteration for the top eigenvalue of the (PSD, self-adjoint) channel
// restricted to a subspace kept invariant by `project`.
double power_top(const ChannelOperator& op,
                 const std::function<void(CMat&)>& project, CMat seed,
                 CMat* vec_out) {
  project(seed);
  double nrm = seed.norm();
  if (!(nrm > 0)) throw numerical_error("degenerate power iteration seed");
  seed /= nrm;
  double lambda = 0.0;
  for (int it = 0; it < 20000; ++it) {
    CMat next = op.apply(seed);
    project(next);
    const double rayleigh = std::real((seed.adjoint() * next).trace());
    nrm = next.norm();
    if (!(nrm > 0)) return 0.0;
    next /= nrm;
    seed = next;
    if (std::abs(rayleigh - lambda) <= 1e-13 * std::max(1.0, std::abs(rayleigh)) &&
        it > 8) {
      lambda = rayleigh;
      break;
    }
    lambda = rayleigh;
  }
  if (vec_out) *vec_out = seed;
  return lambda;
}

}  // namespace

ChannelSpectrum channel_spectrum(const ChannelOperator& op) {
  ChannelSpectrum sp;
  const int np = op.n_p;
  if (op.dense) {
    Eigen::SelfAdjointEigenSolver<RMat> es(*op.dense);
    const RVec ev = es.eigenvalues();  // ascending
    const int dimh = static_cast<int>(ev.size());
    sp.eigenvalues = ev.reverse();
    sp.gamma0 = sp.eigenvalues(0);
    sp.gamma1 = sp.eigenvalues(1);
    // Leading eigenvector against the Id coordinate direction (the first
    // n_p Hermitian basis vectors are the diagonal units).
    const RVec v0 = es.eigenvectors().col(dimh - 1);
    sp.id_overlap =
        std::abs(v0.head(np).sum()) / std::sqrt(static_cast<double>(np));
  } else {
    std::mt19937_64 rng(0x9e3779b97f4a7c15ull);
    const CMat seed_full = random_hermitian(rng, np);
    CMat v0;
    sp.gamma0 = power_top(
        op, [](CMat&) {}, seed_full, &v0);
    const cxd ov = v0.trace() / std::sqrt(static_cast<double>(np));
    sp.id_overlap = std::abs(ov);
    const CMat seed_tr = random_traceless_hermitian(rng, np);
    sp.gamma1 = power_top(
        op,
        [np](CMat& A) {
          A -= (A.trace() / static_cast<double>(np)) *
               CMat::Identity(np, np);
        },
        seed_tr, nullptr);
  }
  sp.gap = 1.0 - sp.gamma1;
  sp.lambda1_est = 4.0 * kPi * op.p * sp.gap;
  return sp;
}

}  // namespace balmet
