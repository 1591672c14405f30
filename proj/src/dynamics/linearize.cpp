#include "balmet/dynamics/linearize.hpp"

#include <cmath>

#include "balmet/dynamics/moment.hpp"
#include "balmet/linalg/herm_product.hpp"

namespace balmet {

namespace {

double eps_over_p(const VolumeMapSpec& vm, int p) {
  if (vm.kind == VolumeMapSpec::Kind::Liouville) {
    throw invalid_input(
        "no closed-form linearization for the Liouville volume map");
  }
  return static_cast<double>(vm.eps) / p;
}

}  // namespace

DmuCheck dmu_form(const CMat& A, const HermProduct& Hstar,
                  const VolumeMapSpec& vm, const EvalTable& table,
                  double fd_step) {
  const int np = table.n_p;
  if (A.rows() != np || A.cols() != np) {
    throw invalid_input("direction has wrong dimensions");
  }
  const double ep = eps_over_p(vm, table.p);

  // Working frame of H*: coefficients L^{-adj}... the basis with Gram Id is
  // s = L^{-1} e in the action convention (g s)_j = sum g_{jk} s_k, i.e.
  // coefficient matrix G* = L^{-1}.
  const CMat Gstar =
      Hstar.chol_lower().triangularView<Eigen::Lower>().solve(
          CMat::Identity(np, np));
  const auto g_of = [&](double t) -> double {
    const CMat G = herm_exp(A, t) * Gstar;
    const CMat mu = moment_map(BasisState{G}, vm, table);
    return std::real((A * mu).trace());
  };

  const double vol = volume_density(vm, Hstar, table).volume;
  DmuCheck out;
  out.lhs = (np / (2.0 * vol)) * (g_of(fd_step) - g_of(-fd_step)) /
            (2.0 * fd_step);

  const ChannelOperator op = channel(Hstar, vm, table);
  out.rhs = std::real((A * A).trace()) - (1.0 - ep) * op.quadratic_form(A);
  out.rel_gap = std::abs(out.lhs - out.rhs) /
                std::max({std::abs(out.lhs), std::abs(out.rhs), 1e-300});
  return out;
}

LinearizedMap linearized_map(const HermProduct& Hstar, const VolumeMapSpec& vm,
                             const EvalTable& table, int n_directions,
                             std::uint64_t seed, double fd_step) {
  const int np = table.n_p;
  const double ep = eps_over_p(vm, table.p);

  // Refuse to linearize anywhere but at a fixed point.
  const HermProduct Tstar{donaldson_step(Hstar, vm, table)};
  const double fixed_gap =
      distance(normalize_det(Tstar), normalize_det(Hstar));
  if (fixed_gap > 10.0 * default_fixed_point_tol(table)) {
    throw invalid_input(
        "fixed point required: the supplied product moves by " +
        std::to_string(fixed_gap) + " under the balancing step");
  }

  LinearizedMap lin;
  const ChannelOperator op = channel(Hstar, vm, table);
  lin.spectrum = channel_spectrum(op);
  lin.prefactor = 1.0 - ep;
  lin.top_traceless = lin.prefactor * lin.spectrum.gamma1;
  if (lin.spectrum.eigenvalues.size() > 0) {
    lin.dt_eigenvalues = lin.prefactor * lin.spectrum.eigenvalues;
    lin.dt_eigenvalues(0) = 1.0;  // DT(Id) = Id for every eps
  }

  // Finite-difference verification of
  //   DT(A) = (1 - eps/p) E(A) + (eps/p) (tr A / n_p) Id
  // in the working frame: Phi(t) = L^{-1} T(L e^{tA} L^adj) L^{-adj}.
  const CMat& L = Hstar.chol_lower();
  const auto phi = [&](const CMat& A, double t) -> CMat {
    const CMat Ht = L * herm_exp(A, t) * L.adjoint();
    const CMat T = donaldson_step(HermProduct{Ht}, vm, table);
    const CMat S = L.triangularView<Eigen::Lower>().solve(T);
    return L.triangularView<Eigen::Lower>()
        .solve(S.adjoint().eval())
        .adjoint();
  };

  std::mt19937_64 rng(seed);
  lin.fd_rel_gaps.reserve(n_directions);
  for (int d = 0; d < n_directions; ++d) {
    CMat A = random_hermitian(rng, np);
    A /= A.norm();
    const CMat fd =
        (phi(A, fd_step) - phi(A, -fd_step)) / (2.0 * fd_step);
    const CMat closed =
        lin.prefactor * op.apply(A) +
        ep * (A.trace() / static_cast<double>(np)) *
            CMat::Identity(np, np);
    const double gap = (fd - closed).norm() / closed.norm();
    lin.fd_rel_gaps.push_back(gap);
    lin.max_fd_rel_gap = std::max(lin.max_fd_rel_gap, gap);
  }
  return lin;
}

}  // namespace balmet
