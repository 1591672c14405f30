#include "balmet/dynamics/moment.hpp"

#include <cmath>

#include "balmet/linalg/herm_product.hpp"
#include "balmet/quantization/kernel.hpp"

namespace balmet {

BasisState::BasisState(CMat G) : G_(std::move(G)) {
  if (G_.rows() != G_.cols() || G_.rows() == 0) {
    throw invalid_input("basis coefficient matrix must be square");
  }
  Eigen::JacobiSVD<CMat> svd(G_);
  const RVec sv = svd.singularValues();
  const double smin = sv(sv.size() - 1);
  if (!(smin > 0.0) || sv(0) / smin > 1e10) {
    throw invalid_input(
        "basis is numerically degenerate (condition number above 1e10)");
  }
}

CMat BasisState::induced_product_matrix() const {
  const CMat gram = G_.adjoint() * G_;
  Eigen::LLT<CMat> llt(gram);
  if (llt.info() != Eigen::Success) {
    throw numerical_error("basis Gram factorization failed");
  }
  return llt.solve(CMat::Identity(G_.rows(), G_.cols()));
}

double BasisState::log_det_abs() const {
  return 0.5 * std::log(std::abs(std::real(
             (G_.adjoint() * G_).determinant())));
}

namespace {

// Core of the moment map, reusable inside the flow without revalidating.
// s-frame node columns are W = G V^T; the kernel of the induced product at
// node i is exactly |W col i|^2 (table scale cancelling as usual).
CMat moment_of_coeffs(const CMat& G, const VolumeMapSpec& vm,
                      const EvalTable& table) {
  const int np = table.n_p;
  if (G.rows() != np) {
    throw invalid_input("basis dimension does not match the frame");
  }
  const CMat W = G * table.values.transpose();
  const long N = table.node_count();
  RVec ks(N);
  for (long i = 0; i < N; ++i) {
    const double v = W.col(i).squaredNorm();
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw numerical_error("induced kernel vanished at node " +
                            std::to_string(i));
    }
    ks(i) = v;
  }

  RVec dens;
  double volume = 0.0;
  if (vm.kind == VolumeMapSpec::Kind::Liouville ||
      (vm.kind == VolumeMapSpec::Kind::PowerOfKernel && vm.eps != 0)) {
    // Need the induced product explicitly for the density.
    CMat Hmat;
    {
      const CMat gram = G.adjoint() * G;
      Eigen::LLT<CMat> llt(gram);
      if (llt.info() != Eigen::Success) {
        throw numerical_error("basis Gram factorization failed");
      }
      Hmat = llt.solve(CMat::Identity(np, np));
    }
    const HermProduct Hs{Hmat};
    const VolumeDensity vd = volume_density(vm, Hs, table);
    dens = vd.density;
    volume = vd.volume;
  } else {
    const VolumeDensity vd =
        volume_density(vm, HermProduct{CMat::Identity(np, np)}, table);
    dens = vd.density;
    volume = vd.volume;
  }

  const RVec d = (table.weights.array() * dens.array() / ks.array());
  CMat mu = W * d.asDiagonal() * W.adjoint();
  mu -= (volume / np) * CMat::Identity(np, np);
  return mu;
}

}  // namespace

CMat moment_map(const BasisState& s, const VolumeMapSpec& vm,
                const EvalTable& table) {
  return moment_of_coeffs(s.coeffs(), vm, table);
}

FlowReport gradient_flow(const BasisState& s0, const VolumeMapSpec& vm,
                         const EvalTable& table, const FlowOptions& opt) {
  if (!(opt.t_end > 0.0) || !(opt.dt > 0.0) || !(opt.dt_min > 0.0)) {
    throw invalid_input("flow times and steps must be positive");
  }
  const int np = table.n_p;
  const auto rhs = [&](const CMat& G) -> CMat {
    return -moment_of_coeffs(G, vm, table) * G;
  };
  const auto rk4 = [&](const CMat& G, double h) -> CMat {
    const CMat k1 = rhs(G);
    const CMat k2 = rhs(G + 0.5 * h * k1);
    const CMat k3 = rhs(G + 0.5 * h * k2);
    const CMat k4 = rhs(G + h * k3);
    return G + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  };

  FlowReport rep;
  CMat G = s0.coeffs();
  double t = 0.0;
  double dt = std::min(opt.dt, opt.t_end);

  const auto record = [&](double dt_used) {
    const CMat mu = moment_of_coeffs(G, vm, table);
    FlowRecord r;
    r.t = t;
    r.mu_norm = mu.norm();
    {
      const CMat gram = G.adjoint() * G;
      Eigen::LLT<CMat> llt(gram);
      const CMat Hmat = llt.solve(CMat::Identity(np, np));
      const HermProduct Hs{Hmat};
      r.psi_value = -std::log(volume_density(vm, Hs, table).volume) +
                    Hs.log_det() / (static_cast<double>(table.p) * np);
      r.logdet_g = 0.5 * std::log(std::abs(std::real(gram.determinant())));
    }
    r.dt_used = dt_used;
    rep.records.push_back(r);
  };
  record(0.0);

  while (t < opt.t_end - 1e-12) {
    dt = std::min(dt, opt.t_end - t);
    const CMat full = rk4(G, dt);
    const CMat half = rk4(rk4(G, 0.5 * dt), 0.5 * dt);
    const double err = (full - half).norm() / std::max(1.0, half.norm());
    if (err <= opt.rel_tol * std::max(dt, 1e-3)) {
      G = half;  // the more accurate of the two
      t += dt;
      record(dt);
      if (static_cast<int>(rep.records.size()) > opt.max_records) {
        throw numerical_error("flow produced too many records");
      }
      if (err < 0.015625 * opt.rel_tol * std::max(dt, 1e-3)) {
        dt *= 2.0;  // comfortably accurate: try larger steps
      }
    } else {
      dt *= 0.5;
      ++rep.rejected_steps;
      if (dt < opt.dt_min) {
        throw numerical_error(
            "flow step collapsed below dt_min without meeting the local "
            "error target");
      }
    }
  }
  rep.G_final = G;
  rep.t_final = t;
  return rep;
}

}  // namespace balmet
