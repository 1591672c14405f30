#include "balmet/dynamics/donaldson.hpp"

#include <cmath>
#include <limits>

namespace balmet {

namespace {

// Everything one balancing step produces, from one pass over the nodes.
struct StepData {
  CMat T;              // next product, reference frame
  double volume = 0.0;
  double rho_dev = 0.0;
  double mu_norm = 0.0;
  double logdet_ratio = 0.0;  // log det(T(H) H^{-1}) <= 0
};

StepData full_step(const HermProduct& H, const VolumeMapSpec& vm,
                   const EvalTable& table) {
  const WorkingFrame f = working_frame(H, table);
  const VolumeDensity vd = volume_density(vm, H, f, table);
  const RVec d =
      (table.weights.array() * vd.density.array() / f.k_scaled.array());
  const CMat M = f.B * d.asDiagonal() * f.B.adjoint();

  StepData out;
  out.volume = vd.volume;
  const int np = table.n_p;
  const double target = np / vd.volume;

  Eigen::LLT<CMat> llt(M);
  if (llt.info() != Eigen::Success) {
    throw numerical_error(
        "L2 Gram matrix is numerically singular; use a finer quadrature so "
        "the nodes resolve the section frame");
  }
  const CMat Minv_B = llt.solve(f.B);
  const long N = table.node_count();
  for (long i = 0; i < N; ++i) {
    const double rho =
        std::real(f.B.col(i).dot(Minv_B.col(i))) / f.k_scaled(i);
    out.rho_dev = std::max(out.rho_dev, std::abs(rho - target));
  }
  out.mu_norm = (M - (vd.volume / np) * CMat::Identity(np, np)).norm();

  const CMat Lm = llt.matrixL();
  double logdet_m = 0.0;
  for (int j = 0; j < np; ++j) {
    logdet_m += 2.0 * std::log(std::real(Lm(j, j)));
  }
  out.logdet_ratio = np * std::log(target) + logdet_m;

  const CMat& L = H.chol_lower();
  out.T = target * (L * M * L.adjoint());
  return out;
}

}  // namespace

CMat donaldson_step(const HermProduct& H, const VolumeMapSpec& vm,
                    const EvalTable& table) {
  return full_step(H, vm, table).T;
}

double energy(const HermProduct& H, const VolumeMapSpec& vm,
              const EvalTable& table) {
  return -std::log(volume_density(vm, H, table).volume);
}

double psi(const HermProduct& H, const VolumeMapSpec& vm,
           const EvalTable& table) {
  return energy(H, vm, table) +
         H.log_det() / (static_cast<double>(table.p) * table.n_p);
}

double default_fixed_point_tol(const EvalTable& table) {
  return std::max(10.0 * table.quad_tol, 1e-9);
}

RateEstimate rate_estimate(const std::vector<double>& dist_to_final) {
  RateEstimate r;
  r.beta_hat = std::numeric_limits<double>::quiet_NaN();
  const double floor =
      100.0 * std::numeric_limits<double>::epsilon();
  // Usable prefix: strictly positive distances above the rounding floor.
  int usable = 0;
  while (usable < static_cast<int>(dist_to_final.size()) &&
         dist_to_final[usable] > floor) {
    ++usable;
  }
  // The last few distances are biased by the finite endpoint
  // (d_k ~ C beta^k (1 - beta^{K-k})); drop them.
  constexpr int kDropTail = 12;
  const int end = usable - kDropTail;
  if (end < 2) return r;
  // Geometric-mean ratio over the longest clean window, capped to stay in
  // the asymptotic regime.
  const int begin = std::max(0, end - 40);
  if (end - begin < 10) return r;
  r.window_begin = begin;
  r.window_end = end;
  r.beta_hat = std::pow(dist_to_final[end - 1] / dist_to_final[begin],
                        1.0 / (end - 1 - begin));
  return r;
}

IterationReport iterate(const CMat& H0, const VolumeMapSpec& vm,
                        const EvalTable& table, const IterateOptions& opt) {
  IterationReport rep;
  rep.tol_used = opt.tol > 0.0 ? opt.tol : default_fixed_point_tol(table);
  if (opt.max_steps < 1) throw invalid_input("max_steps must be >= 1");

  std::vector<HermProduct> visited;      // det-normalized copies for distances
  std::vector<double> psis;
  HermProduct H{H0};
  double prev_step_dist = 0.0;
  const int np = table.n_p;

  for (int k = 0;; ++k) {
    const StepData sd = full_step(H, vm, table);
    IterStepRecord rec;
    rec.k = k;
    rec.energy_value = -std::log(sd.volume);
    rec.logdet = H.log_det();
    rec.psi_value =
        rec.energy_value + rec.logdet / (static_cast<double>(table.p) * np);
    rec.step_dist = prev_step_dist;
    rec.rho_dev = sd.rho_dev;
    rec.mu_norm = sd.mu_norm;
    rep.steps.push_back(rec);
    visited.push_back(normalize_det(H));
    psis.push_back(rec.psi_value);
    if (sd.logdet_ratio > 1e-10) rep.logdet_step_nonpositive = false;

    HermProduct Hnext{sd.T};
    const double d = distance(visited.back(), normalize_det(Hnext));
    if (d < rep.tol_used) {
      // Converged: record the arrival product as the final iterate.
      const StepData fin = full_step(Hnext, vm, table);
      IterStepRecord frec;
      frec.k = k + 1;
      frec.energy_value = -std::log(fin.volume);
      frec.logdet = Hnext.log_det();
      frec.psi_value =
          frec.energy_value + frec.logdet / (static_cast<double>(table.p) * np);
      frec.step_dist = d;
      frec.rho_dev = fin.rho_dev;
      frec.mu_norm = fin.mu_norm;
      rep.steps.push_back(frec);
      visited.push_back(normalize_det(Hnext));
      psis.push_back(frec.psi_value);
      if (fin.logdet_ratio > 1e-10) rep.logdet_step_nonpositive = false;
      rep.converged = true;
      rep.termination = "tolerance";
      rep.H_final = Hnext.mat();
      break;
    }
    if (k + 1 >= opt.max_steps) {
      rep.converged = false;
      rep.termination = "max-steps";
      rep.H_final = Hnext.mat();
      visited.push_back(normalize_det(Hnext));
      break;
    }
    H = Hnext;
    prev_step_dist = d;
  }

  for (std::size_t j = 0; j + 1 < psis.size(); ++j) {
    if (psis[j + 1] > psis[j] + 1e-12 * std::max(1.0, std::abs(psis[j]))) {
      rep.psi_nonincreasing = false;
    }
  }

  const HermProduct& last = visited.back();
  std::vector<double> dists;
  dists.reserve(rep.steps.size());
  for (std::size_t j = 0; j < rep.steps.size(); ++j) {
    const double dj = distance(visited[j], last);
    dists.push_back(dj);
    rep.steps[j].dist_to_final = dj;
  }
  rep.beta_hat = rate_estimate(dists).beta_hat;
  return rep;
}

}  // namespace balmet
