#include "balmet/geometry/volume_map.hpp"

#include <cmath>

#include "balmet/quantization/kernel.hpp"

namespace balmet {

namespace {

constexpr double kPi = 3.14159265358979323846;

void check_supplied(const RVec& d, long N) {
  if (d.size() != N) {
    throw invalid_input("supplied density has " + std::to_string(d.size()) +
                        " values, expected " + std::to_string(N));
  }
  for (long i = 0; i < N; ++i) {
    if (!std::isfinite(d(i)) || !(d(i) > 0.0)) {
      throw invalid_input("supplied density must be strictly positive; bad "
                          "value at node " + std::to_string(i));
    }
  }
}

VolumeDensity finish(RVec log_density, const EvalTable& table) {
  VolumeDensity out;
  const long N = table.node_count();
  out.density.resize(N);
  double vol = 0.0;
  for (long i = 0; i < N; ++i) {
    const double d = std::exp(log_density(i));
    if (!std::isfinite(d) || !(d > 0.0)) {
      throw numerical_error("volume density under/overflow at node " +
                            std::to_string(i));
    }
    out.density(i) = d;
    vol += table.weights(i) * d;
  }
  if (!std::isfinite(vol)) throw numerical_error("volume is not finite");
  out.log_density = std::move(log_density);
  out.volume = vol;
  return out;
}

VolumeDensity power_of_kernel(const VolumeMapSpec& spec, const RVec& log_k,
                              const EvalTable& table) {
  const long N = table.node_count();
  RVec logd;
  if (spec.eps == 0) {
    check_supplied(spec.supplied_density, N);
    logd = spec.supplied_density.array().log();
  } else {
    if (spec.eps != -1 && spec.eps != 1) {
      throw invalid_input("volume map exponent must be -1, 0 or +1");
    }
    logd = (static_cast<double>(spec.eps) / table.p) * log_k;
    if (spec.supplied_density.size() > 0) {
      check_supplied(spec.supplied_density, N);
      logd += spec.supplied_density.array().log().matrix();
    }
  }
  return finish(std::move(logd), table);
}

}  // namespace

VolumeDensity volume_density(const VolumeMapSpec& spec, const HermProduct& H,
                             const EvalTable& table) {
  if (spec.kind == VolumeMapSpec::Kind::Liouville) {
    return liouville_density(H, table);
  }
  if (spec.eps == 0) {
    return power_of_kernel(spec, RVec(), table);
  }
  return power_of_kernel(spec, kernel(H, table).log_k, table);
}

VolumeDensity volume_density(const VolumeMapSpec& spec, const HermProduct& H,
                             const WorkingFrame& frame,
                             const EvalTable& table) {
  if (spec.kind == VolumeMapSpec::Kind::Liouville) {
    return liouville_density(H, table);
  }
  return power_of_kernel(spec, frame.log_k, table);
}

VolumeDensity liouville_density(const HermProduct& H, const EvalTable& table) {
  if (H.dim() != table.n_p) {
    throw invalid_input("product dimension does not match the frame");
  }
  const long N = table.node_count();
  const int n = table.n;
  const auto lowerL = H.chol_lower().triangularView<Eigen::Lower>();
  const CMat W = lowerL.solve(CMat(table.values.transpose()));
  std::vector<CMat> D(n);
  for (int a = 0; a < n; ++a) {
    D[a] = lowerL.solve(CMat(table.derivs[a].transpose()));
  }

  // density = det(Hess log K) / (pi p)^n with
  //   Hess_{a b-bar} = (T_{ab} s0 - s1_a conj(s1_b)) / s0^2,
  //   s0 = |chi|^2, s1_a = chi^adj d_a chi-col, T_{ab} = d_b^adj d_a.
  // All entries are ratios of same-scaled columns: the table row scale
  // cancels exactly, as does any rescaling of H.
  VolumeDensity out;
  out.density.resize(N);
  out.log_density.resize(N);
  const double norm = std::pow(kPi * table.p, n);
  double vol = 0.0;
  CMat hess(n, n);
  for (long i = 0; i < N; ++i) {
    const auto chi = W.col(i);
    const double s0 = chi.squaredNorm();
    for (int a = 0; a < n; ++a) {
      const cxd s1a = chi.dot(D[a].col(i));  // chi^adj d_a
      for (int b = 0; b < n; ++b) {
        const cxd t_ab = D[b].col(i).dot(D[a].col(i));
        const cxd s1b = chi.dot(D[b].col(i));
        hess(a, b) = (t_ab * s0 - s1a * std::conj(s1b)) / (s0 * s0);
      }
    }
    const double det = std::real(CMat(hess).determinant());
    const double d = det / norm;
    if (!std::isfinite(d) || !(d > 0.0)) {
      throw numerical_error(
          "Liouville density is not positive at node " + std::to_string(i) +
          "; the kernel metric degenerates there");
    }
    out.density(i) = d;
    out.log_density(i) = std::log(d);
    vol += table.weights(i) * d;
  }
  out.volume = vol;
  return out;
}

RVec reference_density(const EvalTable& table) {
  const long N = table.node_count();
  RVec d(N);
  for (long i = 0; i < N; ++i) {
    double u = 0.0;
    for (int a = 0; a < 2 * table.n; ++a) u += table.nodes(i, a) * table.nodes(i, a);
    d(i) = std::pow(1.0 + u, -(table.n + 1));
  }
  return d;
}

}  // namespace balmet
