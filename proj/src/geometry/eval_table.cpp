#include "balmet/geometry/eval_table.hpp"

#include <cmath>

namespace balmet {

namespace {

// Scaled monomial z^j e^{-m} evaluated through logs so that large powers at
// far-out nodes never overflow: |z|^j e^{-m} = exp(j log|z| - m) <= 1 when
// m >= j log|z| is arranged by the frame scale.
cxd scaled_power(double logmag, double arg, int j, double m) {
  if (j == 0) return cxd(std::exp(-m), 0.0);
  if (!std::isfinite(logmag)) return cxd(0.0, 0.0);  // z == 0, j > 0
  const double mag = std::exp(j * logmag - m);
  return cxd(mag * std::cos(j * arg), mag * std::sin(j * arg));
}

}  // namespace

EvalTable eval_frame(const PolarizedModel& model, const Quadrature& quad) {
  EvalTable t;
  t.n = model.n;
  t.k = model.k;
  t.p = model.p;
  t.n_p = model.n_p;
  t.nodes = quad.nodes;
  t.weights = quad.weights;
  t.quad_tol = quad.tolerance;
  const long N = t.node_count();

  if (model.kind == ModelKind::CustomTable) {
    const CustomTableData& d = *model.table;
    t.values = d.values;
    t.derivs = d.derivs;
    t.scale = RVec::Zero(N);
    return t;
  }

  t.values.resize(N, t.n_p);
  t.derivs.assign(t.n, CMat(N, t.n_p));
  t.scale.resize(N);
  const int d = model.k * model.p;

  if (model.n == 1) {
    for (long i = 0; i < N; ++i) {
      const double x = t.nodes(i, 0), y = t.nodes(i, 1);
      const double u = x * x + y * y;
      const double logmag = 0.5 * std::log(u);  // -inf at z = 0, handled above
      const double arg = std::atan2(y, x);
      const double m = 0.5 * d * std::log1p(u);
      t.scale(i) = m;
      for (int j = 0; j <= d; ++j) {
        t.values(i, j) = scaled_power(logmag, arg, j, m);
        t.derivs[0](i, j) =
            (j == 0) ? cxd(0, 0)
                     : static_cast<double>(j) * scaled_power(logmag, arg, j - 1, m);
      }
    }
    return t;
  }

  // Plane: monomials z1^a z2^b with a + b <= d, enumerated a-major.
  for (long i = 0; i < N; ++i) {
    const double x1 = t.nodes(i, 0), y1 = t.nodes(i, 1);
    const double x2 = t.nodes(i, 2), y2 = t.nodes(i, 3);
    const double u = x1 * x1 + y1 * y1 + x2 * x2 + y2 * y2;
    const double lm1 = 0.5 * std::log(x1 * x1 + y1 * y1);
    const double lm2 = 0.5 * std::log(x2 * x2 + y2 * y2);
    const double a1 = std::atan2(y1, x1), a2 = std::atan2(y2, x2);
    const double m = 0.5 * d * std::log1p(u);
    t.scale(i) = m;
    // Combined exponent a lm1 + b lm2 - m <= 0, so nothing here overflows.
    const auto mono = [&](int a, int b) -> cxd {
      if ((a > 0 && !std::isfinite(lm1)) || (b > 0 && !std::isfinite(lm2)))
        return cxd(0, 0);
      const double e = (a > 0 ? a * lm1 : 0.0) + (b > 0 ? b * lm2 : 0.0) - m;
      const double ph = a * a1 + b * a2;
      const double mag = std::exp(e);
      return cxd(mag * std::cos(ph), mag * std::sin(ph));
    };
    int j = 0;
    for (int a = 0; a <= d; ++a) {
      for (int b = 0; b <= d - a; ++b, ++j) {
        t.values(i, j) = mono(a, b);
        t.derivs[0](i, j) =
            (a == 0) ? cxd(0, 0) : static_cast<double>(a) * mono(a - 1, b);
        t.derivs[1](i, j) =
            (b == 0) ? cxd(0, 0) : static_cast<double>(b) * mono(a, b - 1);
      }
    }
  }
  return t;
}

}  // namespace balmet
