#pragma once

// Shared fixtures for the test binaries: exact balanced products on the
// projective models, closed-form channel eigenvalues, and a tiny
// least-squares helper.  Header-only so both the doctest suite and the
// acceptance binary can use it.

#include <cmath>
#include <vector>

#include "balmet/geometry/eval_table.hpp"
#include "balmet/geometry/model.hpp"
#include "balmet/geometry/quadrature.hpp"

namespace balmet::testing {

// Exact binomial coefficient as a double (fine for the arguments used here,
// all far below the 2^53 integer limit).
inline double binom(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

// Balanced product on the projective line at power p: the monomial frame
// z^j has Gram matrix diag(1 / C(2p, j)), for which the Bergman kernel is
// K(z) = sum_j C(2p,j) |z|^{2j} = (1 + |z|^2)^{2p} -- the round metric.
inline CMat balanced_line_product(int p) {
  const int d = 2 * p;
  CMat H = CMat::Zero(d + 1, d + 1);
  for (int j = 0; j <= d; ++j) H(j, j) = 1.0 / binom(d, j);
  return H;
}

// Same on the projective plane: monomials z1^a z2^b (a-major order, b inner)
// have Gram diag(1 / multinomial(3p; a, b, 3p-a-b)), with kernel
// (1 + |z1|^2 + |z2|^2)^{3p}.
inline CMat balanced_plane_product(int p) {
  const int d = 3 * p;
  const int n_p = (d + 1) * (d + 2) / 2;
  CMat H = CMat::Zero(n_p, n_p);
  int j = 0;
  for (int a = 0; a <= d; ++a)
    for (int b = 0; b <= d - a; ++b, ++j)
      H(j, j) = 1.0 / (binom(d, a) * binom(d - a, b));
  return H;
}

// Traceless eigenvalues of the quantum channel at the round balanced metric
// on the line: the spin-j isotypic block of E has eigenvalue
//   gamma_j = prod_{i=0}^{j-1} (2p - i) / (2p + 2 + i),   j = 1, 2, ...
// so gamma_1 = p/(p+1) and gamma_2 = 2p(2p-1)/((2p+2)(2p+3)).  The first two
// are the ones the dynamics actually exposes.
inline double gamma1_line(int p) { return static_cast<double>(p) / (p + 1); }
inline double gamma2_line(int p) {
  const double q = 2.0 * p;
  return q * (q - 1.0) / ((q + 2.0) * (q + 3.0));
}

struct LineFixture {
  PolarizedModel model;
  Quadrature quad;
  EvalTable table;
};

inline LineFixture make_line(int p, int order) {
  LineFixture f;
  f.model = build_model(ModelKind::ProjectiveLine, 2, p);
  f.quad = make_quadrature(f.model, order);
  f.table = eval_frame(f.model, f.quad);
  return f;
}

inline LineFixture make_plane(int p, int order) {
  LineFixture f;
  f.model = build_model(ModelKind::ProjectivePlane, 3, p);
  f.quad = make_quadrature(f.model, order);
  f.table = eval_frame(f.model, f.quad);
  return f;
}

// Ordinary least squares y ~ intercept + slope * x, plus R^2.
struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

inline LinearFit fit_line(const std::vector<double>& x,
                          const std::vector<double>& y) {
  LinearFit f;
  const size_t n = x.size();
  if (n < 2) return f;
  double sx = 0, sy = 0;
  for (size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = (syy > 0) ? (sxy * sxy) / (sxx * syy) : 1.0;
  return f;
}

}  // namespace balmet::testing
