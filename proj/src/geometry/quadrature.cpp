#include "balmet/geometry/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <vector>

namespace balmet {

namespace {

constexpr double kPi = std::numbers::pi;

// Gauss-Legendre nodes/weights on (-1, 1) by Newton iteration on P_N.
// Standard textbook scheme; accuracy ~1e-15 for the orders used here.
void gauss_legendre(int order, std::vector<double>& x, std::vector<double>& w) {
  x.resize(order);
  w.resize(order);
  const int m = (order + 1) / 2;
  for (int i = 0; i < m; ++i) {
    // Chebyshev-based initial guess.
    double z = std::cos(kPi * (i + 0.75) / (order + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < order; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      pp = order * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / pp;
      z -= dz;
      if (std::abs(dz) < 1e-15) break;
    }
    x[i] = -z;
    x[order - 1 - i] = z;
    w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
    w[order - 1 - i] = w[i];
  }
}

// Radial substitution r = tan(theta/2): one complex coordinate contributes
// nodes r_a e^{i phi_b} with Lebesgue weight
//   (pi/2) w_a * (2 pi / M) * r_a (1 + r_a^2) / 2.
struct RingSet {
  std::vector<double> r, wr;     // radius and its full weight factor
  std::vector<double> c, s;      // cos/sin of the phi grid
  double wphi = 0.0;
};

RingSet make_rings(int order) {
  RingSet rs;
  std::vector<double> x, w;
  gauss_legendre(order, x, w);
  rs.r.resize(order);
  rs.wr.resize(order);
  for (int a = 0; a < order; ++a) {
    const double theta = 0.5 * kPi * (x[a] + 1.0);
    const double r = std::tan(0.5 * theta);
    rs.r[a] = r;
    rs.wr[a] = (0.5 * kPi * w[a]) * 0.5 * r * (1.0 + r * r);
  }
  const int M = order;
  rs.c.resize(M);
  rs.s.resize(M);
  for (int b = 0; b < M; ++b) {
    const double phi = 2.0 * kPi * b / M;
    rs.c[b] = std::cos(phi);
    rs.s[b] = std::sin(phi);
  }
  rs.wphi = 2.0 * kPi / M;
  return rs;
}

}  // namespace

double reference_chart_integral(const PolarizedModel& model, int order) {
  const RingSet rs = make_rings(order);
  const int M = order;
  if (model.n == 1) {
    // Integrand (1+r^2)^{-2} is phi-independent: the ring sum collapses.
    double total = 0.0;
    for (int a = 0; a < order; ++a) {
      const double u = rs.r[a] * rs.r[a];
      total += rs.wr[a] * M * rs.wphi / ((1.0 + u) * (1.0 + u));
    }
    return total;
  }
  // Plane: (1 + u1 + u2)^{-3}, phi-independent again.
  double total = 0.0;
  for (int a1 = 0; a1 < order; ++a1) {
    const double u1 = rs.r[a1] * rs.r[a1];
    for (int a2 = 0; a2 < order; ++a2) {
      const double u2 = rs.r[a2] * rs.r[a2];
      const double den = 1.0 + u1 + u2;
      total += rs.wr[a1] * rs.wr[a2] / (den * den * den);
    }
  }
  return total * (M * rs.wphi) * (M * rs.wphi);
}

Quadrature make_quadrature(const PolarizedModel& model, int order) {
  Quadrature q;
  if (model.kind == ModelKind::CustomTable) {
    const CustomTableData& t = *model.table;
    q.order = 0;
    q.n = t.n;
    q.nodes = t.coords;
    q.weights = t.weights;
    q.tolerance = 1e-9;  // nothing to double against; conservative default
    return q;
  }
  if (order < 2) throw invalid_input("quadrature order must be >= 2");

  const RingSet rs = make_rings(order);
  const int M = order;
  q.order = order;
  q.n = model.n;

  if (model.n == 1) {
    const long N = static_cast<long>(order) * M;
    q.nodes.resize(N, 2);
    q.weights.resize(N);
    long i = 0;
    for (int a = 0; a < order; ++a) {
      for (int b = 0; b < M; ++b, ++i) {
        q.nodes(i, 0) = rs.r[a] * rs.c[b];
        q.nodes(i, 1) = rs.r[a] * rs.s[b];
        q.weights(i) = rs.wr[a] * rs.wphi;
      }
    }
  } else {
    const long ring = static_cast<long>(order) * M;
    const long N = ring * ring;
    q.nodes.resize(N, 4);
    q.weights.resize(N);
    long i = 0;
    for (int a1 = 0; a1 < order; ++a1) {
      for (int b1 = 0; b1 < M; ++b1) {
        const double x1 = rs.r[a1] * rs.c[b1];
        const double y1 = rs.r[a1] * rs.s[b1];
        const double w1 = rs.wr[a1] * rs.wphi;
        for (int a2 = 0; a2 < order; ++a2) {
          for (int b2 = 0; b2 < M; ++b2, ++i) {
            q.nodes(i, 0) = x1;
            q.nodes(i, 1) = y1;
            q.nodes(i, 2) = rs.r[a2] * rs.c[b2];
            q.nodes(i, 3) = rs.r[a2] * rs.s[b2];
            q.weights(i) = w1 * rs.wr[a2] * rs.wphi;
          }
        }
      }
    }
  }

  const double i1 = reference_chart_integral(model, order);
  const double i2 = reference_chart_integral(model, 2 * order);
  q.tolerance = std::max(std::abs(i1 - i2), 1e-15);
  return q;
}

}  // namespace balmet
