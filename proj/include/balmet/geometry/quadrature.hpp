#pragma once

#include "balmet/common.hpp"
#include "balmet/geometry/model.hpp"

namespace balmet {

// Quadrature over the affine chart C^n of a projective model (or the stored
// nodes of a custom table).  Weights are with respect to chart Lebesgue
// measure; the Fubini-Study or any other smooth density is part of the
// integrand, never of the weight.
//
// Construction per complex coordinate: substitute z = tan(theta/2) e^{i phi},
// run Gauss-Legendre of the requested order in theta over (0, pi) and a
// uniform phi grid with `order` points (trapezoid rule, exact on the circle
// for frequencies below the grid size).  The chart weight
// tan(theta/2) (1 + tan(theta/2)^2) / 2 folds the polar Jacobian in, so a
// smooth integrand on the sphere is integrated with spectral accuracy on
// the line.  On the plane the rule is the product of two such charts and
// the radial coupling (1 + u1 + u2)^{-s} limits it to roughly order^-4
// convergence; `tolerance` reports the measured accuracy either way.
struct Quadrature {
  int order = 0;
  int n = 1;
  RMat nodes;    // N x 2n: (Re z_1, Im z_1, ..., Re z_n, Im z_n)
  RVec weights;  // N, strictly positive
  // Measured accuracy: |I(order) - I(2*order)| on the Fubini-Study reference
  // density, floored at 1e-15.  Downstream fixed-point tolerances use it.
  double tolerance = 1e-15;
};

// order >= 2 required.  For CustomTable models the stored nodes are returned
// and `order` is ignored.
Quadrature make_quadrature(const PolarizedModel& model, int order);

// Integral of the Fubini-Study reference density (1 + |z|^2)^{-(n+1)} over
// the chart, evaluated in streaming fashion (no node storage) so that
// order-doubling checks on the plane stay cheap on memory.
// Exact values: pi for the line, pi^2/2 for the plane.
double reference_chart_integral(const PolarizedModel& model, int order);

}  // namespace balmet
