#pragma once

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "balmet/common.hpp"

namespace balmet {

enum class ModelKind {
  ProjectiveLine,   // P^1, holomorphic frame z^j on the affine chart
  ProjectivePlane,  // P^2, frame z1^a z2^b on the affine chart
  CustomTable,      // nodes/weights/values/derivatives read from a file
};

// Precomputed evaluation data backing a CustomTable model.  Layout matches
// EvalTable (see eval_table.hpp); values/derivatives are stored unscaled.
struct CustomTableData {
  int n = 0;          // complex dimension
  int n_p = 0;        // sections in the frame
  int p = 0;          // tensor power of the polarization
  RMat coords;        // node_count x 2n real chart coordinates
  RVec weights;       // positive quadrature weights
  CMat values;        // node_count x n_p section values
  std::vector<CMat> derivs;  // n matrices, holomorphic coordinate derivatives
};

// A model manifold with a chosen power L^p of the anticanonical root, plus
// everything needed to evaluate the induced section frame.
//
// For the projective models, k is the degree of the anticanonical bundle
// divided by the canonical root degree: P^1 has -K = O(2) (k = 2) and
// P^2 has -K = O(3) (k = 3).  Sections of L^p are degree-kp forms, so
//   n_p = kp + 1          on the line,
//   n_p = (kp+1)(kp+2)/2  on the plane.
struct PolarizedModel {
  ModelKind kind = ModelKind::ProjectiveLine;
  int n = 1;    // complex dimension
  int k = 2;    // polarization degree per power
  int p = 1;    // power
  int n_p = 3;  // dimension of the section space
  std::shared_ptr<const CustomTableData> table;  // CustomTable only
};

// Builds a projective model.  k must match the anticanonical degree of the
// chosen manifold (2 for the line, 3 for the plane); p >= 1.
PolarizedModel build_model(ModelKind kind, int k, int p);

// Builds a CustomTable model from a text table.  Format (whitespace
// separated, `#` comment lines allowed before the header):
//
//   n n_p p node_count
//   x_1 .. x_{2n}  w  Re(v_0) Im(v_0) .. Re(v_{n_p-1}) Im(v_{n_p-1})
//                     then for each coordinate a = 1..n the derivative row
//                     Re(d_a v_0) Im(d_a v_0) .. appended on the same line
//
// so every node line carries 2n + 1 + 2*n_p*(1 + n) numbers.
PolarizedModel build_model(const std::string& table_path);

CustomTableData read_custom_table(std::istream& in, const std::string& origin);
void write_custom_table(std::ostream& out, const CustomTableData& data);

}  // namespace balmet
