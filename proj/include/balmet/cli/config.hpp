#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "balmet/common.hpp"
#include "balmet/geometry/eval_table.hpp"
#include "balmet/geometry/model.hpp"
#include "balmet/geometry/volume_map.hpp"

namespace balmet {

// Everything a run needs, in one flat struct.  Serializes losslessly to
// JSON (alphabetical keys, fixed formatting), and the FNV-1a hash of that
// canonical form stamps every output file so results can be traced back to
// their configuration.  No timestamps anywhere: identical config means
// byte-identical outputs.
struct RunConfig {
  std::string command = "iterate";  // iterate | gap | flow | linearize | rawnsley
  std::string model = "p1";         // p1 | p2 | custom:PATH
  int k = 0;                        // 0: model default (2 for p1, 3 for p2)
  int p = 4;
  int p_begin = 0;                  // sweep range, inclusive; used when p_end >= p_begin > 0
  int p_end = 0;
  std::string volmap = "anticanonical";  // anticanonical | canonical | constant:FILE | liouville
  int order = 0;                    // 0: model default (64 line, 16 plane)
  double tol = 0.0;                 // 0: quadrature-derived default
  int max_steps = 500;
  double dt = 0.25;
  double t_end = 40.0;
  double perturb = 0.0;             // flow: amplitude of a seeded perturbation
  int n_directions = 20;            // linearize probes
  std::uint64_t seed = 12345;
  std::string snapshot;             // input snapshot path (flow/linearize/rawnsley)
  std::string out_dir = ".";
};

std::string config_to_json(const RunConfig& c);     // canonical form
RunConfig config_from_json(const std::string& js);  // inverse, strict
std::uint64_t config_hash(const RunConfig& c);      // FNV-1a 64 of the canonical form

// Model/volume-map/quadrature resolution from a config.  Throws
// invalid_input on bad names, bad ranges ("p must be >= 1"), or unreadable
// density files.
PolarizedModel model_from_config(const RunConfig& c, int p_override = 0);
int order_from_config(const RunConfig& c);
VolumeMapSpec volmap_from_config(const RunConfig& c, const EvalTable& table);

// Product / basis snapshots: a small binary container for resuming runs.
// Layout: 16-byte magic "BALMETSNAP1\n....", uint32 kind (0 product,
// 1 basis), int32 n_p, int32 p, int32 k, uint64 config hash, then n_p^2
// little-endian complex doubles, row major.
struct Snapshot {
  int kind = 0;  // 0: product matrix, 1: basis coefficient matrix
  int n_p = 0;
  int p = 0;
  int k = 0;
  std::uint64_t hash = 0;
  CMat matrix;
};

void write_snapshot(const std::string& path, const Snapshot& snap);
Snapshot read_snapshot(const std::string& path);

}  // namespace balmet
