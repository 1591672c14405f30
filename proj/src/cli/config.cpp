#include "balmet/cli/config.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace balmet {

using nlohmann::json;

namespace {

json to_json_obj(const RunConfig& c) {
  json j;
  j["command"] = c.command;
  j["model"] = c.model;
  j["k"] = c.k;
  j["p"] = c.p;
  j["p_begin"] = c.p_begin;
  j["p_end"] = c.p_end;
  j["volmap"] = c.volmap;
  j["order"] = c.order;
  j["tol"] = c.tol;
  j["max_steps"] = c.max_steps;
  j["dt"] = c.dt;
  j["t_end"] = c.t_end;
  j["perturb"] = c.perturb;
  j["n_directions"] = c.n_directions;
  j["seed"] = c.seed;
  j["snapshot"] = c.snapshot;
  j["out_dir"] = c.out_dir;
  return j;
}

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "command", "model",  "k",         "p",            "p_begin",
      "p_end",   "volmap", "order",     "tol",          "max_steps",
      "dt",      "t_end",  "perturb",   "n_directions", "seed",
      "snapshot", "out_dir"};
  return keys;
}

}  // namespace

std::string config_to_json(const RunConfig& c) {
  // nlohmann objects iterate alphabetically, so dump() is canonical.
  return to_json_obj(c).dump(2) + "\n";
}

RunConfig config_from_json(const std::string& js) {
  json j;
  try {
    j = json::parse(js);
  } catch (const json::parse_error& e) {
    throw invalid_input(std::string("bad config JSON: ") + e.what());
  }
  if (!j.is_object()) throw invalid_input("config JSON must be an object");
  for (const auto& item : j.items()) {
    if (known_keys().count(item.key()) == 0) {
      throw invalid_input("unknown config key: " + item.key());
    }
  }
  RunConfig c;
  try {
    c.command = j.value("command", c.command);
    c.model = j.value("model", c.model);
    c.k = j.value("k", c.k);
    c.p = j.value("p", c.p);
    c.p_begin = j.value("p_begin", c.p_begin);
    c.p_end = j.value("p_end", c.p_end);
    c.volmap = j.value("volmap", c.volmap);
    c.order = j.value("order", c.order);
    c.tol = j.value("tol", c.tol);
    c.max_steps = j.value("max_steps", c.max_steps);
    c.dt = j.value("dt", c.dt);
    c.t_end = j.value("t_end", c.t_end);
    c.perturb = j.value("perturb", c.perturb);
    c.n_directions = j.value("n_directions", c.n_directions);
    c.seed = j.value("seed", c.seed);
    c.snapshot = j.value("snapshot", c.snapshot);
    c.out_dir = j.value("out_dir", c.out_dir);
  } catch (const json::type_error& e) {
    throw invalid_input(std::string("bad config field type: ") + e.what());
  }
  return c;
}

std::uint64_t config_hash(const RunConfig& c) {
  const std::string s = config_to_json(c);
  std::uint64_t h = 14695981039346656037ull;  // FNV-1a 64
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

PolarizedModel model_from_config(const RunConfig& c, int p_override) {
  const int p = p_override > 0 ? p_override : c.p;
  if (c.model.rfind("custom:", 0) == 0) {
    return build_model(c.model.substr(7));
  }
  ModelKind kind;
  int knat;
  if (c.model == "p1" || c.model == "line") {
    kind = ModelKind::ProjectiveLine;
    knat = 2;
  } else if (c.model == "p2" || c.model == "plane") {
    kind = ModelKind::ProjectivePlane;
    knat = 3;
  } else {
    throw invalid_input("unknown model '" + c.model +
                        "' (use p1, p2 or custom:PATH)");
  }
  return build_model(kind, c.k > 0 ? c.k : knat, p);
}

int order_from_config(const RunConfig& c) {
  if (c.order > 0) return c.order;
  // Plane node count grows like order^4 and the product chart rule only
  // converges algebraically there, so a moderate default keeps memory sane;
  // raise --order for sharper plane integrals.
  if (c.model == "p2" || c.model == "plane") return 16;
  return 64;
}

VolumeMapSpec volmap_from_config(const RunConfig& c, const EvalTable& table) {
  const std::string& v = c.volmap;
  const auto load_density = [&](const std::string& path) -> RVec {
    std::ifstream in(path);
    if (!in) throw invalid_input("cannot open density file: " + path);
    std::vector<double> vals;
    double x;
    while (in >> x) vals.push_back(x);
    if (!in.eof()) throw invalid_input("bad number in density file: " + path);
    if (static_cast<long>(vals.size()) != table.node_count()) {
      throw invalid_input("density file " + path + " has " +
                          std::to_string(vals.size()) + " values, expected " +
                          std::to_string(table.node_count()));
    }
    return Eigen::Map<const RVec>(vals.data(), vals.size());
  };

  if (v == "anticanonical") return VolumeMapSpec::anticanonical();
  if (v == "liouville") return VolumeMapSpec::liouville();
  if (v == "constant") {
    // Bare form: the round Fubini-Study reference density.  A uniform chart
    // density would pile all quadrature mass on the outermost rings (the
    // chart is noncompact), so it is not offered.
    return VolumeMapSpec::constant(reference_density(table));
  }
  if (v.rfind("constant:", 0) == 0) {
    return VolumeMapSpec::constant(load_density(v.substr(9)));
  }
  if (v == "canonical") {
    VolumeMapSpec s;
    s.eps = +1;
    return s;  // K^{1/p} against plain Lebesgue (quadrature-regularized)
  }
  if (v.rfind("canonical:", 0) == 0) {
    return VolumeMapSpec::canonical(load_density(v.substr(10)));
  }
  throw invalid_input(
      "unknown volume map '" + v +
      "' (use anticanonical, canonical[:FILE], constant[:FILE], liouville)");
}

namespace {

constexpr char kSnapMagic[16] = {'B', 'A', 'L', 'M', 'E', 'T', 'S', 'N',
                                 'A', 'P', '1', '\n', 0, 0, 0, 0};

}  // namespace

void write_snapshot(const std::string& path, const Snapshot& snap) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw invalid_input("cannot write snapshot: " + path);
  out.write(kSnapMagic, sizeof kSnapMagic);
  const std::uint32_t kind = static_cast<std::uint32_t>(snap.kind);
  const std::int32_t np = snap.n_p, p = snap.p, k = snap.k;
  out.write(reinterpret_cast<const char*>(&kind), sizeof kind);
  out.write(reinterpret_cast<const char*>(&np), sizeof np);
  out.write(reinterpret_cast<const char*>(&p), sizeof p);
  out.write(reinterpret_cast<const char*>(&k), sizeof k);
  out.write(reinterpret_cast<const char*>(&snap.hash), sizeof snap.hash);
  for (int r = 0; r < snap.n_p; ++r) {
    for (int cidx = 0; cidx < snap.n_p; ++cidx) {
      const double re = snap.matrix(r, cidx).real();
      const double im = snap.matrix(r, cidx).imag();
      out.write(reinterpret_cast<const char*>(&re), sizeof re);
      out.write(reinterpret_cast<const char*>(&im), sizeof im);
    }
  }
  if (!out) throw invalid_input("short write on snapshot: " + path);
}

Snapshot read_snapshot(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw invalid_input("cannot open snapshot: " + path);
  char magic[16];
  in.read(magic, sizeof magic);
  if (!in || std::memcmp(magic, kSnapMagic, sizeof magic) != 0) {
    throw invalid_input("not a snapshot file: " + path);
  }
  Snapshot s;
  std::uint32_t kind = 0;
  std::int32_t np = 0, p = 0, k = 0;
  in.read(reinterpret_cast<char*>(&kind), sizeof kind);
  in.read(reinterpret_cast<char*>(&np), sizeof np);
  in.read(reinterpret_cast<char*>(&p), sizeof p);
  in.read(reinterpret_cast<char*>(&k), sizeof k);
  in.read(reinterpret_cast<char*>(&s.hash), sizeof s.hash);
  if (!in || np < 1 || kind > 1) {
    throw invalid_input("corrupt snapshot header: " + path);
  }
  s.kind = static_cast<int>(kind);
  s.n_p = np;
  s.p = p;
  s.k = k;
  s.matrix.resize(np, np);
  for (int r = 0; r < np; ++r) {
    for (int cidx = 0; cidx < np; ++cidx) {
      double re = 0, im = 0;
      in.read(reinterpret_cast<char*>(&re), sizeof re);
      in.read(reinterpret_cast<char*>(&im), sizeof im);
      s.matrix(r, cidx) = cxd(re, im);
    }
  }
  if (!in) throw invalid_input("truncated snapshot: " + path);
  return s;
}

}  // namespace balmet
