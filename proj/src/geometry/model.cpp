#include "balmet/geometry/model.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace balmet {

namespace {

int sections_for(ModelKind kind, int k, int p) {
  const int d = k * p;
  switch (kind) {
    case ModelKind::ProjectiveLine:
      return d + 1;
    case ModelKind::ProjectivePlane:
      return (d + 1) * (d + 2) / 2;
    default:
      return 0;
  }
}

}  // namespace

PolarizedModel build_model(ModelKind kind, int k, int p) {
  if (p < 1) throw invalid_input("p must be >= 1");
  PolarizedModel m;
  m.kind = kind;
  m.p = p;
  switch (kind) {
    case ModelKind::ProjectiveLine:
      if (k != 2)
        throw invalid_input("k must be 2 for the projective line model");
      m.n = 1;
      break;
    case ModelKind::ProjectivePlane:
      if (k != 3)
        throw invalid_input("k must be 3 for the projective plane model");
      m.n = 2;
      break;
    case ModelKind::CustomTable:
      throw invalid_input("custom models are built from a table file");
  }
  m.k = k;
  m.n_p = sections_for(kind, k, p);
  return m;
}

PolarizedModel build_model(const std::string& table_path) {
  std::ifstream in(table_path);
  if (!in) throw invalid_input("cannot open table file: " + table_path);
  auto data = std::make_shared<CustomTableData>(
      read_custom_table(in, table_path));
  PolarizedModel m;
  m.kind = ModelKind::CustomTable;
  m.n = data->n;
  m.k = 0;  // no polarization degree attached to raw tables
  m.p = data->p;
  m.n_p = data->n_p;
  m.table = std::move(data);
  return m;
}

CustomTableData read_custom_table(std::istream& in, const std::string& origin) {
  // Strip # comments, then tokenize the rest as one stream of numbers.
  std::vector<double> tok;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    double v;
    while (ls >> v) tok.push_back(v);
    if (ls.fail() && !ls.eof()) {
      throw invalid_input("bad numeric field in table " + origin);
    }
  }
  if (tok.size() < 4) throw invalid_input("truncated table header in " + origin);

  CustomTableData d;
  d.n = static_cast<int>(tok[0]);
  d.n_p = static_cast<int>(tok[1]);
  d.p = static_cast<int>(tok[2]);
  const long node_count = static_cast<long>(tok[3]);
  if (d.n < 1 || d.n_p < 1 || d.p < 1 || node_count < 1) {
    throw invalid_input("invalid table header in " + origin);
  }
  const long per_node = 2L * d.n + 1 + 2L * d.n_p * (1 + d.n);
  const long expect = 4 + node_count * per_node;
  if (static_cast<long>(tok.size()) != expect) {
    throw invalid_input("table " + origin + " has " +
                        std::to_string(tok.size() - 4) +
                        " node fields, expected " +
                        std::to_string(expect - 4));
  }

  d.coords.resize(node_count, 2 * d.n);
  d.weights.resize(node_count);
  d.values.resize(node_count, d.n_p);
  d.derivs.assign(d.n, CMat(node_count, d.n_p));
  long pos = 4;
  for (long i = 0; i < node_count; ++i) {
    for (int a = 0; a < 2 * d.n; ++a) d.coords(i, a) = tok[pos++];
    d.weights(i) = tok[pos++];
    if (!(d.weights(i) > 0.0)) {
      throw invalid_input("non-positive weight at node " + std::to_string(i) +
                          " in " + origin);
    }
    for (int j = 0; j < d.n_p; ++j) {
      const double re = tok[pos++], im = tok[pos++];
      d.values(i, j) = cxd(re, im);
    }
    for (int a = 0; a < d.n; ++a) {
      for (int j = 0; j < d.n_p; ++j) {
        const double re = tok[pos++], im = tok[pos++];
        d.derivs[a](i, j) = cxd(re, im);
      }
    }
  }
  return d;
}

namespace {

void put(std::ostream& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out << buf;
}

}  // namespace

void write_custom_table(std::ostream& out, const CustomTableData& d) {
  const long node_count = d.weights.size();
  out << d.n << " " << d.n_p << " " << d.p << " " << node_count << "\n";
  for (long i = 0; i < node_count; ++i) {
    for (int a = 0; a < 2 * d.n; ++a) {
      put(out, d.coords(i, a));
      out << " ";
    }
    put(out, d.weights(i));
    for (int j = 0; j < d.n_p; ++j) {
      out << " ";
      put(out, d.values(i, j).real());
      out << " ";
      put(out, d.values(i, j).imag());
    }
    for (int a = 0; a < d.n; ++a) {
      for (int j = 0; j < d.n_p; ++j) {
        out << " ";
        put(out, d.derivs[a](i, j).real());
        out << " ";
        put(out, d.derivs[a](i, j).imag());
      }
    }
    out << "\n";
  }
}

}  // namespace balmet
