#include "balmet/cli/commands.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "balmet/dynamics/donaldson.hpp"
#include "balmet/dynamics/linearize.hpp"
#include "balmet/dynamics/moment.hpp"
#include "balmet/quantization/channel.hpp"

namespace balmet {

using nlohmann::json;

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string hash_hex(std::uint64_t h) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

struct Workspace {
  PolarizedModel model;
  Quadrature quad;
  EvalTable table;
  VolumeMapSpec vm;
};

Workspace make_workspace(const RunConfig& c, int p_override = 0) {
  Workspace w;
  w.model = model_from_config(c, p_override);
  w.quad = make_quadrature(w.model, order_from_config(c));
  w.table = eval_frame(w.model, w.quad);
  w.vm = volmap_from_config(c, w.table);
  return w;
}

void write_file(const RunConfig& c, const std::string& name,
                const std::string& content) {
  namespace fs = std::filesystem;
  fs::create_directories(c.out_dir);
  const fs::path path = fs::path(c.out_dir) / name;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw invalid_input("cannot write " + path.string());
  out << content;
  if (!out) throw invalid_input("short write on " + path.string());
}

json base_summary(const RunConfig& c) {
  json j;
  j["command"] = c.command;
  j["config"] = json::parse(config_to_json(c));
  j["config_hash"] = hash_hex(config_hash(c));
  return j;
}

void save_snapshot(const RunConfig& c, const std::string& name, int kind,
                   const Workspace& w, const CMat& matrix) {
  namespace fs = std::filesystem;
  fs::create_directories(c.out_dir);
  Snapshot s;
  s.kind = kind;
  s.n_p = w.table.n_p;
  s.p = w.table.p;
  s.k = w.table.k;
  s.hash = config_hash(c);
  s.matrix = matrix;
  write_snapshot((fs::path(c.out_dir) / name).string(), s);
}

CMat initial_product(const RunConfig& c, const Workspace& w) {
  if (c.snapshot.empty()) {
    return CMat::Identity(w.table.n_p, w.table.n_p);
  }
  const Snapshot s = read_snapshot(c.snapshot);
  if (s.kind != 0) {
    throw invalid_input("snapshot " + c.snapshot +
                        " holds a basis, expected a product");
  }
  if (s.n_p != w.table.n_p) {
    throw invalid_input("snapshot dimension " + std::to_string(s.n_p) +
                        " does not match n_p = " +
                        std::to_string(w.table.n_p));
  }
  return s.matrix;
}

}  // namespace

int cmd_iterate(const RunConfig& c, std::ostream& out, std::ostream& err) {
  (void)err;
  const Workspace w = make_workspace(c);
  IterateOptions opt;
  opt.max_steps = c.max_steps;
  opt.tol = c.tol;
  const IterationReport rep = iterate(initial_product(c, w), w.vm, w.table, opt);

  std::ostringstream csv;
  csv << "k,psi,energy,logdet,step_dist,dist_to_final,rho_dev,mu_norm\n";
  for (const auto& s : rep.steps) {
    csv << s.k << "," << fmt(s.psi_value) << "," << fmt(s.energy_value) << ","
        << fmt(s.logdet) << "," << fmt(s.step_dist) << ","
        << fmt(s.dist_to_final) << "," << fmt(s.rho_dev) << ","
        << fmt(s.mu_norm) << "\n";
  }
  write_file(c, "iterate_trace.csv", csv.str());
  save_snapshot(c, "product_final.snap", 0, w, rep.H_final);

  json j = base_summary(c);
  j["n_p"] = w.table.n_p;
  j["node_count"] = w.table.node_count();
  j["converged"] = rep.converged;
  j["termination"] = rep.termination;
  j["tol_used"] = rep.tol_used;
  j["steps"] = static_cast<int>(rep.steps.size());
  j["beta_hat"] = rep.beta_hat;
  j["psi_nonincreasing"] = rep.psi_nonincreasing;
  j["logdet_step_nonpositive"] = rep.logdet_step_nonpositive;
  const auto& fin = rep.steps.back();
  j["final"] = {{"psi", fin.psi_value},
                {"energy", fin.energy_value},
                {"logdet", fin.logdet},
                {"rho_dev", fin.rho_dev},
                {"mu_norm", fin.mu_norm}};
  write_file(c, "iterate_summary.json", j.dump(2) + "\n");

  out << "iterate: model=" << c.model << " p=" << w.table.p
      << " n_p=" << w.table.n_p << " nodes=" << w.table.node_count() << "\n";
  if (rep.converged) {
    out << "converged in " << rep.steps.size() - 1 << " steps (tolerance "
        << fmt(rep.tol_used) << ")\n";
  } else {
    out << "stopped at max-steps (" << c.max_steps
        << ") without reaching tolerance " << fmt(rep.tol_used) << "\n";
  }
  out << "final rho deviation " << fmt(fin.rho_dev) << ", moment norm "
      << fmt(fin.mu_norm) << "\n";
  return rep.converged ? kExitOk : kExitMaxSteps;
}

int cmd_gap(const RunConfig& c, std::ostream& out, std::ostream& err) {
  int pb = c.p, pe = c.p;
  if (c.p_begin > 0 || c.p_end > 0) {
    pb = c.p_begin;
    pe = c.p_end;
    if (pb < 1) throw invalid_input("p must be >= 1");
    if (pe < pb) throw invalid_input("empty p range");
  }

  struct Row {
    int p, n_p;
    double gamma1, gap, p_gap, lambda1;
  };
  std::vector<Row> rows;
  for (int p = pb; p <= pe; ++p) {
    const Workspace w = make_workspace(c, p);
    IterateOptions opt;
    opt.max_steps = c.max_steps;
    opt.tol = c.tol;
    const IterationReport rep =
        iterate(CMat::Identity(w.table.n_p, w.table.n_p), w.vm, w.table, opt);
    if (!rep.converged) {
      err << "error: balancing did not converge at p=" << p << " within "
          << c.max_steps << " steps\n";
      return kExitMaxSteps;
    }
    if (w.table.n_p > kChannelDenseCap) {
      out << "p=" << p << ": n_p^2 = " << w.table.n_p * w.table.n_p
          << " above dense cap (" << kChannelDenseCap * kChannelDenseCap
          << "); using the matrix-free eigensolver\n";
    }
    const ChannelOperator op =
        channel(HermProduct{rep.H_final}, w.vm, w.table);
    const ChannelSpectrum sp = channel_spectrum(op);
    rows.push_back({p, w.table.n_p, sp.gamma1, sp.gap, p * sp.gap,
                    sp.lambda1_est});
    out << "p=" << p << ": gamma1=" << fmt(sp.gamma1)
        << " gap=" << fmt(sp.gap) << " p*gap=" << fmt(p * sp.gap) << "\n";
  }

  std::ostringstream csv;
  csv << "p,gamma1,gap,p_gap,lambda1_est\n";
  for (const auto& r : rows) {
    csv << r.p << "," << fmt(r.gamma1) << "," << fmt(r.gap) << ","
        << fmt(r.p_gap) << "," << fmt(r.lambda1) << "\n";
  }
  write_file(c, "gap_sweep.csv", csv.str());

  json j = base_summary(c);
  j["rows"] = json::array();
  for (const auto& r : rows) {
    j["rows"].push_back({{"p", r.p},
                         {"n_p", r.n_p},
                         {"gamma1", r.gamma1},
                         {"gap", r.gap},
                         {"p_gap", r.p_gap},
                         {"lambda1_est", r.lambda1}});
  }
  if (rows.size() >= 2) {
    // Least squares p*gap ~ a + b/p.
    double s11 = 0, s1x = 0, sxx = 0, s1y = 0, sxy = 0;
    for (const auto& r : rows) {
      const double x = 1.0 / r.p, y = r.p_gap;
      s11 += 1;
      s1x += x;
      sxx += x * x;
      s1y += y;
      sxy += x * y;
    }
    const double det = s11 * sxx - s1x * s1x;
    const double a = (sxx * s1y - s1x * sxy) / det;
    const double b = (s11 * sxy - s1x * s1y) / det;
    j["fit"] = {{"intercept", a},
                {"slope_inv_p", b},
                {"lambda1_from_intercept", 4.0 * 3.14159265358979323846 * a}};
    out << "fit p*(1-gamma1) ~ a + b/p: a=" << fmt(a) << " b=" << fmt(b)
        << "\n";
  } else {
    out << "warning: single p value; skipping the asymptotic fit\n";
    j["fit"] = nullptr;
  }
  write_file(c, "gap_summary.json", j.dump(2) + "\n");
  return kExitOk;
}

int cmd_flow(const RunConfig& c, std::ostream& out, std::ostream& err) {
  (void)err;
  const Workspace w = make_workspace(c);
  CMat G0 = CMat::Identity(w.table.n_p, w.table.n_p);
  if (!c.snapshot.empty()) {
    const Snapshot s = read_snapshot(c.snapshot);
    if (s.n_p != w.table.n_p) {
      throw invalid_input("snapshot dimension does not match n_p");
    }
    if (s.kind == 1) {
      G0 = s.matrix;
    } else {
      // A product snapshot seeds the flow with its working basis.
      G0 = HermProduct{s.matrix}
               .chol_lower()
               .triangularView<Eigen::Lower>()
               .solve(CMat::Identity(w.table.n_p, w.table.n_p));
    }
  }
  if (c.perturb != 0.0) {
    std::mt19937_64 rng(c.seed);
    const CMat A = random_traceless_hermitian(rng, w.table.n_p);
    G0 = herm_exp(A, c.perturb / A.norm()) * G0;
  }

  FlowOptions opt;
  opt.t_end = c.t_end;
  opt.dt = c.dt;
  const FlowReport rep = gradient_flow(BasisState{G0}, w.vm, w.table, opt);

  std::ostringstream csv;
  csv << "t,mu_norm,psi,logdet_g,dt\n";
  for (const auto& r : rep.records) {
    csv << fmt(r.t) << "," << fmt(r.mu_norm) << "," << fmt(r.psi_value) << ","
        << fmt(r.logdet_g) << "," << fmt(r.dt_used) << "\n";
  }
  write_file(c, "flow_trace.csv", csv.str());
  save_snapshot(c, "basis_final.snap", 1, w, rep.G_final);

  json j = base_summary(c);
  j["t_final"] = rep.t_final;
  j["accepted_steps"] = static_cast<int>(rep.records.size()) - 1;
  j["rejected_steps"] = rep.rejected_steps;
  j["mu_norm_initial"] = rep.records.front().mu_norm;
  j["mu_norm_final"] = rep.records.back().mu_norm;
  write_file(c, "flow_summary.json", j.dump(2) + "\n");

  out << "flow: reached t=" << fmt(rep.t_final) << " in "
      << rep.records.size() - 1 << " accepted steps ("
      << rep.rejected_steps << " rejected)\n";
  out << "moment norm " << fmt(rep.records.front().mu_norm) << " -> "
      << fmt(rep.records.back().mu_norm) << "\n";
  return kExitOk;
}

int cmd_linearize(const RunConfig& c, std::ostream& out, std::ostream& err) {
  (void)err;
  const Workspace w = make_workspace(c);
  if (c.snapshot.empty()) {
    throw invalid_input(
        "fixed point required: supply --snapshot with a converged product");
  }
  const Snapshot s = read_snapshot(c.snapshot);
  if (s.kind != 0) {
    throw invalid_input("fixed point required: snapshot holds a basis, "
                        "expected a converged product");
  }
  if (s.n_p != w.table.n_p) {
    throw invalid_input("snapshot dimension does not match n_p");
  }
  const HermProduct Hstar{s.matrix};
  const LinearizedMap lin = linearized_map(Hstar, w.vm, w.table,
                                           c.n_directions, c.seed);

  std::ostringstream csv;
  csv << "index,channel_eigenvalue,dt_eigenvalue\n";
  for (int i = 0; i < lin.spectrum.eigenvalues.size(); ++i) {
    csv << i << "," << fmt(lin.spectrum.eigenvalues(i)) << ","
        << fmt(lin.dt_eigenvalues(i)) << "\n";
  }
  write_file(c, "linearize_spectrum.csv", csv.str());

  json j = base_summary(c);
  j["prefactor"] = lin.prefactor;
  j["gamma0"] = lin.spectrum.gamma0;
  j["gamma1"] = lin.spectrum.gamma1;
  j["gap"] = lin.spectrum.gap;
  j["lambda1_est"] = lin.spectrum.lambda1_est;
  j["id_overlap"] = lin.spectrum.id_overlap;
  j["top_traceless"] = lin.top_traceless;
  j["n_directions"] = c.n_directions;
  j["fd_rel_gaps"] = lin.fd_rel_gaps;
  j["max_fd_rel_gap"] = lin.max_fd_rel_gap;
  write_file(c, "linearize_summary.json", j.dump(2) + "\n");

  out << "linearize: top traceless eigenvalue " << fmt(lin.top_traceless)
      << " (channel gamma1 " << fmt(lin.spectrum.gamma1) << ", prefactor "
      << fmt(lin.prefactor) << ")\n";
  out << "max finite-difference relative gap " << fmt(lin.max_fd_rel_gap)
      << " over " << c.n_directions << " directions\n";
  return kExitOk;
}

int cmd_rawnsley(const RunConfig& c, std::ostream& out, std::ostream& err) {
  (void)err;
  const Workspace w = make_workspace(c);
  const HermProduct H{initial_product(c, w)};
  const RawnsleyField rf = rawnsley(H, w.vm, w.table);
  const double target = w.table.n_p / rf.volume;

  std::ostringstream csv;
  for (int a = 0; a < w.table.n; ++a) {
    csv << "x" << a + 1 << ",y" << a + 1 << ",";
  }
  csv << "weight,nu,rho\n";
  for (long i = 0; i < w.table.node_count(); ++i) {
    for (int a = 0; a < 2 * w.table.n; ++a) csv << fmt(w.table.nodes(i, a)) << ",";
    csv << fmt(w.table.weights(i)) << "," << fmt(rf.nu(i)) << ","
        << fmt(rf.rho(i)) << "\n";
  }
  write_file(c, "rawnsley_field.csv", csv.str());

  double max_dev = 0.0;
  for (long i = 0; i < rf.rho.size(); ++i) {
    max_dev = std::max(max_dev, std::abs(rf.rho(i) - target));
  }
  json j = base_summary(c);
  j["volume"] = rf.volume;
  j["n_p"] = w.table.n_p;
  j["target"] = target;
  j["rho_min"] = rf.rho.minCoeff();
  j["rho_max"] = rf.rho.maxCoeff();
  j["max_abs_dev"] = max_dev;
  write_file(c, "rawnsley_summary.json", j.dump(2) + "\n");

  out << "rawnsley: rho in [" << fmt(rf.rho.minCoeff()) << ", "
      << fmt(rf.rho.maxCoeff()) << "], target n_p/Vol = " << fmt(target)
      << "\n";
  out << "max deviation " << fmt(max_dev) << "\n";
  return kExitOk;
}

int run_command(const RunConfig& c, std::ostream& out, std::ostream& err) {
  try {
    if (c.command == "iterate") return cmd_iterate(c, out, err);
    if (c.command == "gap") return cmd_gap(c, out, err);
    if (c.command == "flow") return cmd_flow(c, out, err);
    if (c.command == "linearize") return cmd_linearize(c, out, err);
    if (c.command == "rawnsley") return cmd_rawnsley(c, out, err);
    throw invalid_input("unknown command: " + c.command);
  } catch (const invalid_input& e) {
    err << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const numerical_error& e) {
    err << "numerical error: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "unexpected error: " << e.what() << "\n";
    return kExitNumerical;
  }
}

}  // namespace balmet
