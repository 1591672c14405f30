// Command line front end: balanced products, spectral gaps, moment flows.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "balmet/cli/commands.hpp"

namespace {

// Parses "A:B" into an inclusive integer range.
void parse_p_range(const std::string& s, balmet::RunConfig& c) {
  const auto colon = s.find(':');
  try {
    if (colon == std::string::npos) {
      c.p_begin = c.p_end = std::stoi(s);
    } else {
      c.p_begin = std::stoi(s.substr(0, colon));
      c.p_end = std::stoi(s.substr(colon + 1));
    }
  } catch (const std::exception&) {
    throw CLI::ValidationError("--p-range", "expected an integer range A:B");
  }
}

}  // namespace

int main(int argc, char** argv) {
  balmet::RunConfig cfg;
  std::string p_range;

  CLI::App app{"balanced metrics on model polarized manifolds"};
  app.require_subcommand(1);
  app.set_config("--config", "", "read options from a config file");
  app.fallthrough();

  app.add_option("--model,-m", cfg.model, "p1, p2 or custom:PATH");
  app.add_option("--k", cfg.k, "polarization degree (0: model default)");
  app.add_option("--p", cfg.p, "tensor power");
  app.add_option("--p-range", p_range, "inclusive sweep range A:B");
  app.add_option("--volmap", cfg.volmap,
                 "anticanonical | canonical[:FILE] | constant[:FILE] | "
                 "liouville");
  app.add_option("--order", cfg.order, "quadrature order (0: model default)");
  app.add_option("--tol", cfg.tol, "fixed point tolerance (0: derived)");
  app.add_option("--max-steps", cfg.max_steps, "iteration cap");
  app.add_option("--dt", cfg.dt, "initial flow step");
  app.add_option("--t-end", cfg.t_end, "flow horizon");
  app.add_option("--perturb", cfg.perturb, "seeded perturbation amplitude");
  app.add_option("--n-directions", cfg.n_directions,
                 "finite-difference probe directions");
  app.add_option("--seed", cfg.seed, "random seed");
  app.add_option("--snapshot", cfg.snapshot, "input snapshot path");
  app.add_option("--out,-o", cfg.out_dir, "output directory");

  app.add_subcommand("iterate", "run the balancing iteration");
  app.add_subcommand("gap", "spectral gap of the quantum channel");
  app.add_subcommand("flow", "moment map gradient flow");
  app.add_subcommand("linearize", "linearized balancing map at a fixed point");
  app.add_subcommand("rawnsley", "Rawnsley density field");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return balmet::kExitInvalid;
  }

  cfg.command = app.get_subcommands().front()->get_name();
  if (!p_range.empty()) {
    try {
      parse_p_range(p_range, cfg);
    } catch (const CLI::Error&) {
      std::cerr << "error: --p-range expects an integer range A:B\n";
      return balmet::kExitInvalid;
    }
  }
  return balmet::run_command(cfg, std::cout, std::cerr);
}
