// egb: command-line driver for the Brinkman EG solvers.
//
//   egb convergence --dim 2 --nu 1e-6 --method both --n 4,8,16,32,64 --out DIR
//   egb profile --dim 2 --h 32 --nus 1,1e-1,1e-2
//   egb permeability --dim 3 --mu 1e-6 --ball 0.5,0.5,0.5,0.25 --out DIR
//   egb single --dim 2 --nu 1e-6 --h 16 --out DIR
//
// Options may also come from --config FILE (key = value lines, keys named as
// the long options). Flags given on the command line take precedence.

#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "egb/app.hpp"

namespace {

std::vector<double> parse_ball(const std::string& s) {
  std::vector<double> v;
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) v.push_back(std::stod(tok));
  if (v.size() != 4) throw std::invalid_argument("--ball expects cx,cy,cz,r");
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  egb::RunConfig cfg;
  std::string ball, boundary = "strong";
  bool no_discrete = false;

  CLI::App app{"Enriched Galerkin solvers (ST-EG and PR-EG) for the Brinkman equations"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.set_version_flag("--version", std::string(egb::version()));
  app.set_config("--config", "", "Read options from a key = value file");
  app.require_subcommand(1, 1);
  app.fallthrough();

  app.add_option("--dim", cfg.dim, "Spatial dimension (2 or 3)")->check(CLI::IsMember({2, 3}));
  app.add_option("--method", cfg.method, "ST, PR or both")->check(CLI::IsMember({"ST", "PR", "both"}));
  app.add_option("--nu", cfg.nu, "Viscosity of the scaled problem");
  app.add_option("--n", cfg.n, "Mesh subdivisions for convergence, doubling")->delimiter(',');
  app.add_option("--h", cfg.mesh_n, "Subdivisions for profile, single and permeability runs");
  app.add_option("--nus", cfg.nus, "Viscosities for the profile sweep")->delimiter(',');
  app.add_option("--mu", cfg.mu, "Viscosity for permeability runs");
  app.add_option("--low-k", cfg.low_k, "Low permeability value");
  app.add_option("--high-k", cfg.high_k, "High permeability value");
  app.add_option("--raster", cfg.raster, "2D permeability raster file")->check(CLI::ExistingFile);
  app.add_option("--ball", ball, "3D low-permeability ball cx,cy,cz,r");
  app.add_option("--rho1", cfg.penalty.rho1, "H1 penalty");
  app.add_option("--rho2", cfg.penalty.rho2, "L2 jump penalty");
  app.add_option("--tol", cfg.tolerance, "Relative residual tolerance");
  app.add_option("--boundary", boundary, "Dirichlet treatment: strong or nitsche")
      ->check(CLI::IsMember({"strong", "nitsche"}));
  app.add_flag("--no-discrete", no_discrete, "Skip the |||Pi_h u - u_h||| columns");
  app.add_option("--out", cfg.out, "Output directory");

  app.add_subcommand("convergence", "Mesh refinement study for a manufactured solution");
  app.add_subcommand("profile", "Error against nu at a fixed mesh");
  app.add_subcommand("single", "One manufactured solve per method with VTK output");
  app.add_subcommand("permeability", "Heterogeneous permeability runs with VTK output");

  CLI11_PARSE(app, argc, argv);

  try {
    cfg.command = app.get_subcommands().front()->get_name();
    if (!ball.empty()) {
      const auto b = parse_ball(ball);
      cfg.ball = egb::Ball{egb::Vec(b[0], b[1], b[2]), b[3]};
    }
    cfg.boundary = boundary == "nitsche" ? egb::BoundaryTreatment::nitsche : egb::BoundaryTreatment::strong;
    cfg.with_discrete = !no_discrete;
    cfg.threads = egb::threads_from_env();
    return egb::run(cfg, std::cout);
  } catch (const std::exception& e) {
    std::cerr << "egb: " << e.what() << '\n';
    return 1;
  }
}
