// Command-line front end: one subcommand per run mode, a key/value config
// file, and a handful of per-mode overrides.

#include <CLI11.hpp>
#include <iostream>

#include "kcm/harness.hpp"
#include "kcm/topology.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Kinetostatic chain folding and unfolding simulator"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false, out_dir_set = false;

  app.add_option("--config", config_path, "Config file (key = value with [section] headers)");
  app.add_option("--seed", seed, "Random seed")->each([&](const std::string&) { seed_set = true; });
  app.add_option("--out-dir", out_dir, "Output directory")->each([&](const std::string&) {
    out_dir_set = true;
  });

  double dt = 0, alpha_c = 0, kappa0 = 0, x0_nm = 0, p = 0, q = 0;
  int steps = 0;
  bool dt_set = false, steps_set = false, alpha_set = false, kappa_set = false, x0_set = false,
       p_set = false, q_set = false;
  app.add_option("--dt", dt, "Euler step")->each([&](const std::string&) { dt_set = true; });
  app.add_option("--steps", steps, "Euler steps")->each([&](const std::string&) {
    steps_set = true;
  });
  app.add_option("--alpha-c", alpha_c, "Cone half-angle (radians)")
      ->each([&](const std::string&) { alpha_set = true; });
  app.add_option("--kappa0", kappa0, "Trap stiffness scale (pN/nm)")
      ->each([&](const std::string&) { kappa_set = true; });
  app.add_option("--x0-nm", x0_nm, "Trap displacement magnitude (nm)")
      ->each([&](const std::string&) { x0_set = true; });
  app.add_option("--p", p, "Sontag exponent p")->each([&](const std::string&) { p_set = true; });
  app.add_option("--q", q, "Sontag exponent q")->each([&](const std::string&) { q_set = true; });

  auto* fold = app.add_subcommand("fold", "Kinetostatic folding to torque convergence");
  auto* twz = app.add_subcommand("unfold-tweezer", "Unfolding under the modulated optical trap");
  auto* ccf = app.add_subcommand("unfold-ccf", "Unfolding under the Sontag universal input");
  auto* certify = app.add_subcommand("certify", "Instability certificate at the reference");
  auto* sphere = app.add_subcommand("sphere-scan", "Chetaev function on a perturbation sphere");

  std::string dump_path;
  auto* dump = app.add_subcommand("dump-topology", "Write the built-in chain as a topology file");
  dump->add_option("path", dump_path, "Destination file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (dump->parsed()) {
      kcm::write_topology_file(kcm::default_topology(), dump_path);
      return 0;
    }

    kcm::SimConfig config;
    if (!config_path.empty()) config = kcm::load_config_file(config_path);
    if (fold->parsed()) config.mode = kcm::RunMode::kFold;
    if (twz->parsed()) config.mode = kcm::RunMode::kUnfoldTweezer;
    if (ccf->parsed()) config.mode = kcm::RunMode::kUnfoldCcf;
    if (certify->parsed()) config.mode = kcm::RunMode::kCertify;
    if (sphere->parsed()) config.mode = kcm::RunMode::kSphereScan;

    if (seed_set) config.seed = seed;
    if (out_dir_set) config.out_dir = out_dir;
    if (dt_set) config.dt = dt;
    if (steps_set) config.steps = steps;
    if (alpha_set) config.alpha_c = alpha_c;
    if (kappa_set) config.kappa0 = kappa0;
    if (x0_set) config.x0_nm = x0_nm;
    if (p_set) config.p = p;
    if (q_set) config.q = q;

    kcm::run_experiment(config);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
