#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>

#include "kcm/ccf.hpp"
#include "kcm/chetaev.hpp"
#include "kcm/kcm.hpp"
#include "kcm/topology.hpp"
#include "kcm/tweezer.hpp"

namespace kcm {

enum class RunMode { kFold, kUnfoldTweezer, kUnfoldCcf, kCertify, kSphereScan };

RunMode parse_run_mode(const std::string& name);
std::string run_mode_name(RunMode mode);

/// Fully describes one experiment. Every field has a usable default; the
/// run report echoes the resolved values so each run is self-describing.
struct SimConfig {
  RunMode mode = RunMode::kFold;
  std::uint64_t seed = 1;
  std::string out_dir = ".";

  std::string topology_file;  // empty = built-in 10-plane chain

  // "builtin", "file <path>", or an inline list of 2N angles.
  std::string theta_star_source = "builtin";
  // "auto" (mode-dependent), "builtin", "star", "star+stretch",
  // "file <path>", or inline angles.
  std::string theta0_source = "auto";
  double stretch_eps = 1e-3;

  // Euler integration horizon for the unfolding modes. These defaults are
  // implementation choices, echoed as such in the run report.
  double dt = 1e-3;
  int steps = 5000;

  FoldSettings fold;

  double x0_nm = 51.0;  // trap displacement magnitude
  Eigen::Vector3d tweezer_direction = Eigen::Vector3d::Zero();  // zero = along r_NC(theta_star)
  double kappa0 = 0.16;
  int modulation_exponent = 2;
  bool torque_over_last_plane = true;

  double p = 2.0;
  double q = 2.0;
  std::string ccf = "cone";    // cone | g-identity | g-square
  std::string clamp = "auto";  // auto | none | <value>

  double alpha_c = 0.78539816339744828;  // pi/4
  double fd_eps = 1e-4;
  double sample_radius = 0.05;
  int certify_samples = 200;

  int sphere_points = 2000;
  double sphere_radius = 0.1;

  int output_stride = 0;  // 0 = auto: thin long runs to at most 10000 frames
  std::string energy_csv = "energy.csv";
  std::string xyz_path = "trajectory.xyz";
  std::string report_path = "report.txt";
};

/// Key/value config file with [section] headers; unknown keys are rejected.
SimConfig load_config_file(const std::string& path);

/// Executes the configured experiment and writes its artifacts under
/// out_dir. Validation and I/O problems throw; numerical aborts inside a
/// run are flagged in the report instead.
void run_experiment(const SimConfig& config);

/// Multi-frame XYZ export: per frame an atom-count line, a comment line with
/// the step index and total energy, then one "element x y z" line per atom.
void export_xyz(const Trajectory& trajectory, const ChainTopology& topology,
                const std::string& path, int stride = 1);

/// Per-step energy profile: step,time,G_elec,G_vdw,G_total,r_nc,c_twz.
void write_energy_csv(const Trajectory& trajectory, const ChainTopology& topology,
                      const ChetaevParams& params, const std::string& path, int stride = 1);

/// Chetaev-function samples over dihedral perturbations
/// [d1, d2, d3, 0, ..., 0] with the triplet on a sphere (golden-angle
/// lattice); CSV columns dtheta1,dtheta2,dtheta3,c_twz.
void sphere_scan_csv(const ChainTopology& topology, const ChetaevParams& params, double radius,
                     int points, const std::string& path);

/// Unit dihedral direction that maximally extends the end-to-end length.
Eigen::VectorXd stretch_direction(const ChainTopology& topology,
                                  const Eigen::VectorXd& theta_star);

/// Shortest decimal text that round-trips the double (17 significant digits).
std::string format17(double value);

}  // namespace kcm
