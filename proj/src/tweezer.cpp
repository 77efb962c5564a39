#include "kcm/tweezer.hpp"

#include <cmath>

#include "kcm/units.hpp"

namespace kcm {

TweezerConfig make_tweezer_config(const ChainTopology& topology,
                                  const Eigen::Vector3d& displacement_nm, double kappa0,
                                  int modulation_exponent, const Eigen::VectorXd& theta_star,
                                  bool torque_over_last_plane) {
  if (kappa0 < 0.0) throw std::invalid_argument("tweezer: kappa0 must be non-negative");
  if (modulation_exponent < 1)
    throw std::invalid_argument("tweezer: modulation exponent must be >= 1");
  topology.check_conformation(theta_star);
  TweezerConfig config;
  config.displacement_nm = displacement_nm;
  config.kappa0 = kappa0;
  config.modulation_exponent = modulation_exponent;
  config.theta_star = theta_star;
  config.r_star = kinematic_state(topology, theta_star).end_to_end;
  config.torque_over_last_plane = torque_over_last_plane;
  return config;
}

namespace {

double stiffness_from_state(const TweezerConfig& config, const KinematicState& state) {
  const double gap_nm = (config.r_star - state.end_to_end).norm() * units::kNanometerPerAngstrom;
  return config.kappa0 * std::pow(gap_nm, config.modulation_exponent);
}

}  // namespace

double trap_stiffness(const TweezerConfig& config, const ChainTopology& topology,
                      const Eigen::VectorXd& theta) {
  return stiffness_from_state(config, kinematic_state(topology, theta));
}

Eigen::Vector3d tweezer_force(const TweezerConfig& config, const ChainTopology& topology,
                              const Eigen::VectorXd& theta) {
  return trap_stiffness(config, topology, theta) * config.displacement_nm;
}

Wrench tweezer_wrench(const TweezerConfig& config, const ChainTopology& topology,
                      const KinematicState& state) {
  const Eigen::Vector3d force_pn = stiffness_from_state(config, state) * config.displacement_nm;
  Wrench wrench;
  wrench.force = units::kPicoNewton * force_pn;
  if (config.torque_over_last_plane) {
    for (int atom : topology.plane_atoms(topology.n_planes() - 1))
      wrench.torque += state.atom_positions[atom].cross(wrench.force);
  } else {
    wrench.torque = state.chain_points.back().cross(wrench.force);
  }
  return wrench;
}

Wrench tweezer_wrench(const TweezerConfig& config, const ChainTopology& topology,
                      const Eigen::VectorXd& theta) {
  return tweezer_wrench(config, topology, kinematic_state(topology, theta));
}

Eigen::VectorXd unfold_input(const TweezerConfig& config, const ChainTopology& topology,
                             const KinematicState& state) {
  const Wrench wrench = tweezer_wrench(config, topology, state);
  const ChainJacobian jacobian = chain_jacobian(topology, state);
  const int dof = topology.dihedral_count();
  // Only the last slot is populated, so the suffix sum seen by every joint
  // is the trap wrench itself.
  Eigen::VectorXd u(dof);
  for (int k = 1; k <= dof; ++k)
    u[k - 1] = jacobian.blocks[k - 1].head<3>().dot(wrench.torque) +
               jacobian.blocks[k - 1].tail<3>().dot(wrench.force);
  return u;
}

Eigen::VectorXd unfold_input(const TweezerConfig& config, const ChainTopology& topology,
                             const Eigen::VectorXd& theta) {
  return unfold_input(config, topology, kinematic_state(topology, theta));
}

VectorField unfold_vector_field(const TweezerConfig& config, const ChainTopology& topology) {
  return [config, topology](const Eigen::VectorXd& theta) {
    const KinematicState state = kinematic_state(topology, theta);
    return Eigen::VectorXd(dihedral_torques(topology, state) +
                           unfold_input(config, topology, state));
  };
}

}  // namespace kcm
