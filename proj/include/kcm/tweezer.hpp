#pragma once

#include <Eigen/Dense>

#include "kcm/energy.hpp"
#include "kcm/kcm.hpp"
#include "kcm/topology.hpp"

namespace kcm {

/// Optical-trap configuration. The trap stiffness is modulated by the
/// conformation so that it vanishes at the reference conformation:
/// kappa(theta) = kappa0 * |r_NC(theta_star) - r_NC(theta)|^m (lengths in nm).
struct TweezerConfig {
  Eigen::Vector3d displacement_nm = Eigen::Vector3d::Zero();  // bead displacement x_twz
  double kappa0 = 0.16;                                       // pN/nm
  int modulation_exponent = 2;                                // m >= 1
  Eigen::VectorXd theta_star;
  Eigen::Vector3d r_star = Eigen::Vector3d::Zero();  // cached r_NC(theta_star), Angstrom
  // The applied force acts at the chain tip; the torque sum runs over every
  // atom of the last peptide plane as modeled, or only the terminal atom.
  bool torque_over_last_plane = true;
};

TweezerConfig make_tweezer_config(const ChainTopology& topology,
                                  const Eigen::Vector3d& displacement_nm, double kappa0,
                                  int modulation_exponent, const Eigen::VectorXd& theta_star,
                                  bool torque_over_last_plane = true);

/// Modulated trap stiffness at a conformation, pN/nm.
double trap_stiffness(const TweezerConfig& config, const ChainTopology& topology,
                      const Eigen::VectorXd& theta);

/// Hookean trap force kappa(theta) * x_twz, pN.
Eigen::Vector3d tweezer_force(const TweezerConfig& config, const ChainTopology& topology,
                              const Eigen::VectorXd& theta);

/// Force-torque couple on the last peptide plane in internal units
/// (kcal/mol about the origin; kcal/mol/Angstrom).
Wrench tweezer_wrench(const TweezerConfig& config, const ChainTopology& topology,
                      const Eigen::VectorXd& theta);
Wrench tweezer_wrench(const TweezerConfig& config, const ChainTopology& topology,
                      const KinematicState& state);

/// Equivalent joint torques of the trap wrench: the generalized force stack
/// carries the wrench in the last slot only, so every joint feels it.
Eigen::VectorXd unfold_input(const TweezerConfig& config, const ChainTopology& topology,
                             const Eigen::VectorXd& theta);
Eigen::VectorXd unfold_input(const TweezerConfig& config, const ChainTopology& topology,
                             const KinematicState& state);

/// Closed-loop unfolding field theta -> J^T (F + F_twz); the reference
/// conformation is an equilibrium whenever the open-loop torques vanish
/// there.
VectorField unfold_vector_field(const TweezerConfig& config, const ChainTopology& topology);

}  // namespace kcm
