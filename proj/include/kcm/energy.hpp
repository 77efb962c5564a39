#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <vector>

#include "kcm/chain.hpp"
#include "kcm/topology.hpp"

namespace kcm {

/// Aggregated nonbonded free energy, kcal/mol. `total` is always the sum of
/// the two parts in the order they were accumulated.
struct EnergyBreakdown {
  double elec = 0.0;
  double vdw = 0.0;
  double total = 0.0;
};

/// Torque (kcal/mol, about the world origin) and force (kcal/mol/Angstrom)
/// acting on one rigid link.
struct Wrench {
  Eigen::Vector3d torque = Eigen::Vector3d::Zero();
  Eigen::Vector3d force = Eigen::Vector3d::Zero();
};

/// 2N wrench slots; slot k (0-based k-1) carries the net interatomic wrench
/// on the atoms of link k, so that the block-triangular transposed Jacobian
/// maps the stack to dihedral torques.
using GeneralizedForce = std::vector<Wrench>;

/// Two interacting atoms closer than the hard floor (0.1 Angstrom).
class NearContactError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Coulomb with distance-dependent dielectric eps(r) = 4r plus 12-6
/// Lennard-Jones in minimum form eps*[(rmin/r)^12 - 2*(rmin/r)^6], summed
/// over the topology's nonbonded pair list.
EnergyBreakdown free_energy(const ChainTopology& topology, const Eigen::VectorXd& theta);
EnergyBreakdown free_energy(const ChainTopology& topology, const KinematicState& state);

GeneralizedForce generalized_forces(const ChainTopology& topology, const Eigen::VectorXd& theta);
GeneralizedForce generalized_forces(const ChainTopology& topology, const KinematicState& state);
GeneralizedForce generalized_forces(const ChainTopology& topology, const KinematicState& state,
                                    const std::vector<Eigen::Vector3d>& atom_forces);

/// Net interatomic wrench per peptide plane (every atom contributes to its
/// own plane); forces of a closed system sum to zero across planes.
std::vector<Wrench> plane_wrenches(const ChainTopology& topology, const KinematicState& state);

/// Dihedral torque vector: the transposed chain Jacobian applied to the
/// generalized force stack. Equals the negative energy gradient.
Eigen::VectorXd dihedral_torques(const ChainTopology& topology, const Eigen::VectorXd& theta);
Eigen::VectorXd dihedral_torques(const ChainTopology& topology, const KinematicState& state);

/// tau_k = J_k . (sum of wrench slots k..2N); the explicit suffix-sum form
/// of the block-triangular product.
Eigen::VectorXd apply_jacobian_transpose(const ChainJacobian& jacobian,
                                         const GeneralizedForce& slots);

/// One pass over the pair list: energy plus per-atom forces.
struct NonbondedEvaluation {
  EnergyBreakdown energy;
  std::vector<Eigen::Vector3d> atom_forces;  // kcal/mol/Angstrom
};
NonbondedEvaluation evaluate_nonbonded(const ChainTopology& topology,
                                       const KinematicState& state);

}  // namespace kcm
