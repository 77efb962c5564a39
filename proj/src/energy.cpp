#include "kcm/energy.hpp"

#include <cmath>

namespace kcm {

namespace {
constexpr double kContactFloor = 0.1;  // Angstrom
}

NonbondedEvaluation evaluate_nonbonded(const ChainTopology& topology,
                                       const KinematicState& state) {
  NonbondedEvaluation out;
  out.atom_forces.assign(topology.atoms().size(), Eigen::Vector3d::Zero());

  double elec = 0.0;
  double vdw = 0.0;
  for (const NonbondedPair& pair : topology.nonbonded_pairs()) {
    const Eigen::Vector3d d = state.atom_positions[pair.a] - state.atom_positions[pair.b];
    const double r = d.norm();
    if (r < kContactFloor)
      throw NearContactError("atoms " + topology.atoms()[pair.a].name + " and " +
                             topology.atoms()[pair.b].name + " are " + std::to_string(r) +
                             " Angstrom apart");
    const double inv_r = 1.0 / r;
    elec += pair.elec_coeff * inv_r * inv_r;
    const double t2 = (pair.rmin * inv_r) * (pair.rmin * inv_r);
    const double t6 = t2 * t2 * t2;
    vdw += pair.eps * (t6 * t6 - 2.0 * t6);

    // dV/dr; force on atom a is -dV/dr along the pair direction.
    const double dv_dr = -2.0 * pair.elec_coeff * inv_r * inv_r * inv_r -
                         12.0 * pair.eps * inv_r * (t6 * t6 - t6);
    const Eigen::Vector3d f = (-dv_dr * inv_r) * d;
    out.atom_forces[pair.a] += f;
    out.atom_forces[pair.b] -= f;
  }
  out.energy.elec = elec;
  out.energy.vdw = vdw;
  out.energy.total = elec + vdw;
  return out;
}

EnergyBreakdown free_energy(const ChainTopology& topology, const KinematicState& state) {
  return evaluate_nonbonded(topology, state).energy;
}

EnergyBreakdown free_energy(const ChainTopology& topology, const Eigen::VectorXd& theta) {
  return free_energy(topology, kinematic_state(topology, theta));
}

GeneralizedForce generalized_forces(const ChainTopology& topology, const KinematicState& state,
                                    const std::vector<Eigen::Vector3d>& atom_forces) {
  GeneralizedForce slots(topology.dihedral_count());
  for (std::size_t i = 0; i < topology.atoms().size(); ++i) {
    const int link = topology.atoms()[i].link;
    if (link == 0) continue;  // chain base is fixed, no joint carries it
    slots[link - 1].force += atom_forces[i];
    slots[link - 1].torque += state.atom_positions[i].cross(atom_forces[i]);
  }
  return slots;
}

GeneralizedForce generalized_forces(const ChainTopology& topology, const KinematicState& state) {
  return generalized_forces(topology, state, evaluate_nonbonded(topology, state).atom_forces);
}

GeneralizedForce generalized_forces(const ChainTopology& topology, const Eigen::VectorXd& theta) {
  return generalized_forces(topology, kinematic_state(topology, theta));
}

std::vector<Wrench> plane_wrenches(const ChainTopology& topology, const KinematicState& state) {
  const NonbondedEvaluation eval = evaluate_nonbonded(topology, state);
  std::vector<Wrench> planes(topology.n_planes());
  for (std::size_t i = 0; i < topology.atoms().size(); ++i) {
    const int p = topology.atoms()[i].plane;
    planes[p].force += eval.atom_forces[i];
    planes[p].torque += state.atom_positions[i].cross(eval.atom_forces[i]);
  }
  return planes;
}

Eigen::VectorXd apply_jacobian_transpose(const ChainJacobian& jacobian,
                                         const GeneralizedForce& slots) {
  const int dof = static_cast<int>(jacobian.blocks.size());
  if (static_cast<int>(slots.size()) != dof)
    throw std::invalid_argument("apply_jacobian_transpose: slot count mismatch");
  Eigen::VectorXd tau(dof);
  Wrench suffix;
  for (int k = dof; k >= 1; --k) {
    suffix.torque += slots[k - 1].torque;
    suffix.force += slots[k - 1].force;
    tau[k - 1] = jacobian.blocks[k - 1].head<3>().dot(suffix.torque) +
                 jacobian.blocks[k - 1].tail<3>().dot(suffix.force);
  }
  return tau;
}

Eigen::VectorXd dihedral_torques(const ChainTopology& topology, const KinematicState& state) {
  return apply_jacobian_transpose(chain_jacobian(topology, state),
                                  generalized_forces(topology, state));
}

Eigen::VectorXd dihedral_torques(const ChainTopology& topology, const Eigen::VectorXd& theta) {
  return dihedral_torques(topology, kinematic_state(topology, theta));
}

}  // namespace kcm
