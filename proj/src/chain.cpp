#include "kcm/chain.hpp"

#include <cmath>

namespace kcm {

Eigen::Matrix3d rotation_about_axis(const Eigen::Vector3d& axis, double angle) {
  if (std::abs(axis.norm() - 1.0) > 1e-9)
    throw std::invalid_argument("rotation_about_axis: axis must be a unit vector");
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  Eigen::Matrix3d cross;
  cross << 0.0, -axis.z(), axis.y(), axis.z(), 0.0, -axis.x(), -axis.y(), axis.x(), 0.0;
  return c * Eigen::Matrix3d::Identity() + s * cross + (1.0 - c) * (axis * axis.transpose());
}

Eigen::Matrix3d compose_transform(const ChainTopology& topology, const Eigen::VectorXd& theta,
                                  int j) {
  topology.check_conformation(theta);
  if (j < 1 || j > topology.dihedral_count())
    throw std::invalid_argument("compose_transform: joint index out of range");
  Eigen::Matrix3d xi = Eigen::Matrix3d::Identity();
  for (int r = 1; r <= j; ++r)
    xi = xi * rotation_about_axis(topology.zero_unit_axes()[r - 1], theta[r - 1]);
  return xi;
}

KinematicState kinematic_state(const ChainTopology& topology, const Eigen::VectorXd& theta) {
  topology.check_conformation(theta);
  const int dof = topology.dihedral_count();

  KinematicState state;
  state.transforms.resize(dof);
  state.unit_axes.resize(dof);
  state.body_vectors.resize(dof);
  state.chain_points.resize(dof + 1);
  state.chain_points[0] = topology.origin();

  Eigen::Matrix3d xi = Eigen::Matrix3d::Identity();
  for (int j = 0; j < dof; ++j) {
    xi = xi * rotation_about_axis(topology.zero_unit_axes()[j], theta[j]);
    state.transforms[j] = xi;
    state.unit_axes[j] = xi * topology.zero_unit_axes()[j];
    state.body_vectors[j] = xi * topology.zero_body_vectors()[j];
    state.chain_points[j + 1] = state.chain_points[j] + state.body_vectors[j];
  }
  state.end_to_end = state.chain_points[dof] - state.chain_points[0];

  state.atom_positions.resize(topology.atoms().size());
  for (std::size_t i = 0; i < topology.atoms().size(); ++i) {
    const AtomSpec& a = topology.atoms()[i];
    if (a.link == 0) {
      state.atom_positions[i] = state.chain_points[0] + a.link_offset;
    } else {
      state.atom_positions[i] =
          state.chain_points[a.link] + state.transforms[a.link - 1] * a.link_offset;
    }
  }
  return state;
}

Eigen::MatrixXd end_to_end_jacobian(const ChainTopology& topology, const KinematicState& state) {
  const int dof = topology.dihedral_count();
  const Eigen::Vector3d& tip = state.chain_points[dof];
  Eigen::MatrixXd jac(3, dof);
  for (int k = 1; k <= dof; ++k)
    jac.col(k - 1) = state.unit_axes[k - 1].cross(tip - state.joint_base(k));
  return jac;
}

Eigen::MatrixXd end_to_end_jacobian(const ChainTopology& topology, const Eigen::VectorXd& theta) {
  return end_to_end_jacobian(topology, kinematic_state(topology, theta));
}

ChainJacobian chain_jacobian(const ChainTopology& topology, const KinematicState& state) {
  const int dof = topology.dihedral_count();
  ChainJacobian jac;
  jac.blocks.resize(dof);
  for (int k = 1; k <= dof; ++k) {
    jac.blocks[k - 1].head<3>() = state.unit_axes[k - 1];
    jac.blocks[k - 1].tail<3>() = -state.unit_axes[k - 1].cross(state.joint_base(k));
  }
  return jac;
}

ChainJacobian chain_jacobian(const ChainTopology& topology, const Eigen::VectorXd& theta) {
  return chain_jacobian(topology, kinematic_state(topology, theta));
}

Eigen::MatrixXd ChainJacobian::dense() const {
  const int dof = static_cast<int>(blocks.size());
  Eigen::MatrixXd full = Eigen::MatrixXd::Zero(6 * dof, dof);
  // Row block m collects J_k for every joint k <= m; transposing gives the
  // upper block-triangular torque map.
  for (int m = 1; m <= dof; ++m)
    for (int k = 1; k <= m; ++k) full.block<6, 1>(6 * (m - 1), k - 1) = blocks[k - 1];
  return full;
}

}  // namespace kcm
