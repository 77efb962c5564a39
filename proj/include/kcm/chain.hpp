#pragma once

#include <Eigen/Dense>
#include <vector>

#include "kcm/topology.hpp"

namespace kcm {

using Vector6d = Eigen::Matrix<double, 6, 1>;

/// Rodrigues rotation by `angle` about a unit 3-vector (right-hand rule).
/// Throws std::invalid_argument if |axis| deviates from 1 by more than 1e-9.
Eigen::Matrix3d rotation_about_axis(const Eigen::Vector3d& axis, double angle);

/// Cumulative chain transform for joint j (1-based):
/// R(theta_1,u_1^0) * R(theta_2,u_2^0) * ... * R(theta_j,u_j^0).
Eigen::Matrix3d compose_transform(const ChainTopology& topology,
                                  const Eigen::VectorXd& theta, int j);

/// Kinematic snapshot of the chain at a conformation. All vectors Angstrom.
struct KinematicState {
  std::vector<Eigen::Matrix3d> transforms;    // cumulative transform per joint
  std::vector<Eigen::Vector3d> unit_axes;     // rotated joint axes u_j
  std::vector<Eigen::Vector3d> body_vectors;  // rotated body vectors b_j
  // chain_points[j] = origin + sum of the first j body vectors, j = 0..2N.
  std::vector<Eigen::Vector3d> chain_points;
  std::vector<Eigen::Vector3d> atom_positions;  // one per topology atom
  Eigen::Vector3d end_to_end;  // chain tip minus chain base (r_NC)

  const Eigen::Vector3d& joint_base(int k) const { return chain_points[k - 1]; }
};

KinematicState kinematic_state(const ChainTopology& topology,
                               const Eigen::VectorXd& theta);

/// 3 x 2N matrix of partial derivatives of the end-to-end vector; column j is
/// u_j x (tip - base_j), the revolute-joint derivative of the chain tip.
Eigen::MatrixXd end_to_end_jacobian(const ChainTopology& topology,
                                    const KinematicState& state);
Eigen::MatrixXd end_to_end_jacobian(const ChainTopology& topology,
                                    const Eigen::VectorXd& theta);

/// Block-triangular chain Jacobian. Block k is J_k = [u_k; -u_k x r_k] with
/// r_k the base point of joint k (the N atom for odd k, the C-alpha atom for
/// even k, 1-based). Row block m of the assembled 12N x 2N matrix holds J_k
/// in column k for every k <= m and zeros elsewhere.
struct ChainJacobian {
  std::vector<Vector6d> blocks;  // index k-1 holds J_k
  Eigen::MatrixXd dense() const;
};

ChainJacobian chain_jacobian(const ChainTopology& topology,
                             const KinematicState& state);
ChainJacobian chain_jacobian(const ChainTopology& topology,
                             const Eigen::VectorXd& theta);

}  // namespace kcm
