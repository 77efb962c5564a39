#include "kcm/kcm.hpp"

#include <cmath>

namespace kcm {

void FoldSettings::validate() const {
  if (step <= 0.0) throw std::invalid_argument("fold settings: step must be positive");
  if (max_iters < 1) throw std::invalid_argument("fold settings: max_iters must be >= 1");
  if (torque_tolerance <= 0.0)
    throw std::invalid_argument("fold settings: torque tolerance must be positive");
}

namespace {

Eigen::VectorXd capped_step(const Eigen::VectorXd& theta, const Eigen::VectorXd& tau,
                            double step) {
  const double max_abs = tau.cwiseAbs().maxCoeff();
  const double scale = step / std::max(1.0, max_abs);
  return theta + scale * tau;
}

}  // namespace

Eigen::VectorXd kcm_fold_step(const ChainTopology& topology, const Eigen::VectorXd& theta,
                              const FoldSettings& settings) {
  settings.validate();
  return capped_step(theta, dihedral_torques(topology, theta), settings.step);
}

Trajectory fold_to_convergence(const ChainTopology& topology, const Eigen::VectorXd& theta0,
                               const FoldSettings& settings) {
  settings.validate();
  topology.check_conformation(theta0);

  Trajectory traj;
  Eigen::VectorXd theta = theta0;
  for (int iter = 0;; ++iter) {
    const KinematicState state = kinematic_state(topology, theta);
    const NonbondedEvaluation eval = evaluate_nonbonded(topology, state);
    const Eigen::VectorXd tau = apply_jacobian_transpose(
        chain_jacobian(topology, state), generalized_forces(topology, state, eval.atom_forces));
    const double tau_max = tau.size() > 0 ? tau.cwiseAbs().maxCoeff() : 0.0;

    traj.times.push_back(static_cast<double>(iter));
    traj.conformations.push_back(theta);
    traj.energies.push_back(eval.energy.total);
    traj.torque_norms.push_back(tau_max);

    if (tau_max <= settings.torque_tolerance) {
      traj.converged = true;
      break;
    }
    if (iter >= settings.max_iters) break;
    theta = capped_step(theta, tau, settings.step);
  }
  return traj;
}

Trajectory simulate_ode(const VectorField& field, const ScalarField& energy,
                        const Eigen::VectorXd& theta0, double dt, int steps) {
  if (dt <= 0.0) throw std::invalid_argument("simulate_ode: dt must be positive");
  if (steps < 1) throw std::invalid_argument("simulate_ode: steps must be >= 1");

  Trajectory traj;
  Eigen::VectorXd theta = theta0;
  try {
    traj.times.push_back(0.0);
    traj.conformations.push_back(theta);
    traj.energies.push_back(energy(theta));
    for (int i = 1; i <= steps; ++i) {
      theta = theta + dt * field(theta);
      traj.times.push_back(i * dt);
      traj.conformations.push_back(theta);
      traj.energies.push_back(energy(theta));
    }
  } catch (const std::exception& e) {
    traj.aborted = true;
    traj.abort_reason = e.what();
  }
  return traj;
}

Eigen::VectorXd trivial_unfold_input(const ChainTopology& topology,
                                     const Eigen::VectorXd& theta) {
  return -2.0 * dihedral_torques(topology, theta);
}

VectorField folding_field(const ChainTopology& topology) {
  return [topology](const Eigen::VectorXd& theta) { return dihedral_torques(topology, theta); };
}

}  // namespace kcm
