#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "kcm/energy.hpp"
#include "kcm/topology.hpp"

namespace kcm {

/// Settings for the kinetostatic folding iteration. `step` is the torque
/// gain and also caps the largest dihedral rotation per iteration (radians);
/// `torque_tolerance` is the max-abs joint torque at which the iteration is
/// declared converged. Defaults are matched to the built-in soft parameter
/// set; full-strength force fields want step ~ 0.02 and tolerance ~ 1.
struct FoldSettings {
  double step = 200.0;
  int max_iters = 500000;
  double torque_tolerance = 1e-12;

  void validate() const;
};

struct Trajectory {
  std::vector<double> times;  // iteration index or integration time
  std::vector<Eigen::VectorXd> conformations;
  std::vector<double> energies;      // total free energy per entry
  std::vector<double> torque_norms;  // max-abs torque, folding runs only
  bool converged = false;
  bool aborted = false;
  std::string abort_reason;

  std::size_t size() const { return conformations.size(); }
};

using VectorField = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
using ScalarField = std::function<double(const Eigen::VectorXd&)>;

/// One folding iteration: theta + step * tau / max(1, max|tau_j|), i.e. the
/// identity map on torques with the largest per-step rotation capped.
Eigen::VectorXd kcm_fold_step(const ChainTopology& topology, const Eigen::VectorXd& theta,
                              const FoldSettings& settings);

/// Iterates kcm_fold_step until every joint torque is within tolerance or
/// the iteration budget runs out; non-convergence is reported in the
/// trajectory status, not as an error.
Trajectory fold_to_convergence(const ChainTopology& topology, const Eigen::VectorXd& theta0,
                               const FoldSettings& settings);

/// Forward-Euler integration of theta' = field(theta), recording the
/// conformation and `energy` at every step. Field or energy evaluation
/// errors terminate the run early; the partial trajectory is returned with
/// the abort flag set.
Trajectory simulate_ode(const VectorField& field, const ScalarField& energy,
                        const Eigen::VectorXd& theta0, double dt, int steps);

/// Input that flips the folding flow: u = -2 * J^T F, so the closed loop is
/// theta' = -J^T F and the folded conformation becomes purely repulsive.
Eigen::VectorXd trivial_unfold_input(const ChainTopology& topology, const Eigen::VectorXd& theta);

/// Open-loop folding field theta -> J^T(theta) F(theta) as a callable.
VectorField folding_field(const ChainTopology& topology);

}  // namespace kcm
