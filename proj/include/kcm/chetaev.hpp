#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>

#include "kcm/kcm.hpp"
#include "kcm/topology.hpp"

namespace kcm {

/// Parameters of the elongation-cone Chetaev function
///   C(theta) = |dr|^2 |r*|^2 cos^2(alpha) - (dr . r*)^2,
/// dr = r_NC(theta) - r_NC(theta*). C is positive exactly when dr points
/// outside the double cone of half-angle alpha around the reference
/// end-to-end axis. `cone_matrix` is |r*|^2 cos^2(alpha) I - r* r*^T, the
/// symmetric matrix with C = dr^T cone_matrix dr.
struct ChetaevParams {
  Eigen::VectorXd theta_star;
  double alpha_c = 0.0;  // (0, pi/2)
  Eigen::Vector3d r_star = Eigen::Vector3d::Zero();
  Eigen::Matrix3d cone_matrix = Eigen::Matrix3d::Zero();
};

ChetaevParams make_chetaev_params(const ChainTopology& topology,
                                  const Eigen::VectorXd& theta_star, double alpha_c);

/// Core quadratic form on raw 3-vectors. Throws if r_star vanishes.
double chetaev_core(const Eigen::Vector3d& delta_r, const Eigen::Vector3d& r_star,
                    double alpha_c);

double chetaev_value(const ChetaevParams& params, const ChainTopology& topology,
                     const Eigen::VectorXd& theta);

/// Angle in [0, pi] between a displacement and the reference axis; throws on
/// a vanishing displacement.
double cone_angle_core(const Eigen::Vector3d& delta_r, const Eigen::Vector3d& r_star);

/// Angle in [0, pi] between r_NC(theta) - r_NC(theta*) and r_NC(theta*).
/// Undefined (throws) when the end-to-end vector equals the reference.
double cone_angle(const ChetaevParams& params, const ChainTopology& topology,
                  const Eigen::VectorXd& theta);

/// Strict positive set membership; the reference conformation itself is
/// excluded (C(theta*) = 0).
bool in_positive_set(const ChetaevParams& params, const ChainTopology& topology,
                     const Eigen::VectorXd& theta);

/// Gradient 2 dr^T M dr_NC/dtheta via the end-to-end Jacobian.
Eigen::VectorXd chetaev_gradient(const ChetaevParams& params, const ChainTopology& topology,
                                 const Eigen::VectorXd& theta);

/// Flow derivative of the Chetaev function along a vector field.
double instability_rate(const ChetaevParams& params, const VectorField& field,
                        const ChainTopology& topology, const Eigen::VectorXd& theta);

/// Forward-difference cross-term Hessian of an arbitrary scalar function,
/// H_ij = [f(x+e_i+e_j) - f(x+e_i) - f(x+e_j) + f(x)] / (eps_i eps_j),
/// symmetrized as (H + H^T)/2.
Eigen::MatrixXd fd_hessian(const ScalarField& f, const Eigen::VectorXd& x0,
                           const Eigen::VectorXd& eps);

/// Hessian of the instability rate at theta_star by finite differences.
Eigen::MatrixXd rate_hessian_fd(const ChetaevParams& params, const VectorField& field,
                                const ChainTopology& topology, const Eigen::VectorXd& eps);

/// Hessian of the instability rate at theta_star from its closed form at an
/// equilibrium: H = 2 (G K + (G K)^T) with G the cone-metric Gram matrix of
/// the end-to-end Jacobian columns and K the field Jacobian (central
/// differences of the field components).
Eigen::MatrixXd rate_hessian_analytic(const ChetaevParams& params, const VectorField& field,
                                      const ChainTopology& topology,
                                      double field_fd_step = 1e-5);

struct InstabilityReport {
  int n_samples = 0;
  double radius = 0.0;
  double min_quadratic_form = 0.0;
  double fraction_positive = 0.0;
  bool condition_holds = false;
  std::uint64_t seed = 0;
  std::string to_text() const;
};

/// Samples positive-set directions at the given radius around theta_star and
/// evaluates the rate-Hessian quadratic form on each; the certificate holds
/// on the sample when every form is positive.
InstabilityReport certify_instability(const ChetaevParams& params, const VectorField& field,
                                      const ChainTopology& topology, int n_samples,
                                      double radius = 0.05, std::uint64_t seed = 20240901,
                                      double fd_eps = 1e-4);

}  // namespace kcm
