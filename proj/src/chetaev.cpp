#include "kcm/chetaev.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "kcm/chain.hpp"

namespace kcm {

ChetaevParams make_chetaev_params(const ChainTopology& topology,
                                  const Eigen::VectorXd& theta_star, double alpha_c) {
  if (!(alpha_c > 0.0 && alpha_c < std::numbers::pi / 2.0))
    throw std::invalid_argument("chetaev: alpha_c must lie in (0, pi/2)");
  topology.check_conformation(theta_star);
  ChetaevParams params;
  params.theta_star = theta_star;
  params.alpha_c = alpha_c;
  params.r_star = kinematic_state(topology, theta_star).end_to_end;
  if (params.r_star.norm() == 0.0)
    throw std::invalid_argument("chetaev: reference end-to-end vector vanishes");
  const double c2 = std::cos(alpha_c) * std::cos(alpha_c);
  params.cone_matrix = params.r_star.squaredNorm() * c2 * Eigen::Matrix3d::Identity() -
                       params.r_star * params.r_star.transpose();
  return params;
}

double chetaev_core(const Eigen::Vector3d& delta_r, const Eigen::Vector3d& r_star,
                    double alpha_c) {
  if (r_star.norm() == 0.0)
    throw std::invalid_argument("chetaev: reference end-to-end vector vanishes");
  const double c = std::cos(alpha_c);
  const double proj = delta_r.dot(r_star);
  return delta_r.squaredNorm() * r_star.squaredNorm() * c * c - proj * proj;
}

double chetaev_value(const ChetaevParams& params, const ChainTopology& topology,
                     const Eigen::VectorXd& theta) {
  const Eigen::Vector3d delta =
      kinematic_state(topology, theta).end_to_end - params.r_star;
  return chetaev_core(delta, params.r_star, params.alpha_c);
}

double cone_angle_core(const Eigen::Vector3d& delta_r, const Eigen::Vector3d& r_star) {
  const double dn = delta_r.norm();
  if (dn == 0.0)
    throw std::domain_error("cone_angle: end-to-end displacement vanishes, angle undefined");
  const double cosine = std::clamp(delta_r.dot(r_star) / (dn * r_star.norm()), -1.0, 1.0);
  return std::acos(cosine);
}

double cone_angle(const ChetaevParams& params, const ChainTopology& topology,
                  const Eigen::VectorXd& theta) {
  return cone_angle_core(kinematic_state(topology, theta).end_to_end - params.r_star,
                         params.r_star);
}

bool in_positive_set(const ChetaevParams& params, const ChainTopology& topology,
                     const Eigen::VectorXd& theta) {
  return chetaev_value(params, topology, theta) > 0.0;
}

Eigen::VectorXd chetaev_gradient(const ChetaevParams& params, const ChainTopology& topology,
                                 const Eigen::VectorXd& theta) {
  const KinematicState state = kinematic_state(topology, theta);
  const Eigen::Vector3d delta = state.end_to_end - params.r_star;
  const Eigen::MatrixXd jac = end_to_end_jacobian(topology, state);
  return 2.0 * (jac.transpose() * (params.cone_matrix * delta));
}

double instability_rate(const ChetaevParams& params, const VectorField& field,
                        const ChainTopology& topology, const Eigen::VectorXd& theta) {
  return chetaev_gradient(params, topology, theta).dot(field(theta));
}

Eigen::MatrixXd fd_hessian(const ScalarField& f, const Eigen::VectorXd& x0,
                           const Eigen::VectorXd& eps) {
  const int n = static_cast<int>(x0.size());
  if (eps.size() != n) throw std::invalid_argument("fd_hessian: eps size mismatch");
  if ((eps.array() <= 0.0).any())
    throw std::invalid_argument("fd_hessian: eps entries must be positive");

  const double f0 = f(x0);
  Eigen::VectorXd f_i(n);
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd x = x0;
    x[i] += eps[i];
    f_i[i] = f(x);
  }
  Eigen::MatrixXd hess(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      Eigen::VectorXd x = x0;
      x[i] += eps[i];
      x[j] += eps[j];
      const double f_ij = f(x);
      const double value = (f_ij - f_i[i] - f_i[j] + f0) / (eps[i] * eps[j]);
      hess(i, j) = value;
      hess(j, i) = value;
    }
  }
  // The raw cross formula is not exactly symmetric in floating point.
  return 0.5 * (hess + hess.transpose());
}

Eigen::MatrixXd rate_hessian_fd(const ChetaevParams& params, const VectorField& field,
                                const ChainTopology& topology, const Eigen::VectorXd& eps) {
  const ScalarField rate = [&](const Eigen::VectorXd& theta) {
    return instability_rate(params, field, topology, theta);
  };
  return fd_hessian(rate, params.theta_star, eps);
}

Eigen::MatrixXd rate_hessian_analytic(const ChetaevParams& params, const VectorField& field,
                                      const ChainTopology& topology, double field_fd_step) {
  if (field_fd_step <= 0.0)
    throw std::invalid_argument("rate_hessian_analytic: step must be positive");
  const int dof = topology.dihedral_count();

  const Eigen::MatrixXd jac = end_to_end_jacobian(topology, params.theta_star);
  const Eigen::MatrixXd gram = jac.transpose() * params.cone_matrix * jac;  // 2N x 2N

  Eigen::MatrixXd field_jac(dof, dof);  // column k = d field / d theta_k
  for (int k = 0; k < dof; ++k) {
    Eigen::VectorXd plus = params.theta_star;
    Eigen::VectorXd minus = params.theta_star;
    plus[k] += field_fd_step;
    minus[k] -= field_fd_step;
    field_jac.col(k) = (field(plus) - field(minus)) / (2.0 * field_fd_step);
  }

  const Eigen::MatrixXd gk = gram * field_jac;
  return 2.0 * (gk + gk.transpose());
}

std::string InstabilityReport::to_text() const {
  std::ostringstream out;
  out << "instability certification report\n";
  out << "n_samples: " << n_samples << "\n";
  out << "radius: " << radius << "\n";
  out << "seed: " << seed << "\n";
  out << "min_quadratic_form: " << min_quadratic_form << "\n";
  out << "fraction_positive: " << fraction_positive << "\n";
  out << "verdict: " << (condition_holds ? "condition holds on sample" : "condition violated on sample")
      << "\n";
  return out.str();
}

InstabilityReport certify_instability(const ChetaevParams& params, const VectorField& field,
                                      const ChainTopology& topology, int n_samples,
                                      double radius, std::uint64_t seed, double fd_eps) {
  if (n_samples < 1) throw std::invalid_argument("certify_instability: n_samples must be >= 1");
  if (radius <= 0.0) throw std::invalid_argument("certify_instability: radius must be positive");

  const int dof = topology.dihedral_count();
  const Eigen::MatrixXd hess =
      rate_hessian_fd(params, field, topology, Eigen::VectorXd::Constant(dof, fd_eps));

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  InstabilityReport report;
  report.n_samples = n_samples;
  report.radius = radius;
  report.seed = seed;

  int accepted = 0;
  int positive = 0;
  double min_form = std::numeric_limits<double>::infinity();
  long attempts = 0;
  const long max_attempts = 10000L * n_samples;
  while (accepted < n_samples) {
    if (++attempts > max_attempts)
      throw std::runtime_error("certify_instability: positive-set sampling did not accept "
                               "enough directions");
    Eigen::VectorXd dir(dof);
    for (int i = 0; i < dof; ++i) dir[i] = gauss(rng);
    const double norm = dir.norm();
    if (norm == 0.0) continue;
    const Eigen::VectorXd delta = (radius / norm) * dir;
    if (!in_positive_set(params, topology, params.theta_star + delta)) continue;
    ++accepted;
    const double form = delta.dot(hess * delta);
    min_form = std::min(min_form, form);
    if (form > 0.0) ++positive;
  }
  report.min_quadratic_form = min_form;
  report.fraction_positive = static_cast<double>(positive) / n_samples;
  report.condition_holds = (positive == n_samples);
  return report;
}

}  // namespace kcm
