#pragma once

#include <Eigen/Dense>
#include <functional>
#include <random>

#include "kcm/topology.hpp"

namespace kcm::test {

inline Eigen::VectorXd fd_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                                   const Eigen::VectorXd& x, double h) {
  Eigen::VectorXd grad(x.size());
  for (int i = 0; i < x.size(); ++i) {
    Eigen::VectorXd plus = x, minus = x;
    plus[i] += h;
    minus[i] -= h;
    grad[i] = (f(plus) - f(minus)) / (2.0 * h);
  }
  return grad;
}

inline Eigen::MatrixXd fd_jacobian(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f,
                                   const Eigen::VectorXd& x, double h) {
  const Eigen::VectorXd f0 = f(x);
  Eigen::MatrixXd jac(f0.size(), x.size());
  for (int i = 0; i < x.size(); ++i) {
    Eigen::VectorXd plus = x, minus = x;
    plus[i] += h;
    minus[i] -= h;
    jac.col(i) = (f(plus) - f(minus)) / (2.0 * h);
  }
  return jac;
}

inline double rel_error(const Eigen::MatrixXd& got, const Eigen::MatrixXd& want) {
  const double scale = want.norm();
  if (scale == 0.0) return got.norm();
  return (got - want).norm() / scale;
}

inline Eigen::VectorXd random_conformation(std::mt19937_64& rng, int dof, double amplitude) {
  std::uniform_real_distribution<double> uniform(-amplitude, amplitude);
  Eigen::VectorXd theta(dof);
  for (int i = 0; i < dof; ++i) theta[i] = uniform(rng);
  return theta;
}

/// 1-plane chain with all joints about +z and a single bar of length L along
/// +x; joints 2..4 sit at the chain tip (zero body vectors). Two atoms: one
/// fixed at the base, one riding the tip.
inline ChainTopology bar_topology(double length = 1.5) {
  const Eigen::Vector3d z(0, 0, 1);
  std::vector<Eigen::Vector3d> axes(4, z);
  std::vector<Eigen::Vector3d> body(4, Eigen::Vector3d::Zero());
  body[0] = Eigen::Vector3d(length, 0, 0);
  std::vector<AtomSpec> atoms(2);
  atoms[0].name = "BASE";
  atoms[0].element = "N";
  atoms[0].plane = 0;
  atoms[0].link = 0;
  atoms[1].name = "TIP";
  atoms[1].element = "C";
  atoms[1].plane = 0;
  atoms[1].link = 4;
  return ChainTopology(1, Eigen::Vector3d::Zero(), axes, body, atoms);
}

/// 3-plane chain (8 dihedrals) with skewed axes and two charged atoms on
/// planes 1 and 3, the only interacting pair.
inline ChainTopology two_charge_topology(double q1 = 0.8, double q2 = -0.5, double eps = 0.0,
                                         double rmin = 0.0) {
  const int dof = 8;
  std::vector<Eigen::Vector3d> axes(dof);
  std::vector<Eigen::Vector3d> body(dof);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> uniform(-1.0, 1.0);
  for (int j = 0; j < dof; ++j) {
    Eigen::Vector3d a(uniform(rng), uniform(rng), uniform(rng));
    axes[j] = a.normalized();
    body[j] = Eigen::Vector3d(1.2 + 0.1 * j, 0.3 * uniform(rng), 0.3 * uniform(rng));
  }
  std::vector<AtomSpec> atoms(2);
  atoms[0].name = "Q1";
  atoms[0].element = "C";
  atoms[0].plane = 0;
  atoms[0].link = 2;
  atoms[0].link_offset = Eigen::Vector3d(0.2, 0.1, -0.3);
  atoms[0].charge = q1;
  atoms[0].lj_epsilon = eps;
  atoms[0].lj_rmin = rmin;
  atoms[1].name = "Q2";
  atoms[1].element = "O";
  atoms[1].plane = 2;
  atoms[1].link = 6;
  atoms[1].link_offset = Eigen::Vector3d(-0.1, 0.4, 0.2);
  atoms[1].charge = q2;
  atoms[1].lj_epsilon = eps;
  atoms[1].lj_rmin = rmin;
  return ChainTopology(3, Eigen::Vector3d::Zero(), axes, body, atoms);
}

/// Default chain with every charge and LJ depth zeroed.
inline ChainTopology zero_interaction_topology() {
  const ChainTopology base = default_topology();
  std::vector<AtomSpec> atoms = base.atoms();
  for (AtomSpec& a : atoms) {
    a.charge = 0.0;
    a.lj_epsilon = 0.0;
  }
  return ChainTopology(base.n_planes(), base.origin(), base.zero_unit_axes(),
                       base.zero_body_vectors(), atoms);
}

}  // namespace kcm::test
