#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "kcm/energy.hpp"
#include "kcm/harness.hpp"
#include "kcm/kcm.hpp"
#include "kcm/topology.hpp"
#include "test_support.hpp"

using namespace kcm;
using kcm::test::random_conformation;

namespace {

// Folded reference of the built-in chain, computed once per binary.
const Trajectory& folded_fixture() {
  static const Trajectory traj = [] {
    FoldSettings settings;
    Trajectory t = fold_to_convergence(default_topology(), default_initial_conformation(),
                                       settings);
    REQUIRE(t.converged);
    return t;
  }();
  return traj;
}

Eigen::VectorXd rk4_step(const VectorField& field, const Eigen::VectorXd& theta, double dt) {
  const Eigen::VectorXd k1 = field(theta);
  const Eigen::VectorXd k2 = field(theta + 0.5 * dt * k1);
  const Eigen::VectorXd k3 = field(theta + 0.5 * dt * k2);
  const Eigen::VectorXd k4 = field(theta + dt * k3);
  return theta + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

Eigen::VectorXd rk4_integrate(const VectorField& field, Eigen::VectorXd theta, double dt,
                              int steps) {
  for (int i = 0; i < steps; ++i) theta = rk4_step(field, theta, dt);
  return theta;
}

}  // namespace

TEST_CASE("kcm_fold_step") {
  SUBCASE("stationary points are fixed points") {
    const ChainTopology topology = kcm::test::zero_interaction_topology();
    std::mt19937_64 rng(3);
    const Eigen::VectorXd theta = random_conformation(rng, 22, 1.0);
    const Eigen::VectorXd next = kcm_fold_step(topology, theta, FoldSettings{});
    CHECK((next - theta).norm() == 0.0);
  }

  SUBCASE("a sufficiently small step decreases the energy") {
    const ChainTopology topology = default_topology();
    const Eigen::VectorXd theta = default_initial_conformation();
    const double start = free_energy(topology, theta).total;
    FoldSettings settings;
    bool decreased = false;
    for (int halvings = 0; halvings < 40 && !decreased; ++halvings) {
      decreased = free_energy(topology, kcm_fold_step(topology, theta, settings)).total < start;
      settings.step /= 2.0;
    }
    CHECK(decreased);
  }

  SUBCASE("matches hand-assembled arithmetic on a small chain") {
    const ChainTopology topology = kcm::test::two_charge_topology(0.8, -0.5, 0.0, 0.0);
    std::mt19937_64 rng(5);
    const Eigen::VectorXd theta = random_conformation(rng, 8, 0.5);
    FoldSettings settings;
    settings.step = 0.25;
    const Eigen::VectorXd tau = dihedral_torques(topology, theta);
    const Eigen::VectorXd want =
        theta + (settings.step / std::max(1.0, tau.cwiseAbs().maxCoeff())) * tau;
    CHECK((kcm_fold_step(topology, theta, settings) - want).norm() == 0.0);
  }

  CHECK_THROWS_AS(kcm_fold_step(default_topology(), Eigen::VectorXd::Zero(22),
                                FoldSettings{.step = -1.0}),
                  std::invalid_argument);
}

TEST_CASE("fold_to_convergence") {
  SUBCASE("a converged start returns immediately with one entry") {
    const ChainTopology topology = default_topology();
    const Eigen::VectorXd theta_c = folded_fixture().conformations.back();
    const Trajectory again = fold_to_convergence(topology, theta_c, FoldSettings{});
    CHECK(again.converged);
    CHECK(again.size() == 1);
  }

  SUBCASE("zero-interaction chains are stationary everywhere") {
    const ChainTopology topology = kcm::test::zero_interaction_topology();
    std::mt19937_64 rng(7);
    const Trajectory traj =
        fold_to_convergence(topology, random_conformation(rng, 22, 1.0), FoldSettings{});
    CHECK(traj.converged);
    CHECK(traj.size() == 1);
  }

  SUBCASE("re-converges from a small perturbation with energy descent") {
    const ChainTopology topology = default_topology();
    const Eigen::VectorXd theta_c = folded_fixture().conformations.back();
    std::mt19937_64 rng(11);
    Eigen::VectorXd perturbed = theta_c + random_conformation(rng, 22, 0.05);
    const Trajectory traj = fold_to_convergence(topology, perturbed, FoldSettings{});
    CHECK(traj.converged);
    CHECK(traj.torque_norms.back() <= FoldSettings{}.torque_tolerance);
    CHECK(traj.energies.back() <= traj.energies.front());
    // Monotone non-increasing after the initial transient, up to the
    // floating-point floor of the energy sum near convergence.
    const std::size_t tail_start = traj.size() / 5;
    const double slack = 1e-12 * std::abs(traj.energies.front());
    for (std::size_t i = tail_start + 1; i < traj.size(); ++i)
      CHECK(traj.energies[i] <= traj.energies[i - 1] + slack);
  }
}

TEST_CASE("simulate_ode") {
  const ScalarField zero_energy = [](const Eigen::VectorXd&) { return 0.0; };

  SUBCASE("zero field keeps the state constant") {
    const VectorField field = [](const Eigen::VectorXd& theta) {
      return Eigen::VectorXd(Eigen::VectorXd::Zero(theta.size()));
    };
    const Eigen::VectorXd theta0 = Eigen::VectorXd::LinSpaced(6, -1.0, 1.0);
    const Trajectory traj = simulate_ode(field, zero_energy, theta0, 0.1, 25);
    REQUIRE(traj.size() == 26);
    for (const auto& theta : traj.conformations) CHECK((theta - theta0).norm() == 0.0);
  }

  SUBCASE("linear decay field follows the scalar recurrence") {
    const VectorField field = [](const Eigen::VectorXd& theta) {
      return Eigen::VectorXd(-theta);
    };
    const double dt = 0.25;
    Eigen::VectorXd theta0(3);
    theta0 << 1.0, -2.0, 0.5;
    const Trajectory traj = simulate_ode(field, zero_energy, theta0, dt, 20);
    for (std::size_t i = 0; i < traj.size(); ++i) {
      const double factor = std::pow(1.0 - dt, static_cast<double>(i));
      CHECK((traj.conformations[i] - factor * theta0).norm() < 1e-13);
    }
  }

  SUBCASE("field failures abort with a partial trajectory") {
    int evals = 0;
    const VectorField field = [&evals](const Eigen::VectorXd& theta) {
      if (++evals > 3) throw std::runtime_error("field blew up");
      return Eigen::VectorXd(theta);
    };
    const Trajectory traj = simulate_ode(field, zero_energy, Eigen::VectorXd::Ones(2), 0.1, 10);
    CHECK(traj.aborted);
    CHECK(traj.abort_reason == "field blew up");
    CHECK(traj.size() == 4);  // initial entry plus three successful steps
  }

  SUBCASE("halving dt halves the global error against an RK4 reference") {
    const ChainTopology topology = default_topology();
    const VectorField field = folding_field(topology);
    const Eigen::VectorXd theta0 = default_initial_conformation();
    const double horizon = 51.2;
    const Eigen::VectorXd reference = rk4_integrate(field, theta0, horizon / 512, 512);
    const auto euler_error = [&](int steps) {
      const ScalarField zero = [](const Eigen::VectorXd&) { return 0.0; };
      const Trajectory traj = simulate_ode(field, zero, theta0, horizon / steps, steps);
      return (traj.conformations.back() - reference).norm();
    };
    const double coarse = euler_error(64);
    const double fine = euler_error(128);
    CHECK(coarse / fine == doctest::Approx(2.0).epsilon(0.25));
  }

  SUBCASE("euler with unit gain reproduces the fold iteration bitwise") {
    const ChainTopology topology = default_topology();
    FoldSettings settings;
    settings.step = 150.0;
    settings.max_iters = 25;
    settings.torque_tolerance = 1e-300;
    const Eigen::VectorXd theta0 = default_initial_conformation();
    const Trajectory fold = fold_to_convergence(topology, theta0, settings);
    const Trajectory euler = simulate_ode(folding_field(topology),
                                          [&](const Eigen::VectorXd& t) {
                                            return free_energy(topology, t).total;
                                          },
                                          theta0, settings.step, 25);
    REQUIRE(fold.size() == euler.size());
    for (std::size_t i = 0; i < fold.size(); ++i)
      CHECK((fold.conformations[i] - euler.conformations[i]).norm() == 0.0);
  }

  SUBCASE("identical inputs give bit-identical trajectories") {
    const ChainTopology topology = default_topology();
    const Eigen::VectorXd theta0 = default_folded_reference();
    const ScalarField energy = [&](const Eigen::VectorXd& t) {
      return free_energy(topology, t).total;
    };
    const Trajectory a = simulate_ode(folding_field(topology), energy, theta0, 0.5, 40);
    const Trajectory b = simulate_ode(folding_field(topology), energy, theta0, 0.5, 40);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK((a.conformations[i] - b.conformations[i]).norm() == 0.0);
      CHECK(a.energies[i] == b.energies[i]);
    }
  }
}

TEST_CASE("trivial_unfold_input") {
  const ChainTopology topology = default_topology();

  SUBCASE("vanishes at a converged conformation") {
    const Eigen::VectorXd theta_c = folded_fixture().conformations.back();
    CHECK(trivial_unfold_input(topology, theta_c).cwiseAbs().maxCoeff() <=
          2.0 * FoldSettings{}.torque_tolerance);
  }

  SUBCASE("closed loop equals the negated folding field") {
    std::mt19937_64 rng(13);
    const Eigen::VectorXd theta = random_conformation(rng, 22, 0.8);
    const Eigen::VectorXd tau = dihedral_torques(topology, theta);
    const Eigen::VectorXd closed = tau + trivial_unfold_input(topology, theta);
    CHECK((closed + tau).norm() <= 1e-12 * tau.norm());
  }

  SUBCASE("drives the energy uphill from a perturbed fold") {
    const Eigen::VectorXd theta_c = folded_fixture().conformations.back();
    const Eigen::VectorXd start =
        theta_c + 1e-3 * stretch_direction(topology, theta_c);
    const VectorField repulsive = [&](const Eigen::VectorXd& theta) {
      return Eigen::VectorXd(dihedral_torques(topology, theta) +
                             trivial_unfold_input(topology, theta));
    };
    const Trajectory traj = simulate_ode(repulsive,
                                         [&](const Eigen::VectorXd& t) {
                                           return free_energy(topology, t).total;
                                         },
                                         start, 1e-3, 50);
    REQUIRE(!traj.aborted);
    for (std::size_t i = 1; i < traj.size(); ++i) CHECK(traj.energies[i] > traj.energies[i - 1]);
  }
}
