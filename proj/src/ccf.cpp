#include "kcm/ccf.hpp"

#include <cmath>

#include "kcm/chain.hpp"
#include "kcm/energy.hpp"

namespace kcm {

MonotoneFn identity_fn() {
  return {[](double s) { return s; }, [](double) { return 1.0; }, "identity"};
}

MonotoneFn square_fn() {
  return {[](double s) { return s * s; }, [](double s) { return 2.0 * s; }, "square"};
}

SontagSettings make_sontag_settings(double p, double q, CcfChoice choice, MonotoneFn g,
                                    double clamp) {
  if (!(p > 1.0) || !(q > 1.0) || !(2.0 * q >= p))
    throw std::invalid_argument("sontag: exponents must satisfy 2q >= p > 1 and q > 1");
  if (choice == CcfChoice::kGFamily) {
    if (!g.value || !g.deriv) throw std::invalid_argument("sontag: g-family needs g and g'");
    if (g.value(0.0) != 0.0) throw std::invalid_argument("sontag: g(0) must be 0");
    // Strict monotonicity probed on a coarse grid; rejects misconfigured g
    // up front rather than deep inside a run.
    double prev = g.value(0.0);
    for (int i = 1; i <= 512; ++i) {
      const double s = 100.0 * static_cast<double>(i) / 512.0;
      const double v = g.value(s);
      if (!(v > prev)) throw std::invalid_argument("sontag: g must be strictly increasing");
      prev = v;
    }
  }
  SontagSettings settings;
  settings.p = p;
  settings.q = q;
  settings.choice = choice;
  settings.g = std::move(g);
  settings.clamp = clamp;
  return settings;
}

double ccf_value(const SontagSettings& settings, const ChetaevParams& params,
                 const ChainTopology& topology, const Eigen::VectorXd& theta) {
  if (settings.choice == CcfChoice::kConeFunction)
    return chetaev_value(params, topology, theta);
  const Eigen::Vector3d delta = kinematic_state(topology, theta).end_to_end - params.r_star;
  return settings.g.value(delta.squaredNorm());
}

Eigen::VectorXd ccf_gradient(const SontagSettings& settings, const ChetaevParams& params,
                             const ChainTopology& topology, const Eigen::VectorXd& theta) {
  if (settings.choice == CcfChoice::kConeFunction)
    return chetaev_gradient(params, topology, theta);
  const KinematicState state = kinematic_state(topology, theta);
  const Eigen::Vector3d delta = state.end_to_end - params.r_star;
  const Eigen::MatrixXd jac = end_to_end_jacobian(topology, state);
  return (2.0 * settings.g.deriv(delta.squaredNorm())) * (jac.transpose() * delta);
}

double sontag_phi(double a, double b, const SontagSettings& settings) {
  if (b == 0.0) return 0.0;
  const double radical =
      std::pow(std::pow(std::abs(a), settings.p) + std::pow(b, 2.0 * settings.q),
               1.0 / settings.p);
  return (a - radical) / (b * b);
}

SontagTerms sontag_terms(const SontagSettings& settings, const ChetaevParams& params,
                         const ChainTopology& topology, const Eigen::VectorXd& theta) {
  SontagTerms terms;
  terms.gradient = ccf_gradient(settings, params, topology, theta);
  terms.drift = terms.gradient.dot(dihedral_torques(topology, theta));
  terms.input_raw = -sontag_phi(terms.drift, terms.gradient.norm(), settings) * terms.gradient;
  terms.input = terms.input_raw;
  if (settings.clamp > 0.0) {
    const double norm = terms.input.norm();
    if (norm > settings.clamp) {
      terms.input *= settings.clamp / norm;
      terms.clamped = true;
    }
  }
  return terms;
}

Eigen::VectorXd sontag_input(const SontagSettings& settings, const ChetaevParams& params,
                             const ChainTopology& topology, const Eigen::VectorXd& theta) {
  return sontag_terms(settings, params, topology, theta).input;
}

VectorField ccf_closed_loop_field(const SontagSettings& settings, const ChetaevParams& params,
                                  const ChainTopology& topology,
                                  std::shared_ptr<long> clamp_events) {
  return [settings, params, topology, clamp_events](const Eigen::VectorXd& theta) {
    const SontagTerms terms = sontag_terms(settings, params, topology, theta);
    if (terms.clamped && clamp_events) ++(*clamp_events);
    return Eigen::VectorXd(dihedral_torques(topology, theta) + terms.input);
  };
}

}  // namespace kcm
