#pragma once

#include <Eigen/Dense>
#include <functional>
#include <memory>
#include <string>

#include "kcm/chetaev.hpp"
#include "kcm/kcm.hpp"
#include "kcm/topology.hpp"

namespace kcm {

/// Smooth strictly increasing reshaping function with g(0) = 0, supplied
/// with its derivative for chain-rule gradients.
struct MonotoneFn {
  std::function<double(double)> value;
  std::function<double(double)> deriv;
  std::string name;
};

MonotoneFn identity_fn();
MonotoneFn square_fn();

enum class CcfChoice {
  kConeFunction,  // the elongation-cone Chetaev function
  kGFamily,       // g(|r_NC(theta) - r_NC(theta_star)|^2)
};

/// Exponents and shaping of the Sontag universal-formula input. Requires
/// 2q >= p > 1 and q > 1. `clamp` <= 0 disables input magnitude clamping.
struct SontagSettings {
  double p = 2.0;
  double q = 2.0;
  CcfChoice choice = CcfChoice::kConeFunction;
  MonotoneFn g = identity_fn();
  double clamp = 0.0;
};

SontagSettings make_sontag_settings(double p, double q,
                                    CcfChoice choice = CcfChoice::kConeFunction,
                                    MonotoneFn g = identity_fn(), double clamp = 0.0);

double ccf_value(const SontagSettings& settings, const ChetaevParams& params,
                 const ChainTopology& topology, const Eigen::VectorXd& theta);

Eigen::VectorXd ccf_gradient(const SontagSettings& settings, const ChetaevParams& params,
                             const ChainTopology& topology, const Eigen::VectorXd& theta);

/// phi(a, b) = (a - (|a|^p + b^(2q))^(1/p)) / b^2 for b != 0, and 0 at b = 0.
double sontag_phi(double a, double b, const SontagSettings& settings);

struct SontagTerms {
  double drift = 0.0;          // gradient of C dotted with the open-loop field
  Eigen::VectorXd gradient;    // B
  Eigen::VectorXd input;       // u_c, clamped per settings
  Eigen::VectorXd input_raw;   // u_c before clamping
  bool clamped = false;
};

SontagTerms sontag_terms(const SontagSettings& settings, const ChetaevParams& params,
                         const ChainTopology& topology, const Eigen::VectorXd& theta);

/// Universal-formula destabilizing input u = -phi(a, |B|) B.
Eigen::VectorXd sontag_input(const SontagSettings& settings, const ChetaevParams& params,
                             const ChainTopology& topology, const Eigen::VectorXd& theta);

/// Closed-loop field theta -> J^T F + u_c. `clamp_events`, when supplied, is
/// incremented every time the input magnitude cap engages.
VectorField ccf_closed_loop_field(const SontagSettings& settings, const ChetaevParams& params,
                                  const ChainTopology& topology,
                                  std::shared_ptr<long> clamp_events = nullptr);

}  // namespace kcm
