#ifndef CONDMTL_ACTIVATION_HPP
#define CONDMTL_ACTIVATION_HPP

#include <string>

namespace condmtl {

enum class Activation { Linear, Relu, Tanh, Sigmoid };

/// Apply the activation to a pre-activation value.
/// Sigmoid output is clamped to the open interval (0, 1) at double precision.
double apply_activation(Activation act, double z);

/// d(activation)/dz at pre-activation z. Relu uses 0 at the kink.
double activation_derivative(Activation act, double z);

std::string to_string(Activation act);
Activation activation_from_string(const std::string& name);

}  // namespace condmtl

#endif  // CONDMTL_ACTIVATION_HPP
