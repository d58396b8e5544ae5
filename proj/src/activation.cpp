#include "condmtl/activation.hpp"

#include <cmath>
#include <limits>

#include "condmtl/error.hpp"

namespace condmtl {

namespace {

double stable_sigmoid(double z) {
    double s;
    if (z >= 0.0) {
        s = 1.0 / (1.0 + std::exp(-z));
    } else {
        const double e = std::exp(z);
        s = e / (1.0 + e);
    }
    // Keep the output strictly inside (0, 1); exp saturates to exactly 0/1
    // in double for |z| beyond ~37.
    constexpr double lo = std::numeric_limits<double>::min();
    const double hi = 1.0 - std::numeric_limits<double>::epsilon() / 2.0;
    if (s < lo) {
        return lo;
    }
    if (s > hi) {
        return hi;
    }
    return s;
}

}  // namespace

double apply_activation(Activation act, double z) {
    switch (act) {
        case Activation::Linear:
            return z;
        case Activation::Relu:
            return z > 0.0 ? z : 0.0;
        case Activation::Tanh:
            return std::tanh(z);
        case Activation::Sigmoid:
            return stable_sigmoid(z);
    }
    throw ConfigError("unknown activation");
}

double activation_derivative(Activation act, double z) {
    switch (act) {
        case Activation::Linear:
            return 1.0;
        case Activation::Relu:
            return z > 0.0 ? 1.0 : 0.0;
        case Activation::Tanh: {
            const double t = std::tanh(z);
            return 1.0 - t * t;
        }
        case Activation::Sigmoid: {
            const double s = stable_sigmoid(z);
            return s * (1.0 - s);
        }
    }
    throw ConfigError("unknown activation");
}

std::string to_string(Activation act) {
    switch (act) {
        case Activation::Linear:
            return "linear";
        case Activation::Relu:
            return "relu";
        case Activation::Tanh:
            return "tanh";
        case Activation::Sigmoid:
            return "sigmoid";
    }
    return "unknown";
}

Activation activation_from_string(const std::string& name) {
    if (name == "linear") {
        return Activation::Linear;
    }
    if (name == "relu") {
        return Activation::Relu;
    }
    if (name == "tanh") {
        return Activation::Tanh;
    }
    if (name == "sigmoid") {
        return Activation::Sigmoid;
    }
    throw ConfigError("unknown activation name: " + name);
}

}  // namespace condmtl
