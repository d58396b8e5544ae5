#include "condmtl/adamax.hpp"

#include <cmath>
#include <string>

#include "condmtl/error.hpp"

namespace condmtl {

AdaMaxState::AdaMaxState(AdaMaxConfig config, std::size_t n_params)
    : config_(config), first_moment_(n_params, 0.0), infinity_norm_(n_params, 0.0) {
    if (!(config.learning_rate > 0.0) || !(config.beta1 > 0.0 && config.beta1 < 1.0) ||
        !(config.beta2 > 0.0 && config.beta2 < 1.0) || !(config.epsilon >= 0.0)) {
        throw ConfigError("invalid AdaMax configuration");
    }
}

void AdaMaxState::step(std::span<double* const> params, std::span<const double> grads) {
    if (params.size() != first_moment_.size() || grads.size() != first_moment_.size()) {
        throw ShapeError("AdaMax step: expected " + std::to_string(first_moment_.size()) +
                         " parameters, got " + std::to_string(params.size()) + "/" +
                         std::to_string(grads.size()));
    }
    ++step_count_;
    const double bias_correction = 1.0 - std::pow(config_.beta1, static_cast<double>(step_count_));
    const double scale = config_.learning_rate / bias_correction;
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double g = grads[i];
        first_moment_[i] = config_.beta1 * first_moment_[i] + (1.0 - config_.beta1) * g;
        infinity_norm_[i] = std::max(config_.beta2 * infinity_norm_[i], std::fabs(g));
        if (infinity_norm_[i] + config_.epsilon > 0.0) {
            *params[i] -= scale * first_moment_[i] / (infinity_norm_[i] + config_.epsilon);
        }
    }
}

void AdaMaxState::step(std::vector<double>& params, std::span<const double> grads) {
    std::vector<double*> ptrs(params.size());
    for (std::size_t i = 0; i < params.size(); ++i) {
        ptrs[i] = &params[i];
    }
    step(ptrs, grads);
}

}  // namespace condmtl
