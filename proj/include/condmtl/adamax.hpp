#ifndef CONDMTL_ADAMAX_HPP
#define CONDMTL_ADAMAX_HPP

#include <cstdint>
#include <span>
#include <vector>

namespace condmtl {

struct AdaMaxConfig {
    double learning_rate{1e-5};
    double beta1{0.9};
    double beta2{0.999};
    double epsilon{1e-7};
};

/// AdaMax optimizer state over a flat parameter vector.
/// Update per step t:
///   m ← β1·m + (1−β1)·g
///   u ← max(β2·u, |g|)
///   θ ← θ − (lr / (1 − β1^t)) · m / (u + ε)
class AdaMaxState {
public:
    AdaMaxState(AdaMaxConfig config, std::size_t n_params);

    void step(std::span<double* const> params, std::span<const double> grads);
    void step(std::vector<double>& params, std::span<const double> grads);

    const AdaMaxConfig& config() const { return config_; }
    std::uint64_t step_count() const { return step_count_; }
    std::span<const double> first_moment() const { return first_moment_; }
    std::span<const double> infinity_norm() const { return infinity_norm_; }

private:
    AdaMaxConfig config_;
    std::uint64_t step_count_{0};
    std::vector<double> first_moment_;
    std::vector<double> infinity_norm_;
};

}  // namespace condmtl

#endif  // CONDMTL_ADAMAX_HPP
