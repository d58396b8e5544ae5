#include "condmtl/losses.hpp"

#include <cmath>
#include <string>

#include "condmtl/error.hpp"

namespace condmtl {

namespace {

void check_lengths(std::size_t n_true, std::size_t n_pred, const char* op) {
    if (n_true != n_pred) {
        throw ShapeError(std::string(op) + ": label/prediction length mismatch " +
                         std::to_string(n_true) + " vs " + std::to_string(n_pred));
    }
}

void check_weights(const ClassWeights& w) {
    if (!(w.non_toxic > 0.0) || !(w.toxic > 0.0)) {
        throw ConfigError("class weights must be positive");
    }
}

// Shared core: weighted BCE over the indices where relevant(i) is true.
template <typename RelevantFn, typename LabelFn>
LossResult wbce_core(std::size_t n, RelevantFn relevant, LabelFn label,
                     std::span<const double> y_pred, const ClassWeights& weights) {
    LossResult result;
    result.grad.assign(n, 0.0);
    std::size_t count = 0;
    for (std::size_t i = 0; i < n; ++i) {
        if (relevant(i)) {
            ++count;
        }
    }
    result.n_contributing = count;
    if (count == 0) {
        return result;
    }
    const double inv_n = 1.0 / static_cast<double>(count);
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (!relevant(i)) {
            continue;
        }
        const double p = y_pred[i];
        const bool clamped = p <= kProbabilityClamp || p >= 1.0 - kProbabilityClamp;
        const double pc = std::min(std::max(p, kProbabilityClamp), 1.0 - kProbabilityClamp);
        if (label(i)) {
            acc -= weights.toxic * std::log(pc);
            if (!clamped) {
                result.grad[i] = -inv_n * weights.toxic / pc;
            }
        } else {
            acc -= weights.non_toxic * std::log(1.0 - pc);
            if (!clamped) {
                result.grad[i] = inv_n * weights.non_toxic / (1.0 - pc);
            }
        }
    }
    result.value = acc * inv_n;
    return result;
}

}  // namespace

LossResult mse_loss(std::span<const double> y_true, std::span<const double> y_pred) {
    check_lengths(y_true.size(), y_pred.size(), "mse_loss");
    if (y_true.empty()) {
        throw EmptyBatchError("mse_loss: empty batch");
    }
    std::vector<std::uint8_t> relevant(y_true.size(), 1);
    return masked_mse_loss(y_true, y_pred, relevant);
}

LossResult masked_mse_loss(std::span<const double> y_true, std::span<const double> y_pred,
                           std::span<const std::uint8_t> relevant) {
    check_lengths(y_true.size(), y_pred.size(), "masked_mse_loss");
    check_lengths(y_true.size(), relevant.size(), "masked_mse_loss(mask)");
    LossResult result;
    result.grad.assign(y_true.size(), 0.0);
    std::size_t count = 0;
    for (std::uint8_t r : relevant) {
        if (r) {
            ++count;
        }
    }
    result.n_contributing = count;
    if (count == 0) {
        return result;
    }
    const double inv_n = 1.0 / static_cast<double>(count);
    double acc = 0.0;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        if (!relevant[i]) {
            continue;
        }
        const double diff = y_true[i] - y_pred[i];
        acc += diff * diff;
        result.grad[i] = 2.0 * (y_pred[i] - y_true[i]) * inv_n;
    }
    result.value = acc * inv_n;
    return result;
}

LossResult weighted_bce(std::span<const double> y_true, std::span<const double> y_pred,
                        const ClassWeights& weights) {
    check_lengths(y_true.size(), y_pred.size(), "weighted_bce");
    check_weights(weights);
    if (y_true.empty()) {
        throw EmptyBatchError("weighted_bce: empty batch");
    }
    return wbce_core(
        y_true.size(), [](std::size_t) { return true; },
        [&](std::size_t i) { return y_true[i] != 0.0; }, y_pred, weights);
}

LossResult conditional_weighted_bce(std::span<const ConditionalLabel> y_true,
                                    std::span<const double> y_pred, const ClassWeights& weights) {
    check_lengths(y_true.size(), y_pred.size(), "conditional_weighted_bce");
    check_weights(weights);
    return wbce_core(
        y_true.size(), [&](std::size_t i) { return is_relevant(y_true[i]); },
        [&](std::size_t i) { return y_true[i] == ConditionalLabel::Toxic; }, y_pred, weights);
}

}  // namespace condmtl
