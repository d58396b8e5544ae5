#ifndef CONDMTL_LOSSES_HPP
#define CONDMTL_LOSSES_HPP

#include <cstddef>
#include <span>
#include <vector>

#include "condmtl/conditional_label.hpp"

namespace condmtl {

/// Per-class loss weights for the binary toxicity objective.
struct ClassWeights {
    double non_toxic{1.0};
    double toxic{1.0};
};

/// Loss value plus its gradient with respect to each prediction.
/// n_contributing counts the examples that actually entered the mean; when it
/// is zero the value and every gradient entry are exactly 0.
struct LossResult {
    double value{0.0};
    std::size_t n_contributing{0};
    std::vector<double> grad;
};

/// Mean squared error over the batch.
LossResult mse_loss(std::span<const double> y_true, std::span<const double> y_pred);

/// Mean squared error restricted to indices with relevant[i] != 0; gradients at
/// excluded indices are exactly zero.
LossResult masked_mse_loss(std::span<const double> y_true, std::span<const double> y_pred,
                           std::span<const std::uint8_t> relevant);

/// Class-weighted binary cross-entropy. Predictions are clamped to
/// [1e-7, 1 - 1e-7] before the logarithm; the gradient is the exact derivative
/// of the clamped function (zero where the clamp is active).
LossResult weighted_bce(std::span<const double> y_true, std::span<const double> y_pred,
                        const ClassWeights& weights);

/// Weighted BCE over the relevant subset only: indices labeled Irrelevant
/// contribute nothing and receive an exactly-zero gradient. A batch with no
/// relevant index is legal and yields value 0 with zero gradients.
LossResult conditional_weighted_bce(std::span<const ConditionalLabel> y_true,
                                    std::span<const double> y_pred, const ClassWeights& weights);

/// Clamp bound applied to probabilities inside the BCE losses.
inline constexpr double kProbabilityClamp = 1e-7;

}  // namespace condmtl

#endif  // CONDMTL_LOSSES_HPP
