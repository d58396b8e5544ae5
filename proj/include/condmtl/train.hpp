#ifndef CONDMTL_TRAIN_HPP
#define CONDMTL_TRAIN_HPP

#include <cstdint>
#include <vector>

#include "condmtl/adamax.hpp"
#include "condmtl/labels.hpp"
#include "condmtl/losses.hpp"
#include "condmtl/model.hpp"

namespace condmtl {

enum class LossKind { WeightedBce, MeanSquaredError };
enum class WeightingMode { Global, PerBatch };
enum class LabelSchema { Conditional, Traditional };

/// Per-branch training targets with relevance masks over a fixed feature
/// matrix. Classification targets are 0/1; regression targets are arbitrary
/// floats. An irrelevant (masked) example never contributes loss or gradient
/// to that branch.
struct BranchTasks {
    Matrix features;                                  // N × F
    std::vector<std::vector<double>> targets;         // [branch][example]
    std::vector<std::vector<std::uint8_t>> relevant;  // [branch][example]

    std::size_t n_examples() const { return features.rows; }
    std::size_t n_branches() const { return targets.size(); }
};

void validate_tasks(const BranchTasks& tasks);

/// Label schema each variant trains under: conditional masks for CondMtl,
/// traditional force-non-toxic labels for the other variants.
LabelSchema schema_for_variant(ModelVariant variant);

/// Branch targets for a toxicity dataset under the given schema.
BranchTasks classification_tasks(const GroupedDataset& dataset, LabelSchema schema);

/// The branch label views backing `classification_tasks`, as conditional
/// labels (traditional views have every example relevant).
std::vector<std::vector<ConditionalLabel>> branch_label_views(const GroupedDataset& dataset,
                                                              LabelSchema schema);

/// Balanced per-branch class weights over each branch's relevant subset.
std::vector<ClassWeights> global_class_weights(const BranchTasks& tasks);

struct TrainConfig {
    std::size_t epochs{10};
    std::size_t steps_per_epoch{1000};
    std::size_t batch_size{32};
    AdaMaxConfig optimizer{};
    std::uint64_t seed{0};
    WeightingMode weighting{WeightingMode::Global};
    LossKind loss{LossKind::WeightedBce};
};

struct EpochLoss {
    double total_mean{0.0};
    std::vector<double> branch_mean;
};

struct TrainResult {
    std::vector<EpochLoss> trajectory;  // one entry per epoch
};

struct LayerGrads {
    Matrix weights;
    std::vector<double> bias;
};

/// Gradient of the total loss with respect to every model parameter,
/// structured like the model itself.
struct ModelGrads {
    std::vector<LayerGrads> shared;
    std::vector<std::vector<LayerGrads>> branches;
    std::vector<Matrix> cs;

    static ModelGrads zeros_like(const MtlModel& model);
    /// Same order as parameter_pointers().
    std::vector<double> flatten() const;
};

struct BatchLoss {
    double total{0.0};
    std::vector<double> per_branch;
    std::vector<std::size_t> n_contributing;
};

/// Forward + backward over one batch. Total loss is the unweighted sum of the
/// per-branch losses; irrelevant examples contribute exactly zero gradient to
/// their branch.
BatchLoss compute_gradients(const MtlModel& model, const Matrix& batch,
                            const std::vector<std::vector<double>>& targets,
                            const std::vector<std::vector<std::uint8_t>>& relevant,
                            LossKind loss, const std::vector<ClassWeights>& weights,
                            ModelGrads& grads);

/// Total loss only (used by finite-difference checks).
BatchLoss compute_loss(const MtlModel& model, const Matrix& batch,
                       const std::vector<std::vector<double>>& targets,
                       const std::vector<std::vector<std::uint8_t>>& relevant, LossKind loss,
                       const std::vector<ClassWeights>& weights);

/// Mini-batch AdaMax training; deterministic given config.seed. For weighted
/// BCE with global weighting and no explicit weights, balanced weights are
/// computed from the tasks. Per-batch weighting recomputes weights from each
/// batch's relevant subset, falling back to (1, 1) when a class is missing.
TrainResult train(MtlModel& model, const BranchTasks& tasks, const TrainConfig& config,
                  std::vector<ClassWeights> weights = {});

/// Variant-appropriate schema + global class weights, then train.
TrainResult train(MtlModel& model, const GroupedDataset& dataset, const TrainConfig& config);

/// Max over parameters of |analytic − central difference| relative error,
/// with h = 1e-6 and denominator max(1e-8, |analytic| + |central|).
double gradient_check(MtlModel& model, const Matrix& batch,
                      const std::vector<std::vector<double>>& targets,
                      const std::vector<std::vector<std::uint8_t>>& relevant, LossKind loss,
                      const std::vector<ClassWeights>& weights);

}  // namespace condmtl

#endif  // CONDMTL_TRAIN_HPP
