#include "condmtl/train.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "condmtl/error.hpp"
#include "condmtl/rng.hpp"

namespace condmtl {

void validate_tasks(const BranchTasks& tasks) {
    if (tasks.targets.size() != tasks.relevant.size()) {
        throw ShapeError("tasks: target/mask branch counts differ");
    }
    for (std::size_t b = 0; b < tasks.targets.size(); ++b) {
        if (tasks.targets[b].size() != tasks.n_examples() ||
            tasks.relevant[b].size() != tasks.n_examples()) {
            throw ShapeError("tasks: branch " + std::to_string(b) +
                             " length does not match feature rows");
        }
    }
}

LabelSchema schema_for_variant(ModelVariant variant) {
    return variant == ModelVariant::CondMtl ? LabelSchema::Conditional
                                            : LabelSchema::Traditional;
}

std::vector<std::vector<ConditionalLabel>> branch_label_views(const GroupedDataset& dataset,
                                                              LabelSchema schema) {
    if (schema == LabelSchema::Conditional) {
        return to_conditional_labels(dataset);
    }
    const auto traditional = to_traditional_labels(dataset);
    std::vector<std::vector<ConditionalLabel>> views(traditional.size());
    for (std::size_t b = 0; b < traditional.size(); ++b) {
        views[b].resize(traditional[b].size());
        for (std::size_t i = 0; i < traditional[b].size(); ++i) {
            views[b][i] =
                traditional[b][i] ? ConditionalLabel::Toxic : ConditionalLabel::NonToxic;
        }
    }
    return views;
}

BranchTasks classification_tasks(const GroupedDataset& dataset, LabelSchema schema) {
    validate_dataset(dataset);
    BranchTasks tasks;
    const std::size_t n = dataset.examples.size();
    tasks.features = Matrix(n, dataset.feature_dim());
    for (std::size_t i = 0; i < n; ++i) {
        const auto& f = dataset.examples[i].features;
        std::copy(f.begin(), f.end(), tasks.features.row(i).begin());
    }
    const auto views = branch_label_views(dataset, schema);
    tasks.targets.assign(views.size(), std::vector<double>(n, 0.0));
    tasks.relevant.assign(views.size(), std::vector<std::uint8_t>(n, 0));
    for (std::size_t b = 0; b < views.size(); ++b) {
        for (std::size_t i = 0; i < n; ++i) {
            tasks.relevant[b][i] = is_relevant(views[b][i]) ? 1 : 0;
            tasks.targets[b][i] = views[b][i] == ConditionalLabel::Toxic ? 1.0 : 0.0;
        }
    }
    return tasks;
}

std::vector<ClassWeights> global_class_weights(const BranchTasks& tasks) {
    std::vector<ClassWeights> weights;
    weights.reserve(tasks.n_branches());
    for (std::size_t b = 0; b < tasks.n_branches(); ++b) {
        std::vector<ConditionalLabel> labels(tasks.n_examples());
        for (std::size_t i = 0; i < tasks.n_examples(); ++i) {
            labels[i] = !tasks.relevant[b][i]   ? ConditionalLabel::Irrelevant
                        : tasks.targets[b][i] != 0.0 ? ConditionalLabel::Toxic
                                                     : ConditionalLabel::NonToxic;
        }
        weights.push_back(compute_class_weights(labels));
    }
    return weights;
}

ModelGrads ModelGrads::zeros_like(const MtlModel& model) {
    ModelGrads grads;
    for (const auto& layer : model.shared_layers) {
        grads.shared.push_back(
            LayerGrads{Matrix(layer.weights.rows, layer.weights.cols),
                       std::vector<double>(layer.bias.size(), 0.0)});
    }
    for (const auto& branch : model.branch_layers) {
        std::vector<LayerGrads> bg;
        for (const auto& layer : branch) {
            bg.push_back(LayerGrads{Matrix(layer.weights.rows, layer.weights.cols),
                                    std::vector<double>(layer.bias.size(), 0.0)});
        }
        grads.branches.push_back(std::move(bg));
    }
    for (const auto& unit : model.cs_units) {
        grads.cs.emplace_back(unit.matrix.rows, unit.matrix.cols);
    }
    return grads;
}

std::vector<double> ModelGrads::flatten() const {
    std::vector<double> flat;
    auto add_layer = [&flat](const LayerGrads& g) {
        flat.insert(flat.end(), g.weights.data.begin(), g.weights.data.end());
        flat.insert(flat.end(), g.bias.begin(), g.bias.end());
    };
    for (const auto& g : shared) {
        add_layer(g);
    }
    for (const auto& branch : branches) {
        for (const auto& g : branch) {
            add_layer(g);
        }
    }
    for (const auto& m : cs) {
        flat.insert(flat.end(), m.data.begin(), m.data.end());
    }
    return flat;
}

namespace {

LossResult branch_loss(std::span<const double> targets, std::span<const std::uint8_t> relevant,
                       std::span<const double> preds, LossKind loss, const ClassWeights& weights) {
    if (loss == LossKind::MeanSquaredError) {
        return masked_mse_loss(targets, preds, relevant);
    }
    // The weighted-BCE training path is always the conditional loss; fully
    // relevant branches are just the degenerate mask.
    std::vector<ConditionalLabel> labels(targets.size());
    for (std::size_t i = 0; i < targets.size(); ++i) {
        labels[i] = !relevant[i]          ? ConditionalLabel::Irrelevant
                    : targets[i] != 0.0   ? ConditionalLabel::Toxic
                                          : ConditionalLabel::NonToxic;
    }
    return conditional_weighted_bce(labels, preds, weights);
}

void check_branch_inputs(const MtlModel& model, const std::vector<std::vector<double>>& targets,
                         const std::vector<std::vector<std::uint8_t>>& relevant, LossKind loss,
                         const std::vector<ClassWeights>& weights) {
    const std::size_t n_branches = model.branch_layers.size();
    if (targets.size() != n_branches || relevant.size() != n_branches) {
        throw ShapeError("expected targets/masks for " + std::to_string(n_branches) +
                         " branches");
    }
    if (loss == LossKind::WeightedBce && weights.size() != n_branches) {
        throw ShapeError("expected class weights for every branch");
    }
}

BatchLoss branch_losses_from_outputs(const std::vector<std::vector<double>>& outputs,
                                     const std::vector<std::vector<double>>& targets,
                                     const std::vector<std::vector<std::uint8_t>>& relevant,
                                     LossKind loss, const std::vector<ClassWeights>& weights,
                                     std::vector<LossResult>* results) {
    BatchLoss batch;
    static const ClassWeights unit_weights{};
    for (std::size_t b = 0; b < outputs.size(); ++b) {
        const ClassWeights& w = loss == LossKind::WeightedBce ? weights[b] : unit_weights;
        LossResult r = branch_loss(targets[b], relevant[b], outputs[b], loss, w);
        batch.total += r.value;
        batch.per_branch.push_back(r.value);
        batch.n_contributing.push_back(r.n_contributing);
        if (results != nullptr) {
            results->push_back(std::move(r));
        }
    }
    return batch;
}

}  // namespace

BatchLoss compute_loss(const MtlModel& model, const Matrix& batch,
                       const std::vector<std::vector<double>>& targets,
                       const std::vector<std::vector<std::uint8_t>>& relevant, LossKind loss,
                       const std::vector<ClassWeights>& weights) {
    check_branch_inputs(model, targets, relevant, loss, weights);
    const auto outputs = forward(model, batch);
    return branch_losses_from_outputs(outputs, targets, relevant, loss, weights, nullptr);
}

BatchLoss compute_gradients(const MtlModel& model, const Matrix& batch,
                            const std::vector<std::vector<double>>& targets,
                            const std::vector<std::vector<std::uint8_t>>& relevant,
                            LossKind loss, const std::vector<ClassWeights>& weights,
                            ModelGrads& grads) {
    check_branch_inputs(model, targets, relevant, loss, weights);
    grads = ModelGrads::zeros_like(model);

    ForwardCache cache;
    const auto outputs = forward(model, batch, cache);
    std::vector<LossResult> results;
    BatchLoss batch_loss =
        branch_losses_from_outputs(outputs, targets, relevant, loss, weights, &results);

    const std::size_t n_branches = model.branch_layers.size();
    if (has_shared_trunk(model.spec.variant)) {
        Matrix trunk_upstream;
        const Matrix& trunk_out = model.shared_layers.empty()
                                      ? batch
                                      : cache.shared.back().out;
        trunk_upstream = Matrix(trunk_out.rows, trunk_out.cols);
        for (std::size_t b = 0; b < n_branches; ++b) {
            Matrix upstream = Matrix::column(results[b].grad);
            for (std::size_t i = model.branch_layers[b].size(); i-- > 0;) {
                DenseGrads g =
                    dense_backward(model.branch_layers[b][i], cache.branches[b][i], upstream);
                grads.branches[b][i].weights = std::move(g.weights);
                grads.branches[b][i].bias = std::move(g.bias);
                upstream = std::move(g.input);
            }
            for (std::size_t t = 0; t < trunk_upstream.size(); ++t) {
                trunk_upstream.data[t] += upstream.data[t];
            }
        }
        Matrix upstream = std::move(trunk_upstream);
        for (std::size_t i = model.shared_layers.size(); i-- > 0;) {
            DenseGrads g = dense_backward(model.shared_layers[i], cache.shared[i], upstream);
            grads.shared[i].weights = std::move(g.weights);
            grads.shared[i].bias = std::move(g.bias);
            upstream = std::move(g.input);
        }
    } else {
        const std::size_t depth = model.branch_layers.empty() ? 0 : model.branch_layers[0].size();
        std::vector<Matrix> upstream(n_branches);
        for (std::size_t b = 0; b < n_branches; ++b) {
            upstream[b] = Matrix::column(results[b].grad);
        }
        const bool stitched = model.spec.variant == ModelVariant::CsMtl;
        for (std::size_t d = depth; d-- > 0;) {
            std::vector<Matrix> next_upstream(n_branches);
            for (std::size_t b = 0; b < n_branches; ++b) {
                DenseGrads g =
                    dense_backward(model.branch_layers[b][d], cache.branches[b][d], upstream[b]);
                grads.branches[b][d].weights = std::move(g.weights);
                grads.branches[b][d].bias = std::move(g.bias);
                next_upstream[b] = std::move(g.input);
            }
            if (stitched && d > 0) {
                // next_upstream holds gradients w.r.t. the mixed activations
                // ã_i of stitch d-1; route them back through the unit.
                const Matrix& cs = model.cs_units[d - 1].matrix;
                std::vector<Matrix> pre_mix(n_branches);
                for (std::size_t j = 0; j < n_branches; ++j) {
                    const Matrix& a_j = cache.branches[j][d - 1].out;
                    Matrix acc(a_j.rows, a_j.cols);
                    for (std::size_t i = 0; i < n_branches; ++i) {
                        const Matrix& g_i = next_upstream[i];
                        double cs_grad = 0.0;
                        for (std::size_t t = 0; t < a_j.size(); ++t) {
                            cs_grad += g_i.data[t] * a_j.data[t];
                        }
                        grads.cs[d - 1].at(i, j) += cs_grad;
                        const double w = cs.at(i, j);
                        if (w != 0.0) {
                            for (std::size_t t = 0; t < acc.size(); ++t) {
                                acc.data[t] += w * g_i.data[t];
                            }
                        }
                    }
                    pre_mix[j] = std::move(acc);
                }
                upstream = std::move(pre_mix);
            } else {
                upstream = std::move(next_upstream);
            }
        }
    }
    return batch_loss;
}

namespace {

ClassWeights batch_class_weights(std::span<const double> targets,
                                 std::span<const std::uint8_t> relevant,
                                 std::span<const std::size_t> indices) {
    std::size_t n_toxic = 0;
    std::size_t n_non_toxic = 0;
    for (std::size_t idx : indices) {
        if (!relevant[idx]) {
            continue;
        }
        (targets[idx] != 0.0 ? n_toxic : n_non_toxic)++;
    }
    if (n_toxic == 0 || n_non_toxic == 0) {
        return ClassWeights{};  // single-class batches fall back to (1, 1)
    }
    const double n = static_cast<double>(n_toxic + n_non_toxic);
    return ClassWeights{.non_toxic = n / (2.0 * static_cast<double>(n_non_toxic)),
                        .toxic = n / (2.0 * static_cast<double>(n_toxic))};
}

}  // namespace

TrainResult train(MtlModel& model, const BranchTasks& tasks, const TrainConfig& config,
                  std::vector<ClassWeights> weights) {
    validate_tasks(tasks);
    if (tasks.n_branches() != model.branch_layers.size()) {
        throw ShapeError("tasks carry " + std::to_string(tasks.n_branches()) +
                         " branches, model has " + std::to_string(model.branch_layers.size()));
    }
    if (config.batch_size == 0 || config.steps_per_epoch == 0) {
        throw ConfigError("batch_size and steps_per_epoch must be positive");
    }
    if (tasks.n_examples() == 0) {
        throw EmptyBatchError("train: empty dataset");
    }
    if (config.loss == LossKind::WeightedBce && weights.empty() &&
        config.weighting == WeightingMode::Global) {
        weights = global_class_weights(tasks);
    }
    if (config.loss == LossKind::WeightedBce && config.weighting == WeightingMode::PerBatch) {
        weights.assign(tasks.n_branches(), ClassWeights{});
    }

    const std::size_t n = tasks.n_examples();
    const std::size_t n_branches = tasks.n_branches();
    std::vector<double*> params = parameter_pointers(model);
    AdaMaxState optimizer(config.optimizer, params.size());
    Rng rng(config.seed);

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    rng.shuffle(order);
    std::size_t cursor = 0;

    const std::size_t batch_size = std::min(config.batch_size, n);
    std::vector<std::size_t> batch_indices(batch_size);
    Matrix batch(batch_size, tasks.features.cols);
    std::vector<std::vector<double>> batch_targets(n_branches,
                                                   std::vector<double>(batch_size, 0.0));
    std::vector<std::vector<std::uint8_t>> batch_relevant(
        n_branches, std::vector<std::uint8_t>(batch_size, 0));

    TrainResult result;
    ModelGrads grads;
    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        double epoch_total = 0.0;
        std::vector<double> epoch_branch(n_branches, 0.0);
        for (std::size_t step = 0; step < config.steps_per_epoch; ++step) {
            for (std::size_t i = 0; i < batch_size; ++i) {
                if (cursor >= n) {
                    rng.shuffle(order);
                    cursor = 0;
                }
                batch_indices[i] = order[cursor++];
            }
            for (std::size_t i = 0; i < batch_size; ++i) {
                const auto src = tasks.features.row(batch_indices[i]);
                std::copy(src.begin(), src.end(), batch.row(i).begin());
                for (std::size_t b = 0; b < n_branches; ++b) {
                    batch_targets[b][i] = tasks.targets[b][batch_indices[i]];
                    batch_relevant[b][i] = tasks.relevant[b][batch_indices[i]];
                }
            }
            if (config.loss == LossKind::WeightedBce &&
                config.weighting == WeightingMode::PerBatch) {
                std::vector<std::size_t> all(batch_size);
                std::iota(all.begin(), all.end(), 0);
                for (std::size_t b = 0; b < n_branches; ++b) {
                    weights[b] = batch_class_weights(batch_targets[b], batch_relevant[b], all);
                }
            }
            const BatchLoss loss = compute_gradients(model, batch, batch_targets, batch_relevant,
                                                     config.loss, weights, grads);
            optimizer.step(params, grads.flatten());
            epoch_total += loss.total;
            for (std::size_t b = 0; b < n_branches; ++b) {
                epoch_branch[b] += loss.per_branch[b];
            }
        }
        EpochLoss entry;
        entry.total_mean = epoch_total / static_cast<double>(config.steps_per_epoch);
        for (double v : epoch_branch) {
            entry.branch_mean.push_back(v / static_cast<double>(config.steps_per_epoch));
        }
        result.trajectory.push_back(std::move(entry));
    }
    return result;
}

TrainResult train(MtlModel& model, const GroupedDataset& dataset, const TrainConfig& config) {
    const BranchTasks tasks =
        classification_tasks(dataset, schema_for_variant(model.spec.variant));
    return train(model, tasks, config);
}

double gradient_check(MtlModel& model, const Matrix& batch,
                      const std::vector<std::vector<double>>& targets,
                      const std::vector<std::vector<std::uint8_t>>& relevant, LossKind loss,
                      const std::vector<ClassWeights>& weights) {
    constexpr double h = 1e-6;
    ModelGrads grads;
    compute_gradients(model, batch, targets, relevant, loss, weights, grads);
    const std::vector<double> analytic = grads.flatten();
    const std::vector<double*> params = parameter_pointers(model);

    double max_error = 0.0;
    for (std::size_t i = 0; i < params.size(); ++i) {
        const double saved = *params[i];
        *params[i] = saved + h;
        const double plus = compute_loss(model, batch, targets, relevant, loss, weights).total;
        *params[i] = saved - h;
        const double minus = compute_loss(model, batch, targets, relevant, loss, weights).total;
        *params[i] = saved;
        const double central = (plus - minus) / (2.0 * h);
        const double denom = std::max(1e-8, std::fabs(analytic[i]) + std::fabs(central));
        max_error = std::max(max_error, std::fabs(analytic[i] - central) / denom);
    }
    return max_error;
}

}  // namespace condmtl
