#include "condmtl/benchmarks.hpp"

#include <cmath>
#include <cstdio>

#include "condmtl/error.hpp"

namespace condmtl {

namespace {

constexpr std::size_t kMaxValue = 10;
constexpr std::size_t kGroupBoundary = 5;  // A: x ≤ 5, B: x ≥ 6
constexpr std::size_t kReplication = 100;

double task_target(SyntheticTask kind, std::size_t branch, double x) {
    if (kind == SyntheticTask::Classification) {
        switch (branch) {
            case 0:
                return (x >= 4.0 && x <= 7.0) ? 1.0 : 0.0;
            case 1:
                return x >= 4.0 ? 1.0 : 0.0;
            default:
                return x >= 7.0 ? 1.0 : 0.0;
        }
    }
    switch (branch) {
        case 0:
            return 4.0 * x;
        case 1:
            return kind == SyntheticTask::RegressionIndependent ? 0.0 : 2.0 * x;
        default:
            return 6.0 * x;
    }
}

}  // namespace

std::string to_string(SyntheticTask task) {
    switch (task) {
        case SyntheticTask::Regression:
            return "regression";
        case SyntheticTask::RegressionIndependent:
            return "regression-independent";
        case SyntheticTask::Classification:
            return "classification";
    }
    return "unknown";
}

SyntheticTask synthetic_task_from_string(const std::string& name) {
    if (name == "regression") {
        return SyntheticTask::Regression;
    }
    if (name == "regression-independent") {
        return SyntheticTask::RegressionIndependent;
    }
    if (name == "classification") {
        return SyntheticTask::Classification;
    }
    throw ConfigError("unknown benchmark task: " + name);
}

std::size_t SyntheticData::group_a_size() const {
    std::size_t n = 0;
    for (std::uint8_t f : group_a) {
        n += f ? 1 : 0;
    }
    return n;
}

std::size_t SyntheticData::group_b_size() const {
    return size() - group_a_size();
}

GroupedDataset SyntheticData::grouped_view() const {
    if (kind != SyntheticTask::Classification) {
        throw VariantError("grouped_view is only defined for the classification benchmark");
    }
    GroupedDataset dataset;
    dataset.group_names = {"a", "b"};
    dataset.examples.reserve(size());
    for (std::size_t i = 0; i < size(); ++i) {
        GroupedExample ex;
        ex.features = {x[i]};
        ex.toxic = conditional.targets[0][i] != 0.0;
        ex.group_flags = {group_a[i], static_cast<std::uint8_t>(group_a[i] ? 0 : 1)};
        dataset.examples.push_back(std::move(ex));
    }
    return dataset;
}

SyntheticData generate(const SyntheticSpec& spec, std::uint64_t /*seed*/) {
    SyntheticData data;
    data.kind = spec.kind;
    for (std::size_t value = 1; value <= kMaxValue; ++value) {
        for (std::size_t copy = 0; copy < kReplication * value; ++copy) {
            data.x.push_back(static_cast<double>(value));
            data.group_a.push_back(value <= kGroupBoundary ? 1 : 0);
        }
    }
    const std::size_t n = data.x.size();
    data.conditional.features = Matrix::column(data.x);
    data.conditional.targets.assign(3, std::vector<double>(n, 0.0));
    data.conditional.relevant.assign(3, std::vector<std::uint8_t>(n, 0));
    for (std::size_t i = 0; i < n; ++i) {
        const bool a = data.group_a[i] != 0;
        data.conditional.targets[0][i] = task_target(spec.kind, 0, data.x[i]);
        data.conditional.relevant[0][i] = 1;
        data.conditional.targets[1][i] = a ? task_target(spec.kind, 1, data.x[i]) : 0.0;
        data.conditional.relevant[1][i] = a ? 1 : 0;
        data.conditional.targets[2][i] = a ? 0.0 : task_target(spec.kind, 2, data.x[i]);
        data.conditional.relevant[2][i] = a ? 0 : 1;
    }
    return data;
}

BranchTasks contaminated_tasks(const SyntheticData& data, ContaminationScheme scheme) {
    BranchTasks tasks = data.conditional;
    const std::size_t n = data.size();
    const bool classification = data.kind == SyntheticTask::Classification;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t own = data.group_a[i] ? 1 : 2;
        const std::size_t other = data.group_a[i] ? 2 : 1;
        if (classification && scheme == ContaminationScheme::ForceNonToxic) {
            tasks.targets[other][i] = 0.0;
        } else {
            tasks.targets[other][i] = tasks.targets[own][i];
        }
        tasks.relevant[1][i] = 1;
        tasks.relevant[2][i] = 1;
    }
    if (data.kind == SyntheticTask::RegressionIndependent) {
        // Task A is the constant 0 for every input; replication must not leak
        // the other group's targets into it or the independence premise dies.
        tasks.targets[1].assign(n, 0.0);
    }
    return tasks;
}

BranchTasks tasks_for_variant(const SyntheticData& data, ModelVariant variant,
                              ContaminationScheme scheme) {
    if (variant == ModelVariant::CondMtl) {
        return data.conditional;
    }
    return contaminated_tasks(data, scheme);
}

ArchitectureSpec benchmark_architecture(ModelVariant variant, SyntheticTask task) {
    ArchitectureSpec spec;
    spec.input_dim = 1;
    spec.shared_dims = {4};
    spec.head_dims = {2, 1};
    spec.n_branches = 3;
    spec.variant = variant;
    if (task == SyntheticTask::Classification) {
        spec.hidden_activation = Activation::Tanh;
        spec.output_activation = Activation::Sigmoid;
    } else {
        spec.hidden_activation = Activation::Linear;
        spec.output_activation = Activation::Linear;
    }
    return spec;
}

TrainConfig benchmark_schedule(SyntheticTask task, std::uint64_t seed) {
    TrainConfig config;
    // 150 epochs pin down the regression intercepts well enough for the
    // out-of-domain probes; 60 keep the classification runs in the regime
    // where contaminated baselines have not yet memorized the mixed labels.
    config.epochs = task == SyntheticTask::Classification ? 60 : 150;
    config.steps_per_epoch = 100;
    config.batch_size = 64;
    config.optimizer.learning_rate = 1e-3;
    config.seed = seed;
    config.loss = task == SyntheticTask::Classification ? LossKind::WeightedBce
                                                        : LossKind::MeanSquaredError;
    return config;
}

namespace {

BenchmarkResult run_benchmark(SyntheticTask task, ModelVariant variant, std::uint64_t seed,
                              ContaminationScheme scheme, const TrainConfig* schedule_override) {
    const SyntheticData data = generate(SyntheticSpec{task}, seed);
    const BranchTasks tasks = tasks_for_variant(data, variant, scheme);

    BenchmarkResult result;
    result.task = task;
    result.variant = variant;
    result.seed = seed;
    result.branch_names = {"all", "a", "b"};
    result.model = build(benchmark_architecture(variant, task), seed);

    TrainConfig config = schedule_override != nullptr ? *schedule_override
                                                      : benchmark_schedule(task, seed);
    result.training = train(result.model, tasks, config);

    for (std::size_t v = 1; v <= kMaxValue; ++v) {
        result.probe_x.push_back(static_cast<double>(v));
    }
    const Matrix probes = Matrix::column(result.probe_x);
    result.probe_predictions = forward(result.model, probes);
    result.probe_targets.assign(3, std::vector<double>(result.probe_x.size(), 0.0));
    result.probe_in_domain.assign(3, std::vector<std::uint8_t>(result.probe_x.size(), 1));
    for (std::size_t b = 0; b < 3; ++b) {
        for (std::size_t i = 0; i < result.probe_x.size(); ++i) {
            const double x = result.probe_x[i];
            result.probe_targets[b][i] = task_target(task, b, x);
            if (b == 1) {
                result.probe_in_domain[b][i] = x <= static_cast<double>(kGroupBoundary) ? 1 : 0;
            } else if (b == 2) {
                result.probe_in_domain[b][i] = x > static_cast<double>(kGroupBoundary) ? 1 : 0;
            }
        }
    }

    if (task == SyntheticTask::Classification) {
        const auto predicted = predict(result.model, data.conditional.features, 0.5);
        for (std::size_t b = 0; b < 3; ++b) {
            std::vector<ConditionalLabel> truth(data.size());
            for (std::size_t i = 0; i < data.size(); ++i) {
                truth[i] = !data.conditional.relevant[b][i] ? ConditionalLabel::Irrelevant
                           : data.conditional.targets[b][i] != 0.0
                               ? ConditionalLabel::Toxic
                               : ConditionalLabel::NonToxic;
            }
            result.reports.push_back(
                evaluate_branch(result.branch_names[b], truth, predicted[b]));
        }
    } else {
        for (std::size_t b = 0; b < 3; ++b) {
            double signed_sum = 0.0;
            double sq_sum = 0.0;
            std::size_t n_in = 0;
            double max_rel = 0.0;
            for (std::size_t i = 0; i < result.probe_x.size(); ++i) {
                const double err = result.probe_predictions[b][i] - result.probe_targets[b][i];
                const double denom = std::max(1.0, std::fabs(result.probe_targets[b][i]));
                max_rel = std::max(max_rel, std::fabs(err) / denom);
                if (result.probe_in_domain[b][i]) {
                    signed_sum += err;
                    sq_sum += err * err;
                    ++n_in;
                }
            }
            result.signed_mean_error_in_domain.push_back(signed_sum /
                                                         static_cast<double>(n_in));
            result.mse_in_domain.push_back(sq_sum / static_cast<double>(n_in));
            result.max_relative_error_all_probes.push_back(max_rel);
        }
    }

    if (variant == ModelVariant::CsMtl) {
        result.cs = inspect_cs(result.model);
    }
    return result;
}

}  // namespace

BenchmarkResult run_regression(ModelVariant variant, std::uint64_t seed,
                               const TrainConfig* schedule_override) {
    return run_benchmark(SyntheticTask::Regression, variant, seed,
                         ContaminationScheme::Replicate, schedule_override);
}

BenchmarkResult run_independent_variant(std::uint64_t seed,
                                        const TrainConfig* schedule_override) {
    return run_benchmark(SyntheticTask::RegressionIndependent, ModelVariant::CsMtl, seed,
                         ContaminationScheme::Replicate, schedule_override);
}

BenchmarkResult run_classification(ModelVariant variant, std::uint64_t seed,
                                   ContaminationScheme scheme,
                                   const TrainConfig* schedule_override) {
    return run_benchmark(SyntheticTask::Classification, variant, seed, scheme,
                         schedule_override);
}

std::string result_to_csv(const BenchmarkResult& result) {
    std::string csv = "probe_x,branch,prediction,target,in_domain\n";
    char buf[160];
    for (std::size_t b = 0; b < result.branch_names.size(); ++b) {
        for (std::size_t i = 0; i < result.probe_x.size(); ++i) {
            std::snprintf(buf, sizeof(buf), "%g,%s,%.17g,%.17g,%d\n", result.probe_x[i],
                          result.branch_names[b].c_str(), result.probe_predictions[b][i],
                          result.probe_targets[b][i],
                          static_cast<int>(result.probe_in_domain[b][i]));
            csv += buf;
        }
    }
    return csv;
}

}  // namespace condmtl
