#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "condmtl/benchmarks.hpp"
#include "condmtl/dataset_io.hpp"
#include "condmtl/error.hpp"
#include "condmtl/evaluate.hpp"
#include "condmtl/report_json.hpp"

namespace {

namespace fs = std::filesystem;
using namespace condmtl;

constexpr int kExitSuccess = 0;
constexpr int kExitRuntimeFailure = 1;
constexpr int kExitUsageError = 2;

fs::path default_out_dir() {
    if (const char* env = std::getenv("CONDMTL_OUT")) {
        return fs::path(env);
    }
    return fs::path("condmtl-out");
}

void write_text(const fs::path& path, const std::string& content) {
    fs::create_directories(path.parent_path().empty() ? fs::path(".") : path.parent_path());
    std::ofstream out(path);
    if (!out) {
        throw PersistenceError("cannot write " + path.string());
    }
    out << content;
    if (!out.flush()) {
        throw PersistenceError("failed while writing " + path.string());
    }
}

void write_json(const fs::path& path, const nlohmann::json& j) {
    write_text(path, j.dump(2) + "\n");
}

std::string with_thousands(std::size_t value) {
    std::string digits = std::to_string(value);
    std::string out;
    int count = 0;
    for (auto it = digits.rbegin(); it != digits.rend(); ++it) {
        if (count != 0 && count % 3 == 0) {
            out.push_back(',');
        }
        out.push_back(*it);
        ++count;
    }
    return std::string(out.rbegin(), out.rend());
}

std::string percent_delta(std::size_t value, std::size_t baseline) {
    const double pct =
        100.0 * (static_cast<double>(value) - static_cast<double>(baseline)) /
        static_cast<double>(baseline);
    const long long rounded = std::llround(pct);
    return (rounded >= 0 ? "+" : "") + std::to_string(rounded) + "%";
}

double elapsed_seconds(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// ---------------------------------------------------------------------------
// params
// ---------------------------------------------------------------------------

struct ParamsArgs {
    std::size_t input_dim{768};
    std::vector<std::size_t> shared{512};
    std::vector<std::size_t> heads{128, 64, 1};
    std::size_t branches{3};
};

int cmd_params(const ParamsArgs& args) {
    ArchitectureSpec spec;
    spec.input_dim = args.input_dim;
    spec.shared_dims = args.shared;
    spec.head_dims = args.heads;
    spec.n_branches = args.branches;

    auto count_for = [&spec](ModelVariant variant, std::size_t branches) {
        ArchitectureSpec s = spec;
        s.variant = variant;
        s.n_branches = branches;
        return count_parameters(s);
    };
    const std::size_t single = count_for(ModelVariant::StackedStl, 1);
    const std::size_t stacked = count_for(ModelVariant::StackedStl, args.branches);
    const std::size_t cs = count_for(ModelVariant::CsMtl, args.branches);
    const std::size_t trad = count_for(ModelVariant::TradMtl, args.branches);
    const std::size_t cond = count_for(ModelVariant::CondMtl, args.branches);

    std::printf("single stream (1 branch): %s trainable parameters\n\n",
                with_thousands(single).c_str());
    std::printf("%-14s %14s %8s\n", "model", "params", "delta");
    std::printf("%-14s %14s %8s\n", "stacked-stl", with_thousands(stacked).c_str(), "-");
    std::printf("%-14s %14s %8s\n", "cs-mtl", with_thousands(cs).c_str(),
                percent_delta(cs, stacked).c_str());
    std::printf("%-14s %14s %8s\n", "trad-mtl", with_thousands(trad).c_str(),
                percent_delta(trad, stacked).c_str());
    std::printf("%-14s %14s %8s\n", "cond-mtl", with_thousands(cond).c_str(),
                percent_delta(cond, stacked).c_str());
    return kExitSuccess;
}

// ---------------------------------------------------------------------------
// bench
// ---------------------------------------------------------------------------

struct BenchArgs {
    std::string task{"regression"};
    std::string variant{"cond-mtl"};
    std::uint64_t seed{0};
    std::size_t runs{1};
    std::string out;
    std::string contamination{"replicate"};
    std::size_t epochs{0};  // 0 = task default
};

int cmd_bench(const BenchArgs& args) {
    const SyntheticTask task = synthetic_task_from_string(args.task);
    const ModelVariant variant = variant_from_string(args.variant);
    if (task == SyntheticTask::RegressionIndependent && variant != ModelVariant::CsMtl) {
        std::cerr << "error: --task regression-independent requires --variant cs-mtl\n";
        return kExitUsageError;
    }
    ContaminationScheme scheme = ContaminationScheme::Replicate;
    if (args.contamination == "force") {
        scheme = ContaminationScheme::ForceNonToxic;
    } else if (args.contamination != "replicate") {
        std::cerr << "error: --contamination must be 'replicate' or 'force'\n";
        return kExitUsageError;
    }

    const fs::path out_dir = args.out.empty() ? default_out_dir() : fs::path(args.out);
    fs::create_directories(out_dir);

    std::vector<std::vector<BranchReport>> run_reports;
    std::vector<std::vector<double>> regression_metrics;  // rows of (branch, metrics...)

    for (std::size_t run = 0; run < args.runs; ++run) {
        const std::uint64_t run_seed = args.seed + run;
        TrainConfig schedule = benchmark_schedule(task, run_seed);
        if (args.epochs != 0) {
            schedule.epochs = args.epochs;
        }
        const auto start = std::chrono::steady_clock::now();
        BenchmarkResult result = [&] {
            switch (task) {
                case SyntheticTask::Regression:
                    return run_regression(variant, run_seed, &schedule);
                case SyntheticTask::RegressionIndependent:
                    return run_independent_variant(run_seed, &schedule);
                case SyntheticTask::Classification:
                    return run_classification(variant, run_seed, scheme, &schedule);
            }
            throw ConfigError("unreachable task");
        }();
        const double seconds = elapsed_seconds(start);

        const fs::path run_dir = out_dir / ("run_" + std::to_string(run));
        fs::create_directories(run_dir);
        write_text(run_dir / "predictions.csv", result_to_csv(result));
        write_json(run_dir / "summary.json", benchmark_to_json(result));
        std::printf("run %zu (seed %llu): trained in %.2fs, loss %.5f -> %.5f\n", run,
                    static_cast<unsigned long long>(run_seed),
                    seconds, result.training.trajectory.front().total_mean,
                    result.training.trajectory.back().total_mean);
        if (!result.reports.empty()) {
            run_reports.push_back(result.reports);
        }
        if (!result.signed_mean_error_in_domain.empty()) {
            for (std::size_t b = 0; b < result.branch_names.size(); ++b) {
                regression_metrics.push_back({static_cast<double>(b),
                                              result.signed_mean_error_in_domain[b],
                                              result.mse_in_domain[b],
                                              result.max_relative_error_all_probes[b]});
            }
        }
        if (result.cs) {
            std::printf("  max |off-diagonal| in task-a rows/cols: %.6g\n",
                        max_off_diagonal_for_task(*result.cs, 1));
        }
    }

    nlohmann::json aggregate;
    aggregate["task"] = args.task;
    aggregate["variant"] = args.variant;
    aggregate["runs"] = args.runs;
    aggregate["base_seed"] = args.seed;
    if (!run_reports.empty()) {
        const RunAggregate agg = aggregate_runs(run_reports);
        aggregate["metrics"] = aggregate_to_json(agg);
        write_text(out_dir / "aggregate.csv", aggregate_to_csv(agg));
    } else {
        const std::vector<std::string> branch_names = {"all", "a", "b"};
        const std::vector<std::string> metric_names = {"signed_mean_error_in_domain",
                                                       "mse_in_domain",
                                                       "max_relative_error_all_probes"};
        for (std::size_t b = 0; b < branch_names.size(); ++b) {
            for (std::size_t m = 0; m < metric_names.size(); ++m) {
                std::vector<double> values;
                for (const auto& row : regression_metrics) {
                    if (static_cast<std::size_t>(row[0]) == b) {
                        values.push_back(row[1 + m]);
                    }
                }
                const MetricStat stat = compute_stat(values);
                aggregate["metrics"][branch_names[b]][metric_names[m]] = {
                    {"mean", stat.mean}, {"std", stat.stddev}};
            }
        }
    }
    write_json(out_dir / "aggregate.json", aggregate);
    std::printf("reports written under %s\n", out_dir.string().c_str());
    return kExitSuccess;
}

// ---------------------------------------------------------------------------
// train
// ---------------------------------------------------------------------------

struct TrainArgs {
    std::string config_path;
    std::string out;
};

std::string trajectory_csv(const TrainResult& result, const std::vector<std::string>& branches) {
    std::string csv = "epoch,total";
    for (const auto& b : branches) {
        csv += "," + b;
    }
    csv += "\n";
    char buf[64];
    for (std::size_t e = 0; e < result.trajectory.size(); ++e) {
        csv += std::to_string(e);
        std::snprintf(buf, sizeof(buf), ",%.17g", result.trajectory[e].total_mean);
        csv += buf;
        for (double v : result.trajectory[e].branch_mean) {
            std::snprintf(buf, sizeof(buf), ",%.17g", v);
            csv += buf;
        }
        csv += "\n";
    }
    return csv;
}

int cmd_train(const TrainArgs& args) {
    const ExperimentConfig config = load_config(args.config_path);
    const fs::path out_dir = args.out.empty() ? default_out_dir() : fs::path(args.out);
    fs::create_directories(out_dir);

    const GroupedDataset dataset = load_dataset(config.train_path);
    const auto counts = split_summary(dataset);
    std::printf("%-12s %8s %10s %8s\n", "branch", "toxic", "non-toxic", "total");
    for (const auto& [branch, c] : counts) {
        std::printf("%-12s %8zu %10zu %8zu\n", branch.c_str(), c.toxic, c.non_toxic, c.total);
    }
    ArchitectureSpec spec;
    spec.input_dim = dataset.feature_dim();
    spec.shared_dims = config.shared_dims;
    spec.head_dims = config.head_dims;
    spec.n_branches = dataset.n_branches();
    spec.variant = config.variant;
    spec.hidden_activation = config.hidden_activation;
    spec.output_activation = config.output_activation;

    MtlModel model = build(spec, config.seed);
    const LabelSchema schema =
        config.label_schema ? *config.label_schema : schema_for_variant(config.variant);
    const BranchTasks tasks = classification_tasks(dataset, schema);
    TrainConfig train_cfg = config.train_config();

    std::vector<ClassWeights> weights;
    if (train_cfg.weighting == WeightingMode::Global) {
        weights = global_class_weights(tasks);
    }

    const auto start = std::chrono::steady_clock::now();
    const TrainResult result = train(model, tasks, train_cfg, weights);
    const double seconds = elapsed_seconds(start);

    save_model(model, out_dir / "model.bin");
    write_text(out_dir / "trajectory.csv", trajectory_csv(result, dataset.branch_names()));

    const auto reports = evaluate_model(model, dataset, config.threshold);
    nlohmann::json summary;
    summary["variant"] = to_string(config.variant);
    summary["seed"] = config.seed;
    summary["epochs"] = config.epochs;
    summary["steps_per_epoch"] = config.steps_per_epoch;
    summary["batch_size"] = config.batch_size;
    summary["learning_rate"] = config.learning_rate;
    summary["threshold"] = config.threshold;
    summary["label_schema"] = schema == LabelSchema::Conditional ? "conditional" : "traditional";
    summary["train_path"] = config.train_path;
    summary["parameter_count"] = model.parameter_count();
    {
        nlohmann::json sj = nlohmann::json::array();
        for (const auto& [branch, c] : counts) {
            sj.push_back({{"branch", branch},
                          {"toxic", c.toxic},
                          {"non_toxic", c.non_toxic},
                          {"total", c.total}});
        }
        summary["split_summary"] = sj;
    }
    if (!weights.empty()) {
        nlohmann::json w = nlohmann::json::array();
        const auto names = dataset.branch_names();
        for (std::size_t b = 0; b < weights.size(); ++b) {
            w.push_back({{"branch", names[b]},
                         {"w_non_toxic", weights[b].non_toxic},
                         {"w_toxic", weights[b].toxic}});
        }
        summary["class_weights"] = w;
    }
    summary["train_split_reports"] = reports_to_json(reports);
    summary["train_split_eo_gaps"] = eo_gaps(reports);
    summary["trajectory_first_total"] = result.trajectory.empty()
                                            ? nlohmann::json(nullptr)
                                            : nlohmann::json(result.trajectory.front().total_mean);
    summary["trajectory_final_total"] = result.trajectory.empty()
                                            ? nlohmann::json(nullptr)
                                            : nlohmann::json(result.trajectory.back().total_mean);
    write_json(out_dir / "summary.json", summary);

    std::printf("trained %s (%s parameters) in %.2fs\n", to_string(config.variant).c_str(),
                with_thousands(model.parameter_count()).c_str(), seconds);
    std::printf("artifacts written under %s\n", out_dir.string().c_str());
    return kExitSuccess;
}

// ---------------------------------------------------------------------------
// eval
// ---------------------------------------------------------------------------

struct EvalArgs {
    std::string model_path;
    std::string data_path;
    std::string out;
    double threshold{0.5};
};

int cmd_eval(const EvalArgs& args) {
    const MtlModel model = load_model(args.model_path);
    const GroupedDataset dataset = load_dataset(args.data_path);
    const fs::path out_dir = args.out.empty() ? default_out_dir() : fs::path(args.out);
    fs::create_directories(out_dir);

    const auto reports = evaluate_model(model, dataset, args.threshold);
    const auto gaps = eo_gaps(reports);

    nlohmann::json j;
    j["threshold"] = args.threshold;
    j["data_path"] = args.data_path;
    j["reports"] = reports_to_json(reports);
    j["eo_gaps"] = gaps;
    write_json(out_dir / "report.json", j);
    write_text(out_dir / "report.csv", reports_to_csv(reports));

    // Per-example predictions with the conditional-label wire codec
    // (toxic = 1, non-toxic = 0, irrelevant = -1).
    const auto labels = to_conditional_labels(dataset);
    const BranchTasks tasks = classification_tasks(dataset, LabelSchema::Conditional);
    const auto predictions = predict(model, tasks.features, args.threshold);
    const auto names = dataset.branch_names();
    std::string csv = "id,branch,y_true,y_pred\n";
    for (std::size_t b = 0; b < names.size(); ++b) {
        for (std::size_t i = 0; i < dataset.examples.size(); ++i) {
            csv += std::to_string(i) + "," + names[b] + "," +
                   std::to_string(to_int(labels[b][i])) + "," +
                   std::to_string(static_cast<int>(predictions[b][i])) + "\n";
        }
    }
    write_text(out_dir / "predictions.csv", csv);

    for (const auto& report : reports) {
        std::printf("%-10s acc=%.4f recall_T=%s\n", report.branch.c_str(), report.accuracy,
                    report.recall_toxic ? std::to_string(*report.recall_toxic).c_str() : "NA");
    }
    for (const auto& [pair, gap] : gaps) {
        std::printf("eo_gap %s = %.6f\n", pair.c_str(), gap);
    }
    std::printf("reports written under %s\n", out_dir.string().c_str());
    return kExitSuccess;
}

// ---------------------------------------------------------------------------
// inspect-cs
// ---------------------------------------------------------------------------

struct InspectArgs {
    std::string model_path;
    std::string out;
};

int cmd_inspect_cs(const InspectArgs& args) {
    const MtlModel model = load_model(args.model_path);
    const CsInspection inspection = inspect_cs(model);
    for (std::size_t u = 0; u < inspection.matrices.size(); ++u) {
        const Matrix& m = inspection.matrices[u];
        std::printf("unit %zu (identity deviation %.6f, asymmetry %.6f):\n", u,
                    inspection.identity_deviation[u], inspection.asymmetry[u]);
        for (std::size_t i = 0; i < m.rows; ++i) {
            for (std::size_t c = 0; c < m.cols; ++c) {
                std::printf(" %10.6f", m.at(i, c));
            }
            std::printf("\n");
        }
    }
    if (!args.out.empty()) {
        fs::create_directories(args.out);
        write_json(fs::path(args.out) / "cs.json", cs_inspection_to_json(inspection));
    }
    return kExitSuccess;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"condmtl: multi-task toxicity classification engine with masked "
                 "per-branch losses"};
    app.require_subcommand(1);

    ParamsArgs params_args;
    auto* params = app.add_subcommand("params", "Print trainable-parameter counts per variant");
    params->add_option("--input-dim", params_args.input_dim, "Feature dimension F");
    params->add_option("--shared", params_args.shared, "Shared layer widths");
    params->add_option("--heads", params_args.heads, "Head layer widths (must end in 1)");
    params->add_option("--branches", params_args.branches, "Number of branches (K+1)");

    BenchArgs bench_args;
    auto* bench = app.add_subcommand("bench", "Run a synthetic two-group benchmark");
    bench->add_option("--task", bench_args.task, "Benchmark task")
        ->check(CLI::IsMember({"regression", "regression-independent", "classification"}));
    bench->add_option("--variant", bench_args.variant, "Model variant")
        ->check(CLI::IsMember({"stacked-stl", "trad-mtl", "cond-mtl", "cs-mtl"}));
    bench->add_option("--seed", bench_args.seed, "Base seed (run r uses seed + r)");
    bench->add_option("--runs", bench_args.runs, "Number of independent runs")
        ->check(CLI::PositiveNumber);
    bench->add_option("--out", bench_args.out, "Output directory");
    bench->add_option("--contamination", bench_args.contamination,
                      "Baseline labeling for group-irrelevant examples")
        ->check(CLI::IsMember({"replicate", "force"}));
    bench->add_option("--epochs", bench_args.epochs, "Override the task's default epoch count");

    TrainArgs train_args;
    auto* train_cmd = app.add_subcommand("train", "Train a model from a JSON experiment config");
    train_cmd->add_option("--config", train_args.config_path, "Experiment config (JSON)")
        ->required();
    train_cmd->add_option("--out", train_args.out, "Output directory");

    EvalArgs eval_args;
    auto* eval_cmd = app.add_subcommand("eval", "Evaluate a saved model on a feature CSV");
    eval_cmd->add_option("--model", eval_args.model_path, "Model file")->required();
    eval_cmd->add_option("--data", eval_args.data_path, "Dataset CSV")->required();
    eval_cmd->add_option("--out", eval_args.out, "Output directory");
    eval_cmd->add_option("--threshold", eval_args.threshold, "Classification threshold");

    InspectArgs inspect_args;
    auto* inspect = app.add_subcommand("inspect-cs", "Print cross-stitch matrices and norms");
    inspect->add_option("--model", inspect_args.model_path, "Model file")->required();
    inspect->add_option("--out", inspect_args.out, "Optional output directory for cs.json");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsageError;
    }

    try {
        if (params->parsed()) {
            return cmd_params(params_args);
        }
        if (bench->parsed()) {
            return cmd_bench(bench_args);
        }
        if (train_cmd->parsed()) {
            return cmd_train(train_args);
        }
        if (eval_cmd->parsed()) {
            return cmd_eval(eval_args);
        }
        if (inspect->parsed()) {
            return cmd_inspect_cs(inspect_args);
        }
    } catch (const EngineError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntimeFailure;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << "\n";
        return kExitRuntimeFailure;
    }
    return kExitUsageError;
}
