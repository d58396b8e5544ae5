#ifndef CONDMTL_METRICS_HPP
#define CONDMTL_METRICS_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "condmtl/conditional_label.hpp"

namespace condmtl {

struct ConfusionMatrix {
    std::size_t tn{0};
    std::size_t fp{0};
    std::size_t fn{0};
    std::size_t tp{0};

    std::size_t total() const { return tn + fp + fn + tp; }
};

/// Per-branch classification statistics over the branch-relevant examples.
/// Metrics with a zero denominator (a class absent from truth or predictions)
/// are reported as absent values rather than silently as 0.
struct BranchReport {
    std::string branch;
    ConfusionMatrix confusion;
    std::optional<double> recall_toxic;
    std::optional<double> recall_non_toxic;
    std::optional<double> precision_toxic;
    std::optional<double> precision_non_toxic;
    std::optional<double> f1_toxic;
    std::optional<double> f1_non_toxic;
    double accuracy{0.0};
};

/// Counts and statistics restricted to indices whose label is not Irrelevant.
/// Throws EmptyBatchError if no index is relevant.
BranchReport evaluate_branch(std::string branch, std::span<const ConditionalLabel> y_true,
                             std::span<const std::uint8_t> y_pred);

/// Equality-of-opportunity gap: absolute difference of two recall values
/// (fraction or percent, unit-consistent).
double eo_gap(double recall_a, double recall_b);

struct MetricStat {
    double mean{0.0};
    double stddev{0.0};  // population (divide-by-R) standard deviation
};

/// Sample mean and population standard deviation of a metric sequence.
MetricStat compute_stat(std::span<const double> values);

/// branch name → metric name → mean/std across runs.
using RunAggregate = std::map<std::string, std::map<std::string, MetricStat>>;

/// Aggregates homogeneous per-run report sets. Metrics undefined in a run are
/// skipped for that run; a metric undefined everywhere is omitted.
RunAggregate aggregate_runs(const std::vector<std::vector<BranchReport>>& runs);

/// Fraction → percentage rounded to one decimal.
double as_percent(double fraction);

/// CSV with one row per branch × metric; undefined metrics serialize as "NA".
std::string reports_to_csv(std::span<const BranchReport> reports);

/// CSV of the aggregate: branch,metric,mean,std.
std::string aggregate_to_csv(const RunAggregate& aggregate);

}  // namespace condmtl

#endif  // CONDMTL_METRICS_HPP
