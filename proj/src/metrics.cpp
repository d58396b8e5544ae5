#include "condmtl/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <string>

#include "condmtl/error.hpp"

namespace condmtl {

namespace {

std::optional<double> ratio(std::size_t numerator, std::size_t denominator) {
    if (denominator == 0) {
        return std::nullopt;
    }
    return static_cast<double>(numerator) / static_cast<double>(denominator);
}

std::optional<double> f1(std::optional<double> precision, std::optional<double> recall) {
    if (!precision || !recall) {
        return std::nullopt;
    }
    if (*precision + *recall == 0.0) {
        return 0.0;
    }
    return 2.0 * (*precision) * (*recall) / (*precision + *recall);
}

std::string format_value(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

BranchReport evaluate_branch(std::string branch, std::span<const ConditionalLabel> y_true,
                             std::span<const std::uint8_t> y_pred) {
    if (y_true.size() != y_pred.size()) {
        throw ShapeError("evaluate_branch: length mismatch " + std::to_string(y_true.size()) +
                         " vs " + std::to_string(y_pred.size()));
    }
    BranchReport report;
    report.branch = std::move(branch);
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        if (!is_relevant(y_true[i])) {
            continue;
        }
        const bool truth = y_true[i] == ConditionalLabel::Toxic;
        const bool pred = y_pred[i] != 0;
        if (truth && pred) {
            ++report.confusion.tp;
        } else if (truth) {
            ++report.confusion.fn;
        } else if (pred) {
            ++report.confusion.fp;
        } else {
            ++report.confusion.tn;
        }
    }
    const ConfusionMatrix& c = report.confusion;
    if (c.total() == 0) {
        throw EmptyBatchError("evaluate_branch '" + report.branch +
                              "': no relevant example to evaluate");
    }
    report.recall_toxic = ratio(c.tp, c.tp + c.fn);
    report.recall_non_toxic = ratio(c.tn, c.tn + c.fp);
    report.precision_toxic = ratio(c.tp, c.tp + c.fp);
    report.precision_non_toxic = ratio(c.tn, c.tn + c.fn);
    report.f1_toxic = f1(report.precision_toxic, report.recall_toxic);
    report.f1_non_toxic = f1(report.precision_non_toxic, report.recall_non_toxic);
    report.accuracy = static_cast<double>(c.tp + c.tn) / static_cast<double>(c.total());
    return report;
}

double eo_gap(double recall_a, double recall_b) {
    return std::fabs(recall_a - recall_b);
}

MetricStat compute_stat(std::span<const double> values) {
    if (values.empty()) {
        throw EmptyBatchError("compute_stat: no values");
    }
    double sum = 0.0;
    for (double v : values) {
        sum += v;
    }
    const double mean = sum / static_cast<double>(values.size());
    double sq = 0.0;
    for (double v : values) {
        sq += (v - mean) * (v - mean);
    }
    return MetricStat{mean, std::sqrt(sq / static_cast<double>(values.size()))};
}

namespace {

const std::vector<std::pair<std::string, std::optional<double> BranchReport::*>>&
optional_metrics() {
    static const std::vector<std::pair<std::string, std::optional<double> BranchReport::*>> m = {
        {"recall_T", &BranchReport::recall_toxic},
        {"recall_NT", &BranchReport::recall_non_toxic},
        {"precision_T", &BranchReport::precision_toxic},
        {"precision_NT", &BranchReport::precision_non_toxic},
        {"f1_T", &BranchReport::f1_toxic},
        {"f1_NT", &BranchReport::f1_non_toxic},
    };
    return m;
}

}  // namespace

RunAggregate aggregate_runs(const std::vector<std::vector<BranchReport>>& runs) {
    if (runs.empty()) {
        throw EmptyBatchError("aggregate_runs: no runs");
    }
    for (const auto& run : runs) {
        if (run.size() != runs.front().size()) {
            throw ShapeError("aggregate_runs: runs have different branch counts");
        }
        for (std::size_t b = 0; b < run.size(); ++b) {
            if (run[b].branch != runs.front()[b].branch) {
                throw ShapeError("aggregate_runs: branch sets differ across runs");
            }
        }
    }
    RunAggregate aggregate;
    for (std::size_t b = 0; b < runs.front().size(); ++b) {
        auto& per_metric = aggregate[runs.front()[b].branch];
        std::vector<double> acc;
        for (const auto& run : runs) {
            acc.push_back(run[b].accuracy);
        }
        per_metric["accuracy"] = compute_stat(acc);
        for (const auto& [name, member] : optional_metrics()) {
            std::vector<double> values;
            for (const auto& run : runs) {
                if (const auto& v = run[b].*member) {
                    values.push_back(*v);
                }
            }
            if (!values.empty()) {
                per_metric[name] = compute_stat(values);
            }
        }
    }
    return aggregate;
}

double as_percent(double fraction) {
    return std::round(fraction * 1000.0) / 10.0;
}

std::string reports_to_csv(std::span<const BranchReport> reports) {
    std::string csv = "branch,metric,value\n";
    for (const auto& report : reports) {
        auto row = [&csv, &report](const std::string& metric, const std::optional<double>& v) {
            csv += report.branch + "," + metric + "," + (v ? format_value(*v) : "NA") + "\n";
        };
        csv += report.branch + ",tn," + std::to_string(report.confusion.tn) + "\n";
        csv += report.branch + ",fp," + std::to_string(report.confusion.fp) + "\n";
        csv += report.branch + ",fn," + std::to_string(report.confusion.fn) + "\n";
        csv += report.branch + ",tp," + std::to_string(report.confusion.tp) + "\n";
        row("accuracy", report.accuracy);
        for (const auto& [name, member] : optional_metrics()) {
            row(name, report.*member);
        }
    }
    return csv;
}

std::string aggregate_to_csv(const RunAggregate& aggregate) {
    std::string csv = "branch,metric,mean,std\n";
    for (const auto& [branch, metrics] : aggregate) {
        for (const auto& [metric, stat] : metrics) {
            csv += branch + "," + metric + "," + format_value(stat.mean) + "," +
                   format_value(stat.stddev) + "\n";
        }
    }
    return csv;
}

}  // namespace condmtl
