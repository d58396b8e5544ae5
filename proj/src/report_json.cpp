#include "condmtl/report_json.hpp"

namespace condmtl {

namespace {

nlohmann::json optional_metric(const std::optional<double>& v) {
    if (!v) {
        return nullptr;
    }
    return *v;
}

}  // namespace

nlohmann::json report_to_json(const BranchReport& report) {
    nlohmann::json j;
    j["branch"] = report.branch;
    j["confusion"] = {{"tn", report.confusion.tn},
                      {"fp", report.confusion.fp},
                      {"fn", report.confusion.fn},
                      {"tp", report.confusion.tp}};
    j["legend"] = {{"tn", "cyan"}, {"fp", "blue"}, {"fn", "orange"}, {"tp", "red"}};
    const double total = static_cast<double>(report.confusion.total());
    j["confusion_pct"] = {
        {"tn", as_percent(static_cast<double>(report.confusion.tn) / total)},
        {"fp", as_percent(static_cast<double>(report.confusion.fp) / total)},
        {"fn", as_percent(static_cast<double>(report.confusion.fn) / total)},
        {"tp", as_percent(static_cast<double>(report.confusion.tp) / total)}};
    j["accuracy"] = report.accuracy;
    j["recall_T"] = optional_metric(report.recall_toxic);
    j["recall_NT"] = optional_metric(report.recall_non_toxic);
    j["precision_T"] = optional_metric(report.precision_toxic);
    j["precision_NT"] = optional_metric(report.precision_non_toxic);
    j["f1_T"] = optional_metric(report.f1_toxic);
    j["f1_NT"] = optional_metric(report.f1_non_toxic);
    nlohmann::json pct;
    pct["accuracy"] = as_percent(report.accuracy);
    if (report.recall_toxic) {
        pct["recall_T"] = as_percent(*report.recall_toxic);
    }
    if (report.recall_non_toxic) {
        pct["recall_NT"] = as_percent(*report.recall_non_toxic);
    }
    if (report.precision_toxic) {
        pct["precision_T"] = as_percent(*report.precision_toxic);
    }
    if (report.precision_non_toxic) {
        pct["precision_NT"] = as_percent(*report.precision_non_toxic);
    }
    if (report.f1_toxic) {
        pct["f1_T"] = as_percent(*report.f1_toxic);
    }
    if (report.f1_non_toxic) {
        pct["f1_NT"] = as_percent(*report.f1_non_toxic);
    }
    j["percent"] = pct;
    return j;
}

nlohmann::json reports_to_json(const std::vector<BranchReport>& reports) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& report : reports) {
        arr.push_back(report_to_json(report));
    }
    return arr;
}

nlohmann::json aggregate_to_json(const RunAggregate& aggregate) {
    nlohmann::json j;
    for (const auto& [branch, metrics] : aggregate) {
        nlohmann::json m;
        for (const auto& [metric, stat] : metrics) {
            m[metric] = {{"mean", stat.mean}, {"std", stat.stddev}};
        }
        j[branch] = m;
    }
    return j;
}

nlohmann::json cs_inspection_to_json(const CsInspection& inspection) {
    nlohmann::json units = nlohmann::json::array();
    for (std::size_t u = 0; u < inspection.matrices.size(); ++u) {
        const Matrix& m = inspection.matrices[u];
        nlohmann::json rows = nlohmann::json::array();
        for (std::size_t i = 0; i < m.rows; ++i) {
            nlohmann::json row = nlohmann::json::array();
            for (std::size_t c = 0; c < m.cols; ++c) {
                row.push_back(m.at(i, c));
            }
            rows.push_back(row);
        }
        units.push_back({{"matrix", rows},
                         {"identity_deviation", inspection.identity_deviation[u]},
                         {"asymmetry", inspection.asymmetry[u]}});
    }
    return units;
}

nlohmann::json trajectory_to_json(const TrainResult& result) {
    nlohmann::json arr = nlohmann::json::array();
    for (std::size_t e = 0; e < result.trajectory.size(); ++e) {
        arr.push_back({{"epoch", e},
                       {"total", result.trajectory[e].total_mean},
                       {"branches", result.trajectory[e].branch_mean}});
    }
    return arr;
}

nlohmann::json benchmark_to_json(const BenchmarkResult& result) {
    nlohmann::json j;
    j["task"] = to_string(result.task);
    j["variant"] = to_string(result.variant);
    j["seed"] = result.seed;
    j["branches"] = result.branch_names;
    if (!result.reports.empty()) {
        j["reports"] = reports_to_json(result.reports);
    }
    if (!result.signed_mean_error_in_domain.empty()) {
        for (std::size_t b = 0; b < result.branch_names.size(); ++b) {
            nlohmann::json e;
            e["signed_mean_error_in_domain"] = result.signed_mean_error_in_domain[b];
            e["mse_in_domain"] = result.mse_in_domain[b];
            e["max_relative_error_all_probes"] = result.max_relative_error_all_probes[b];
            j["errors"][result.branch_names[b]] = e;
        }
    }
    if (result.cs) {
        j["cross_stitch"] = cs_inspection_to_json(*result.cs);
        j["max_off_diagonal_task_a"] = max_off_diagonal_for_task(*result.cs, 1);
    }
    const auto& traj = result.training.trajectory;
    if (!traj.empty()) {
        j["loss_first_epoch"] = traj.front().total_mean;
        j["loss_final_epoch"] = traj.back().total_mean;
    }
    return j;
}

}  // namespace condmtl
