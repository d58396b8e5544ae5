#ifndef CONDMTL_REPORT_JSON_HPP
#define CONDMTL_REPORT_JSON_HPP

#include <json.hpp>

#include "condmtl/benchmarks.hpp"
#include "condmtl/metrics.hpp"
#include "condmtl/model.hpp"
#include "condmtl/train.hpp"

namespace condmtl {

/// Branch report with the confusion matrix as a 2×2 block, per-branch
/// percentages, and the color legend used by the confusion-matrix figures
/// (tn=cyan, fp=blue, fn=orange, tp=red). Undefined metrics serialize as null.
nlohmann::json report_to_json(const BranchReport& report);
nlohmann::json reports_to_json(const std::vector<BranchReport>& reports);

nlohmann::json aggregate_to_json(const RunAggregate& aggregate);

nlohmann::json cs_inspection_to_json(const CsInspection& inspection);

nlohmann::json trajectory_to_json(const TrainResult& result);

/// Benchmark summary: probe errors or branch reports plus cross-stitch norms.
/// Deliberately timing-free so identical runs serialize byte-identically.
nlohmann::json benchmark_to_json(const BenchmarkResult& result);

}  // namespace condmtl

#endif  // CONDMTL_REPORT_JSON_HPP
