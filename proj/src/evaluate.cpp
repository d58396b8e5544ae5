#include "condmtl/evaluate.hpp"

#include "condmtl/error.hpp"
#include "condmtl/train.hpp"

namespace condmtl {

std::vector<BranchReport> evaluate_model(const MtlModel& model, const GroupedDataset& dataset,
                                         double threshold) {
    validate_dataset(dataset);
    if (dataset.feature_dim() != model.spec.input_dim) {
        throw SchemaError("dataset has " + std::to_string(dataset.feature_dim()) +
                          " features, model expects " + std::to_string(model.spec.input_dim));
    }
    if (dataset.n_branches() != model.branch_layers.size()) {
        throw SchemaError("dataset has " + std::to_string(dataset.n_branches()) +
                          " branches, model has " + std::to_string(model.branch_layers.size()));
    }
    const BranchTasks tasks = classification_tasks(dataset, LabelSchema::Conditional);
    const auto labels = to_conditional_labels(dataset);
    const auto predictions = predict(model, tasks.features, threshold);
    const auto names = dataset.branch_names();
    std::vector<BranchReport> reports;
    reports.reserve(names.size());
    for (std::size_t b = 0; b < names.size(); ++b) {
        reports.push_back(evaluate_branch(names[b], labels[b], predictions[b]));
    }
    return reports;
}

std::map<std::string, double> eo_gaps(const std::vector<BranchReport>& reports) {
    std::map<std::string, double> gaps;
    for (std::size_t i = 1; i < reports.size(); ++i) {
        for (std::size_t j = i + 1; j < reports.size(); ++j) {
            if (reports[i].recall_toxic && reports[j].recall_toxic) {
                gaps[reports[i].branch + "|" + reports[j].branch] =
                    eo_gap(*reports[i].recall_toxic, *reports[j].recall_toxic);
            }
        }
    }
    return gaps;
}

}  // namespace condmtl
