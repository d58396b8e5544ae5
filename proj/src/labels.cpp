#include "condmtl/labels.hpp"

#include <string>

#include "condmtl/error.hpp"

namespace condmtl {

ConditionalLabel conditional_label_from_int(int value) {
    switch (value) {
        case 1:
            return ConditionalLabel::Toxic;
        case 0:
            return ConditionalLabel::NonToxic;
        case -1:
            return ConditionalLabel::Irrelevant;
        default:
            throw ParseError("conditional label code must be 1, 0 or -1, got " +
                                  std::to_string(value));
    }
}

std::vector<std::string> GroupedDataset::branch_names() const {
    std::vector<std::string> names;
    names.reserve(n_branches());
    names.emplace_back("all");
    for (const auto& g : group_names) {
        names.push_back(g);
    }
    return names;
}

void validate_dataset(const GroupedDataset& dataset) {
    const std::size_t k = dataset.n_groups();
    const std::size_t f = dataset.feature_dim();
    for (std::size_t i = 0; i < dataset.examples.size(); ++i) {
        const auto& ex = dataset.examples[i];
        if (ex.group_flags.size() != k) {
            throw ValidationError("example " + std::to_string(i) + ": expected " +
                                  std::to_string(k) + " group flags, got " +
                                  std::to_string(ex.group_flags.size()));
        }
        if (ex.features.size() != f) {
            throw ValidationError("example " + std::to_string(i) +
                                  ": inconsistent feature dimension " +
                                  std::to_string(ex.features.size()) + " vs " + std::to_string(f));
        }
        bool any = false;
        for (std::uint8_t flag : ex.group_flags) {
            if (flag) {
                any = true;
                break;
            }
        }
        if (!any) {
            throw ValidationError("example " + std::to_string(i) + ": targets no group");
        }
    }
}

std::vector<std::vector<ConditionalLabel>> to_conditional_labels(const GroupedDataset& dataset) {
    const std::size_t n = dataset.examples.size();
    std::vector<std::vector<ConditionalLabel>> branches(dataset.n_branches(),
                                                        std::vector<ConditionalLabel>(n));
    for (std::size_t i = 0; i < n; ++i) {
        const auto& ex = dataset.examples[i];
        const ConditionalLabel own =
            ex.toxic ? ConditionalLabel::Toxic : ConditionalLabel::NonToxic;
        branches[0][i] = own;
        for (std::size_t k = 0; k < dataset.n_groups(); ++k) {
            branches[k + 1][i] = ex.group_flags[k] ? own : ConditionalLabel::Irrelevant;
        }
    }
    return branches;
}

std::vector<std::vector<std::uint8_t>> to_traditional_labels(const GroupedDataset& dataset) {
    const std::size_t n = dataset.examples.size();
    std::vector<std::vector<std::uint8_t>> branches(dataset.n_branches(),
                                                    std::vector<std::uint8_t>(n));
    for (std::size_t i = 0; i < n; ++i) {
        const auto& ex = dataset.examples[i];
        const std::uint8_t own = ex.toxic ? 1 : 0;
        branches[0][i] = own;
        for (std::size_t k = 0; k < dataset.n_groups(); ++k) {
            // The contaminating assignment: group-irrelevant posts become non-toxic.
            branches[k + 1][i] = ex.group_flags[k] ? own : 0;
        }
    }
    return branches;
}

ClassWeights compute_class_weights(std::span<const ConditionalLabel> labels) {
    std::size_t n_toxic = 0;
    std::size_t n_non_toxic = 0;
    for (ConditionalLabel label : labels) {
        if (label == ConditionalLabel::Toxic) {
            ++n_toxic;
        } else if (label == ConditionalLabel::NonToxic) {
            ++n_non_toxic;
        }
    }
    if (n_toxic == 0 || n_non_toxic == 0) {
        throw DegenerateClassError("class weights undefined: relevant subset has " +
                                   std::to_string(n_toxic) + " toxic and " +
                                   std::to_string(n_non_toxic) + " non-toxic examples");
    }
    const double n_relevant = static_cast<double>(n_toxic + n_non_toxic);
    return ClassWeights{
        .non_toxic = n_relevant / (2.0 * static_cast<double>(n_non_toxic)),
        .toxic = n_relevant / (2.0 * static_cast<double>(n_toxic)),
    };
}

ContaminationReport contamination_report(const GroupedDataset& dataset) {
    ContaminationReport report;
    report.injected_non_toxic.assign(dataset.n_groups(), 0);
    for (const auto& ex : dataset.examples) {
        for (std::size_t k = 0; k < dataset.n_groups(); ++k) {
            if (!ex.group_flags[k]) {
                ++report.injected_non_toxic[k];
            }
        }
    }
    if (dataset.n_groups() == 2) {
        RegionCounts regions;
        for (const auto& ex : dataset.examples) {
            const bool g0 = ex.group_flags[0] != 0;
            const bool g1 = ex.group_flags[1] != 0;
            if (g0 && g1) {
                (ex.toxic ? regions.c : regions.d)++;
            } else if (g0) {
                (ex.toxic ? regions.a : regions.b)++;
            } else if (g1) {
                (ex.toxic ? regions.p : regions.q)++;
            }
        }
        report.regions = regions;
    }
    return report;
}

}  // namespace condmtl
