#ifndef CONDMTL_LABELS_HPP
#define CONDMTL_LABELS_HPP

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "condmtl/conditional_label.hpp"
#include "condmtl/losses.hpp"

namespace condmtl {

/// One example with its overall toxicity label and per-group target flags.
/// The per-branch label views are derived, never stored: branch k's label is
/// the example's toxicity when it targets group k.
struct GroupedExample {
    std::vector<double> features;
    bool toxic{false};
    std::vector<std::uint8_t> group_flags;  // one per group
};

struct GroupedDataset {
    std::vector<std::string> group_names;
    std::vector<GroupedExample> examples;

    std::size_t n_groups() const { return group_names.size(); }
    /// Branch 0 is the group-agnostic "all" branch, then one branch per group.
    std::size_t n_branches() const { return group_names.size() + 1; }
    std::size_t feature_dim() const { return examples.empty() ? 0 : examples[0].features.size(); }
    std::vector<std::string> branch_names() const;
};

/// Throws DataFormatError if any example has no group flag, a flag vector of
/// the wrong length, or an inconsistent feature dimension.
void validate_dataset(const GroupedDataset& dataset);

/// Conditional labeling: branch "all" carries the overall label for every
/// example; branch k carries the toxicity label where the example targets
/// group k and Irrelevant elsewhere. Returned as [branch][example].
std::vector<std::vector<ConditionalLabel>> to_conditional_labels(const GroupedDataset& dataset);

/// Traditional labeling: like the conditional view, but group-irrelevant
/// examples are force-assigned non-toxic (0) instead of Irrelevant.
std::vector<std::vector<std::uint8_t>> to_traditional_labels(const GroupedDataset& dataset);

/// Balanced class weights over the relevant subset of a branch label vector:
/// w_c = n_relevant / (2 · count_c). Throws DegenerateClassError when either
/// class is absent from the relevant subset.
ClassWeights compute_class_weights(std::span<const ConditionalLabel> labels);

/// Region sizes of the two-group decomposition:
///   a: toxic, group-0 only        b: non-toxic, group-0 only
///   c: toxic, both groups         d: non-toxic, both groups
///   p: toxic, group-1 only        q: non-toxic, group-1 only
/// Traditional labeling assigns NT|group0 = b∪d∪p∪q instead of the true b∪d.
struct RegionCounts {
    std::size_t a{0}, b{0}, c{0}, d{0}, p{0}, q{0};

    std::size_t true_non_toxic_group0() const { return b + d; }
    std::size_t true_non_toxic_group1() const { return d + q; }
    std::size_t traditional_non_toxic_group0() const { return b + d + p + q; }
    std::size_t traditional_non_toxic_group1() const { return d + q + a + b; }
};

struct ContaminationReport {
    /// Per group branch: number of examples force-labeled non-toxic because
    /// they do not target the group (equals N − N_k).
    std::vector<std::size_t> injected_non_toxic;
    /// Populated only for K == 2.
    std::optional<RegionCounts> regions;
};

ContaminationReport contamination_report(const GroupedDataset& dataset);

}  // namespace condmtl

#endif  // CONDMTL_LABELS_HPP
