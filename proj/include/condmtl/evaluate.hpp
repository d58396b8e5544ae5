#ifndef CONDMTL_EVALUATE_HPP
#define CONDMTL_EVALUATE_HPP

#include <map>
#include <string>
#include <vector>

#include "condmtl/labels.hpp"
#include "condmtl/metrics.hpp"
#include "condmtl/model.hpp"

namespace condmtl {

/// Per-branch reports of model predictions against the dataset's conditional
/// label views (each branch evaluated over its relevant examples only).
std::vector<BranchReport> evaluate_model(const MtlModel& model, const GroupedDataset& dataset,
                                         double threshold);

/// Pairwise equality-of-opportunity gaps between group branches (branch "all"
/// excluded), keyed "a|b"; pairs with an undefined toxic recall are skipped.
std::map<std::string, double> eo_gaps(const std::vector<BranchReport>& reports);

}  // namespace condmtl

#endif  // CONDMTL_EVALUATE_HPP
