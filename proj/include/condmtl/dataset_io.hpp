#ifndef CONDMTL_DATASET_IO_HPP
#define CONDMTL_DATASET_IO_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "condmtl/labels.hpp"
#include "condmtl/model.hpp"
#include "condmtl/train.hpp"

namespace condmtl {

/// Feature dataset CSV schema (UTF-8, header required):
///   id, f0..f{F-1}, targets_<group> (0/1, one per group), y (0/1)
/// Every row must set at least one group flag.
GroupedDataset load_dataset(const std::filesystem::path& path);
void save_dataset(const GroupedDataset& dataset, const std::filesystem::path& path);

struct BranchCounts {
    std::size_t toxic{0};
    std::size_t non_toxic{0};
    std::size_t total{0};
};

/// Per-branch counts: "all" over every row, each group over its flag-true rows.
std::vector<std::pair<std::string, BranchCounts>> split_summary(const GroupedDataset& dataset);

/// Versioned little-endian binary model file; weight round-trips are
/// bit-exact.
void save_model(const MtlModel& model, const std::filesystem::path& path);
MtlModel load_model(const std::filesystem::path& path);

struct ExperimentConfig {
    ModelVariant variant{ModelVariant::CondMtl};
    std::vector<std::size_t> shared_dims{512};
    std::vector<std::size_t> head_dims{128, 64, 1};
    Activation hidden_activation{Activation::Relu};
    Activation output_activation{Activation::Sigmoid};
    std::uint64_t seed{0};
    std::size_t runs{1};
    std::size_t epochs{10};
    std::size_t steps_per_epoch{1000};
    std::size_t batch_size{32};
    double learning_rate{1e-5};
    WeightingMode weighting{WeightingMode::Global};
    double threshold{0.5};
    std::string train_path;
    std::optional<std::string> test_path;
    /// Empty = schema chosen by the model variant.
    std::optional<LabelSchema> label_schema;

    TrainConfig train_config() const;
};

ExperimentConfig load_config(const std::filesystem::path& path);
void save_config(const ExperimentConfig& config, const std::filesystem::path& path);
void validate_config(const ExperimentConfig& config);

}  // namespace condmtl

#endif  // CONDMTL_DATASET_IO_HPP
