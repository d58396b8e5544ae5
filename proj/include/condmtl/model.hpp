#ifndef CONDMTL_MODEL_HPP
#define CONDMTL_MODEL_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "condmtl/dense_layer.hpp"
#include "condmtl/matrix.hpp"

namespace condmtl {

enum class ModelVariant { StackedStl, TradMtl, CondMtl, CsMtl };

std::string to_string(ModelVariant variant);
ModelVariant variant_from_string(const std::string& name);

/// Network shape shared by all variants. For StackedStl and CsMtl the shared
/// widths are folded into every independent stream, so the built model has no
/// shared trunk; TradMtl and CondMtl run the trunk once and branch afterwards.
struct ArchitectureSpec {
    std::size_t input_dim{0};
    std::vector<std::size_t> shared_dims;
    std::vector<std::size_t> head_dims;  // must end in width 1
    std::size_t n_branches{0};
    ModelVariant variant{ModelVariant::CondMtl};
    Activation hidden_activation{Activation::Relu};
    Activation output_activation{Activation::Sigmoid};
};

void validate_spec(const ArchitectureSpec& spec);

bool has_shared_trunk(ModelVariant variant);

/// Trainable parameters: in·out + out per dense layer, plus n_branches² per
/// cross-stitch unit (one unit between consecutive stream depths for CsMtl).
std::size_t count_parameters(const ArchitectureSpec& spec);

/// Trainable mixing matrix across same-depth stream activations.
struct CrossStitchUnit {
    Matrix matrix;  // n_branches × n_branches, initialized to identity
};

struct MtlModel {
    ArchitectureSpec spec;
    std::vector<DenseLayer> shared_layers;                 // empty for stacked/cs
    std::vector<std::vector<DenseLayer>> branch_layers;    // [branch][depth]
    std::vector<CrossStitchUnit> cs_units;                 // cs variant only
    std::uint64_t rng_seed{0};

    std::size_t parameter_count() const;
};

/// Seeded deterministic construction: Glorot-uniform dense weights, zero
/// biases, identity cross-stitch units.
MtlModel build(const ArchitectureSpec& spec, std::uint64_t seed);

struct ForwardCache {
    std::vector<DenseCache> shared;
    std::vector<std::vector<DenseCache>> branches;  // [branch][depth]
};

/// Per-branch sigmoid/linear outputs for a batch, one value per example.
std::vector<std::vector<double>> forward(const MtlModel& model, const Matrix& batch);
std::vector<std::vector<double>> forward(const MtlModel& model, const Matrix& batch,
                                         ForwardCache& cache);

/// Binary decisions: label 1 iff output >= threshold (ties predict toxic).
std::vector<std::vector<std::uint8_t>> predict(const MtlModel& model, const Matrix& batch,
                                               double threshold);

struct CsInspection {
    std::vector<Matrix> matrices;
    std::vector<double> identity_deviation;  // ‖CS − I‖_F per unit
    std::vector<double> asymmetry;           // ‖CS − CSᵀ‖_F per unit
};

/// Throws VariantError for models without cross-stitch units.
CsInspection inspect_cs(const MtlModel& model);

/// Largest |off-diagonal| entry in the given task's row or column, maximized
/// over all units.
double max_off_diagonal_for_task(const CsInspection& inspection, std::size_t task_index);

/// Stable flattened view over every trainable parameter, in the order
/// trunk layers, branch layers (branch-major), cross-stitch units; each dense
/// layer contributes row-major weights then bias.
std::vector<double*> parameter_pointers(MtlModel& model);

}  // namespace condmtl

#endif  // CONDMTL_MODEL_HPP
