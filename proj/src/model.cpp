#include "condmtl/model.hpp"

#include <cmath>
#include <string>

#include "condmtl/error.hpp"

namespace condmtl {

namespace {

std::size_t chain_parameters(std::size_t in_dim, const std::vector<std::size_t>& widths) {
    std::size_t total = 0;
    std::size_t in = in_dim;
    for (std::size_t w : widths) {
        total += in * w + w;
        in = w;
    }
    return total;
}

/// Layer widths of one independent stream (stacked/cs variants).
std::vector<std::size_t> stream_dims(const ArchitectureSpec& spec) {
    std::vector<std::size_t> dims = spec.shared_dims;
    dims.insert(dims.end(), spec.head_dims.begin(), spec.head_dims.end());
    return dims;
}

std::vector<DenseLayer> make_chain(std::size_t in_dim, const std::vector<std::size_t>& widths,
                                   Activation hidden, Activation output, bool ends_network,
                                   Rng& rng) {
    std::vector<DenseLayer> layers;
    layers.reserve(widths.size());
    std::size_t in = in_dim;
    for (std::size_t i = 0; i < widths.size(); ++i) {
        const bool last = ends_network && i + 1 == widths.size();
        DenseLayer layer(in, widths[i], last ? output : hidden);
        layer.init_glorot(rng);
        layers.push_back(std::move(layer));
        in = widths[i];
    }
    return layers;
}

}  // namespace

std::string to_string(ModelVariant variant) {
    switch (variant) {
        case ModelVariant::StackedStl:
            return "stacked-stl";
        case ModelVariant::TradMtl:
            return "trad-mtl";
        case ModelVariant::CondMtl:
            return "cond-mtl";
        case ModelVariant::CsMtl:
            return "cs-mtl";
    }
    return "unknown";
}

ModelVariant variant_from_string(const std::string& name) {
    if (name == "stacked-stl") {
        return ModelVariant::StackedStl;
    }
    if (name == "trad-mtl") {
        return ModelVariant::TradMtl;
    }
    if (name == "cond-mtl") {
        return ModelVariant::CondMtl;
    }
    if (name == "cs-mtl") {
        return ModelVariant::CsMtl;
    }
    throw ConfigError("unknown model variant: " + name);
}

bool has_shared_trunk(ModelVariant variant) {
    return variant == ModelVariant::TradMtl || variant == ModelVariant::CondMtl;
}

void validate_spec(const ArchitectureSpec& spec) {
    if (spec.input_dim == 0) {
        throw ConfigError("input_dim must be positive");
    }
    if (spec.n_branches == 0) {
        throw ConfigError("n_branches must be positive");
    }
    if (spec.head_dims.empty() || spec.head_dims.back() != 1) {
        throw ConfigError("head_dims must end in a width-1 output layer");
    }
    for (std::size_t w : spec.shared_dims) {
        if (w == 0) {
            throw ConfigError("shared layer widths must be positive");
        }
    }
    for (std::size_t w : spec.head_dims) {
        if (w == 0) {
            throw ConfigError("head layer widths must be positive");
        }
    }
}

std::size_t count_parameters(const ArchitectureSpec& spec) {
    validate_spec(spec);
    if (has_shared_trunk(spec.variant)) {
        const std::size_t trunk = chain_parameters(spec.input_dim, spec.shared_dims);
        const std::size_t head_in =
            spec.shared_dims.empty() ? spec.input_dim : spec.shared_dims.back();
        return trunk + spec.n_branches * chain_parameters(head_in, spec.head_dims);
    }
    const auto dims = stream_dims(spec);
    std::size_t total = spec.n_branches * chain_parameters(spec.input_dim, dims);
    if (spec.variant == ModelVariant::CsMtl && dims.size() > 1) {
        total += (dims.size() - 1) * spec.n_branches * spec.n_branches;
    }
    return total;
}

std::size_t MtlModel::parameter_count() const {
    std::size_t total = 0;
    for (const auto& layer : shared_layers) {
        total += layer.parameter_count();
    }
    for (const auto& branch : branch_layers) {
        for (const auto& layer : branch) {
            total += layer.parameter_count();
        }
    }
    for (const auto& unit : cs_units) {
        total += unit.matrix.size();
    }
    return total;
}

MtlModel build(const ArchitectureSpec& spec, std::uint64_t seed) {
    validate_spec(spec);
    MtlModel model;
    model.spec = spec;
    model.rng_seed = seed;
    Rng rng(seed);

    if (has_shared_trunk(spec.variant)) {
        model.shared_layers = make_chain(spec.input_dim, spec.shared_dims,
                                         spec.hidden_activation, spec.output_activation,
                                         /*ends_network=*/false, rng);
        const std::size_t head_in =
            spec.shared_dims.empty() ? spec.input_dim : spec.shared_dims.back();
        for (std::size_t b = 0; b < spec.n_branches; ++b) {
            model.branch_layers.push_back(make_chain(head_in, spec.head_dims,
                                                     spec.hidden_activation,
                                                     spec.output_activation,
                                                     /*ends_network=*/true, rng));
        }
    } else {
        const auto dims = stream_dims(spec);
        for (std::size_t b = 0; b < spec.n_branches; ++b) {
            model.branch_layers.push_back(make_chain(spec.input_dim, dims,
                                                     spec.hidden_activation,
                                                     spec.output_activation,
                                                     /*ends_network=*/true, rng));
        }
        if (spec.variant == ModelVariant::CsMtl && dims.size() > 1) {
            for (std::size_t d = 0; d + 1 < dims.size(); ++d) {
                model.cs_units.push_back(CrossStitchUnit{Matrix::identity(spec.n_branches)});
            }
        }
    }
    return model;
}

namespace {

/// Mixed activations at one stitch depth: out_i = Σ_j CS[i][j] · a_j.
std::vector<Matrix> apply_cross_stitch(const Matrix& cs, const std::vector<Matrix>& streams) {
    std::vector<Matrix> mixed(streams.size());
    for (std::size_t i = 0; i < streams.size(); ++i) {
        Matrix acc(streams[i].rows, streams[i].cols);
        for (std::size_t j = 0; j < streams.size(); ++j) {
            const double w = cs.at(i, j);
            if (w == 0.0) {
                continue;
            }
            for (std::size_t t = 0; t < acc.size(); ++t) {
                acc.data[t] += w * streams[j].data[t];
            }
        }
        mixed[i] = std::move(acc);
    }
    return mixed;
}

}  // namespace

std::vector<std::vector<double>> forward(const MtlModel& model, const Matrix& batch) {
    ForwardCache cache;
    return forward(model, batch, cache);
}

std::vector<std::vector<double>> forward(const MtlModel& model, const Matrix& batch,
                                         ForwardCache& cache) {
    if (batch.cols != model.spec.input_dim) {
        throw ShapeError("forward: batch has " + std::to_string(batch.cols) +
                         " features, model expects " + std::to_string(model.spec.input_dim));
    }
    const std::size_t n_branches = model.branch_layers.size();
    cache.shared.clear();
    cache.branches.assign(n_branches, {});

    std::vector<Matrix> branch_outputs(n_branches);
    if (has_shared_trunk(model.spec.variant)) {
        cache.shared.resize(model.shared_layers.size());
        Matrix current = batch;
        for (std::size_t i = 0; i < model.shared_layers.size(); ++i) {
            current = dense_forward(model.shared_layers[i], current, cache.shared[i]);
        }
        for (std::size_t b = 0; b < n_branches; ++b) {
            cache.branches[b].resize(model.branch_layers[b].size());
            Matrix head = current;
            for (std::size_t i = 0; i < model.branch_layers[b].size(); ++i) {
                head = dense_forward(model.branch_layers[b][i], head, cache.branches[b][i]);
            }
            branch_outputs[b] = std::move(head);
        }
    } else {
        const std::size_t depth = model.branch_layers.empty() ? 0 : model.branch_layers[0].size();
        for (std::size_t b = 0; b < n_branches; ++b) {
            cache.branches[b].resize(depth);
        }
        std::vector<Matrix> current(n_branches, batch);
        for (std::size_t d = 0; d < depth; ++d) {
            std::vector<Matrix> outs(n_branches);
            for (std::size_t b = 0; b < n_branches; ++b) {
                outs[b] = dense_forward(model.branch_layers[b][d], current[b],
                                        cache.branches[b][d]);
            }
            if (model.spec.variant == ModelVariant::CsMtl && d + 1 < depth) {
                current = apply_cross_stitch(model.cs_units[d].matrix, outs);
            } else {
                current = std::move(outs);
            }
        }
        branch_outputs = std::move(current);
    }

    std::vector<std::vector<double>> predictions(n_branches);
    for (std::size_t b = 0; b < n_branches; ++b) {
        const Matrix& out = branch_outputs[b];
        predictions[b].resize(out.rows);
        for (std::size_t i = 0; i < out.rows; ++i) {
            predictions[b][i] = out.at(i, 0);
        }
    }
    return predictions;
}

std::vector<std::vector<std::uint8_t>> predict(const MtlModel& model, const Matrix& batch,
                                               double threshold) {
    const auto outputs = forward(model, batch);
    std::vector<std::vector<std::uint8_t>> labels(outputs.size());
    for (std::size_t b = 0; b < outputs.size(); ++b) {
        labels[b].resize(outputs[b].size());
        for (std::size_t i = 0; i < outputs[b].size(); ++i) {
            labels[b][i] = outputs[b][i] >= threshold ? 1 : 0;
        }
    }
    return labels;
}

CsInspection inspect_cs(const MtlModel& model) {
    if (model.spec.variant != ModelVariant::CsMtl) {
        throw VariantError("inspect_cs requires a cs-mtl model, got " +
                           to_string(model.spec.variant));
    }
    CsInspection inspection;
    for (const auto& unit : model.cs_units) {
        const std::size_t n = unit.matrix.rows;
        Matrix minus_identity = unit.matrix;
        for (std::size_t i = 0; i < n; ++i) {
            minus_identity.at(i, i) -= 1.0;
        }
        Matrix minus_transpose = unit.matrix;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                minus_transpose.at(i, j) -= unit.matrix.at(j, i);
            }
        }
        inspection.matrices.push_back(unit.matrix);
        inspection.identity_deviation.push_back(frobenius_norm(minus_identity));
        inspection.asymmetry.push_back(frobenius_norm(minus_transpose));
    }
    return inspection;
}

double max_off_diagonal_for_task(const CsInspection& inspection, std::size_t task_index) {
    double max_abs = 0.0;
    for (const auto& m : inspection.matrices) {
        for (std::size_t j = 0; j < m.cols; ++j) {
            if (j != task_index) {
                max_abs = std::max(max_abs, std::fabs(m.at(task_index, j)));
                max_abs = std::max(max_abs, std::fabs(m.at(j, task_index)));
            }
        }
    }
    return max_abs;
}

std::vector<double*> parameter_pointers(MtlModel& model) {
    std::vector<double*> params;
    params.reserve(model.parameter_count());
    auto add_layer = [&params](DenseLayer& layer) {
        for (double& w : layer.weights.data) {
            params.push_back(&w);
        }
        for (double& b : layer.bias) {
            params.push_back(&b);
        }
    };
    for (auto& layer : model.shared_layers) {
        add_layer(layer);
    }
    for (auto& branch : model.branch_layers) {
        for (auto& layer : branch) {
            add_layer(layer);
        }
    }
    for (auto& unit : model.cs_units) {
        for (double& v : unit.matrix.data) {
            params.push_back(&v);
        }
    }
    return params;
}

}  // namespace condmtl
