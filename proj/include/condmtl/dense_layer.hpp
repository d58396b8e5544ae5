#ifndef CONDMTL_DENSE_LAYER_HPP
#define CONDMTL_DENSE_LAYER_HPP

#include <cstddef>
#include <vector>

#include "condmtl/activation.hpp"
#include "condmtl/matrix.hpp"
#include "condmtl/rng.hpp"

namespace condmtl {

/// Fully connected layer: out = activation(input · W + b).
struct DenseLayer {
    Matrix weights;             // in_dim × out_dim
    std::vector<double> bias;   // out_dim
    Activation activation{Activation::Linear};

    DenseLayer() = default;
    DenseLayer(std::size_t in_dim, std::size_t out_dim, Activation act);

    std::size_t in_dim() const { return weights.rows; }
    std::size_t out_dim() const { return weights.cols; }
    std::size_t parameter_count() const { return weights.size() + bias.size(); }

    /// Glorot-uniform weights, zero bias.
    void init_glorot(Rng& rng);
};

/// Intermediate values kept from a forward pass for backpropagation.
struct DenseCache {
    Matrix input;  // n × in_dim
    Matrix z;      // pre-activation, n × out_dim
    Matrix out;    // activation(z)
};

struct DenseGrads {
    Matrix weights;             // dL/dW
    std::vector<double> bias;   // dL/db
    Matrix input;               // dL/dinput, for chaining
};

Matrix dense_forward(const DenseLayer& layer, const Matrix& input);
Matrix dense_forward(const DenseLayer& layer, const Matrix& input, DenseCache& cache);

/// Exact analytic gradients chained with upstream = dL/dout.
DenseGrads dense_backward(const DenseLayer& layer, const DenseCache& cache, const Matrix& upstream);

}  // namespace condmtl

#endif  // CONDMTL_DENSE_LAYER_HPP
