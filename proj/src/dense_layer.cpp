#include "condmtl/dense_layer.hpp"

#include <cmath>
#include <string>

#include "condmtl/error.hpp"

namespace condmtl {

DenseLayer::DenseLayer(std::size_t in_dim, std::size_t out_dim, Activation act)
    : weights(in_dim, out_dim), bias(out_dim, 0.0), activation(act) {}

void DenseLayer::init_glorot(Rng& rng) {
    const double limit = std::sqrt(6.0 / static_cast<double>(in_dim() + out_dim()));
    for (double& w : weights.data) {
        w = rng.uniform_symmetric(limit);
    }
    for (double& b : bias) {
        b = 0.0;
    }
}

Matrix dense_forward(const DenseLayer& layer, const Matrix& input) {
    DenseCache cache;
    return dense_forward(layer, input, cache);
}

Matrix dense_forward(const DenseLayer& layer, const Matrix& input, DenseCache& cache) {
    if (input.cols != layer.in_dim()) {
        throw ShapeError("dense_forward: input has " + std::to_string(input.cols) +
                         " columns, layer expects " + std::to_string(layer.in_dim()));
    }
    cache.input = input;
    cache.z = matmul(input, layer.weights);
    add_row_vector(cache.z, layer.bias);
    cache.out = cache.z;
    for (double& v : cache.out.data) {
        v = apply_activation(layer.activation, v);
    }
    return cache.out;
}

DenseGrads dense_backward(const DenseLayer& layer, const DenseCache& cache, const Matrix& upstream) {
    if (!upstream.same_shape(cache.z)) {
        throw ShapeError("dense_backward: upstream gradient is " + std::to_string(upstream.rows) +
                         "x" + std::to_string(upstream.cols) + ", expected " +
                         std::to_string(cache.z.rows) + "x" + std::to_string(cache.z.cols));
    }
    Matrix dz = upstream;
    for (std::size_t i = 0; i < dz.size(); ++i) {
        dz.data[i] *= activation_derivative(layer.activation, cache.z.data[i]);
    }
    DenseGrads grads;
    grads.weights = matmul_transpose_a(cache.input, dz);
    grads.bias = column_sums(dz);
    grads.input = matmul_transpose_b(dz, layer.weights);
    return grads;
}

}  // namespace condmtl
