#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "condmtl/adamax.hpp"
#include "condmtl/dense_layer.hpp"
#include "condmtl/error.hpp"
#include "condmtl/losses.hpp"
#include "condmtl/matrix.hpp"
#include "condmtl/rng.hpp"

using namespace condmtl;

namespace {

// Independent reference: plain unweighted binary cross-entropy with the same
// probability clamp.
double bce_reference(const std::vector<double>& y, const std::vector<double>& p) {
    double acc = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        const double pc = std::min(std::max(p[i], 1e-7), 1.0 - 1e-7);
        acc -= y[i] * std::log(pc) + (1.0 - y[i]) * std::log(1.0 - pc);
    }
    return acc / static_cast<double>(y.size());
}

}  // namespace

TEST_CASE("matrix multiply and shape errors") {
    const Matrix a = Matrix::from_rows({{1.0, 2.0}, {3.0, 4.0}});
    const Matrix b = Matrix::from_rows({{5.0}, {6.0}});
    const Matrix c = matmul(a, b);
    CHECK(c.rows == 2);
    CHECK(c.cols == 1);
    CHECK(c.at(0, 0) == doctest::Approx(17.0));
    CHECK(c.at(1, 0) == doctest::Approx(39.0));
    CHECK_THROWS_AS(matmul(b, a), ShapeError);

    const Matrix at_b = matmul_transpose_a(a, a);
    CHECK(at_b.at(0, 1) == doctest::Approx(1.0 * 2.0 + 3.0 * 4.0));
    const Matrix a_bt = matmul_transpose_b(a, a);
    CHECK(a_bt.at(0, 1) == doctest::Approx(1.0 * 3.0 + 2.0 * 4.0));
}

TEST_CASE("dense_forward identity case") {
    DenseLayer layer(2, 2, Activation::Linear);
    layer.weights = Matrix::identity(2);
    const Matrix out = dense_forward(layer, Matrix::from_rows({{3.0, 5.0}}));
    CHECK(out.at(0, 0) == 3.0);
    CHECK(out.at(0, 1) == 5.0);
}

TEST_CASE("dense_forward hand computed product") {
    DenseLayer layer(2, 1, Activation::Linear);
    layer.weights = Matrix::from_rows({{2.0}, {0.0}});
    layer.bias = {1.0};
    const Matrix out = dense_forward(layer, Matrix::from_rows({{3.0, 5.0}}));
    CHECK(out.at(0, 0) == doctest::Approx(7.0));  // 3·2 + 5·0 + 1
}

TEST_CASE("dense_forward sigmoid of zero is one half") {
    DenseLayer layer(1, 1, Activation::Sigmoid);
    layer.weights = Matrix::from_rows({{0.0}});
    const Matrix out = dense_forward(layer, Matrix::from_rows({{42.0}}));
    CHECK(out.at(0, 0) == doctest::Approx(0.5));
}

TEST_CASE("dense_forward rejects dimension mismatch") {
    DenseLayer layer(3, 2, Activation::Linear);
    CHECK_THROWS_AS(dense_forward(layer, Matrix(1, 2)), ShapeError);
}

TEST_CASE("sigmoid outputs stay strictly inside (0, 1)") {
    for (double z : {-1000.0, -40.0, -1.0, 0.0, 1.0, 40.0, 1000.0}) {
        const double s = apply_activation(Activation::Sigmoid, z);
        CHECK(s > 0.0);
        CHECK(s < 1.0);
    }
}

TEST_CASE("dense_backward zero input kills weight gradient") {
    DenseLayer layer(2, 3, Activation::Linear);
    Rng rng(11);
    layer.init_glorot(rng);
    DenseCache cache;
    dense_forward(layer, Matrix(4, 2, 0.0), cache);
    const DenseGrads grads = dense_backward(layer, cache, Matrix(4, 3, 1.0));
    for (double g : grads.weights.data) {
        CHECK(g == 0.0);
    }
    for (double g : grads.bias) {
        CHECK(g == doctest::Approx(4.0));  // sum over the 4 batch rows
    }
}

TEST_CASE("dense_backward relu dead zone blocks the input gradient") {
    DenseLayer layer(1, 1, Activation::Relu);
    layer.weights = Matrix::from_rows({{1.0}});
    layer.bias = {-5.0};  // pre-activation stays negative for small inputs
    DenseCache cache;
    dense_forward(layer, Matrix::from_rows({{1.0}}), cache);
    const DenseGrads grads = dense_backward(layer, cache, Matrix::from_rows({{1.0}}));
    CHECK(grads.input.at(0, 0) == 0.0);
    CHECK(grads.weights.at(0, 0) == 0.0);
}

TEST_CASE("dense_backward matches central finite differences") {
    // Two stacked layers with a quadratic readout; h = 1e-6.
    Rng rng(1234);
    DenseLayer l1(3, 4, Activation::Tanh);
    DenseLayer l2(4, 2, Activation::Sigmoid);
    l1.init_glorot(rng);
    l2.init_glorot(rng);
    Matrix input(5, 3);
    for (double& v : input.data) {
        v = rng.uniform_symmetric(1.0);
    }
    Matrix target(5, 2);
    for (double& v : target.data) {
        v = rng.uniform();
    }

    auto loss_of = [&](const DenseLayer& a, const DenseLayer& b) {
        const Matrix h = dense_forward(a, input);
        const Matrix o = dense_forward(b, h);
        double acc = 0.0;
        for (std::size_t i = 0; i < o.size(); ++i) {
            const double d = o.data[i] - target.data[i];
            acc += d * d;
        }
        return acc / static_cast<double>(o.size());
    };

    DenseCache c1;
    DenseCache c2;
    const Matrix h = dense_forward(l1, input, c1);
    const Matrix o = dense_forward(l2, h, c2);
    Matrix upstream(o.rows, o.cols);
    for (std::size_t i = 0; i < o.size(); ++i) {
        upstream.data[i] = 2.0 * (o.data[i] - target.data[i]) / static_cast<double>(o.size());
    }
    const DenseGrads g2 = dense_backward(l2, c2, upstream);
    const DenseGrads g1 = dense_backward(l1, c1, g2.input);

    constexpr double step = 1e-6;
    auto check_param = [&](DenseLayer& layer, double& param, double analytic) {
        const double saved = param;
        param = saved + step;
        const double plus = loss_of(l1, l2);
        param = saved - step;
        const double minus = loss_of(l1, l2);
        param = saved;
        (void)layer;
        const double central = (plus - minus) / (2.0 * step);
        const double denom = std::max(1e-8, std::fabs(analytic) + std::fabs(central));
        CHECK(std::fabs(analytic - central) / denom <= 1e-5);
    };
    for (std::size_t i = 0; i < l1.weights.size(); ++i) {
        check_param(l1, l1.weights.data[i], g1.weights.data[i]);
    }
    for (std::size_t i = 0; i < l1.bias.size(); ++i) {
        check_param(l1, l1.bias[i], g1.bias[i]);
    }
    for (std::size_t i = 0; i < l2.weights.size(); ++i) {
        check_param(l2, l2.weights.data[i], g2.weights.data[i]);
    }
}

TEST_CASE("mse_loss values and gradient") {
    SUBCASE("perfect prediction is zero") {
        const std::vector<double> y = {1.0, -2.0, 0.5};
        CHECK(mse_loss(y, y).value == 0.0);
    }
    SUBCASE("hand computation") {
        const LossResult r = mse_loss(std::vector<double>{2.0, 4.0}, std::vector<double>{0.0, 0.0});
        CHECK(r.value == doctest::Approx(10.0));
        CHECK(r.n_contributing == 2);
        CHECK(r.grad[0] == doctest::Approx(-2.0));
        CHECK(r.grad[1] == doctest::Approx(-4.0));
    }
    SUBCASE("gradient matches finite differences") {
        const std::vector<double> y = {0.3, -1.2, 2.0};
        std::vector<double> p = {1.1, 0.4, -0.7};
        const LossResult r = mse_loss(y, p);
        constexpr double h = 1e-7;
        for (std::size_t i = 0; i < p.size(); ++i) {
            const double saved = p[i];
            p[i] = saved + h;
            const double plus = mse_loss(y, p).value;
            p[i] = saved - h;
            const double minus = mse_loss(y, p).value;
            p[i] = saved;
            CHECK(r.grad[i] == doctest::Approx((plus - minus) / (2.0 * h)).epsilon(1e-6));
        }
    }
    SUBCASE("empty batch is an error") {
        CHECK_THROWS_AS(mse_loss(std::vector<double>{}, std::vector<double>{}), EmptyBatchError);
    }
}

TEST_CASE("weighted_bce values") {
    SUBCASE("perfect prediction at the clamp") {
        const LossResult r =
            weighted_bce(std::vector<double>{1.0}, std::vector<double>{1.0}, ClassWeights{});
        CHECK(r.value <= 1e-6);
        CHECK(r.value >= 0.0);
    }
    SUBCASE("uniform half predictions give ln 2") {
        const LossResult r = weighted_bce(std::vector<double>{1.0, 0.0},
                                          std::vector<double>{0.5, 0.5}, ClassWeights{});
        CHECK(r.value == doctest::Approx(std::log(2.0)));
    }
    SUBCASE("toxic weight scales the toxic term") {
        const LossResult r =
            weighted_bce(std::vector<double>{1.0}, std::vector<double>{0.5},
                         ClassWeights{.non_toxic = 1.0, .toxic = 2.0});
        CHECK(r.value == doctest::Approx(2.0 * std::log(2.0)));
    }
    SUBCASE("unit weights equal unweighted BCE") {
        Rng rng(77);
        for (int trial = 0; trial < 50; ++trial) {
            std::vector<double> y;
            std::vector<double> p;
            const std::size_t n = 1 + rng.below(20);
            for (std::size_t i = 0; i < n; ++i) {
                y.push_back(rng.below(2) ? 1.0 : 0.0);
                p.push_back(0.01 + 0.98 * rng.uniform());
            }
            const LossResult r = weighted_bce(y, p, ClassWeights{});
            CHECK(std::fabs(r.value - bce_reference(y, p)) <= 1e-12);
        }
    }
    SUBCASE("empty batch is an error") {
        CHECK_THROWS_AS(weighted_bce(std::vector<double>{}, std::vector<double>{}, ClassWeights{}),
                        EmptyBatchError);
    }
}

TEST_CASE("conditional_weighted_bce masks irrelevant examples") {
    SUBCASE("hand-filtered value and zero gradient at the masked index") {
        const std::vector<ConditionalLabel> labels = {ConditionalLabel::Toxic,
                                                      ConditionalLabel::Irrelevant,
                                                      ConditionalLabel::NonToxic};
        const std::vector<double> preds = {0.9, 0.2, 0.1};
        const LossResult r = conditional_weighted_bce(labels, preds, ClassWeights{});
        CHECK(r.value == doctest::Approx(-(std::log(0.9) + std::log(0.9)) / 2.0));
        CHECK(r.n_contributing == 2);
        CHECK(r.grad[1] == 0.0);
    }
    SUBCASE("all-irrelevant batch is legal and zero") {
        const std::vector<ConditionalLabel> labels(4, ConditionalLabel::Irrelevant);
        const std::vector<double> preds = {0.1, 0.2, 0.3, 0.4};
        const LossResult r = conditional_weighted_bce(labels, preds, ClassWeights{});
        CHECK(r.value == 0.0);
        CHECK(r.n_contributing == 0);
        for (double g : r.grad) {
            CHECK(g == 0.0);
        }
    }
}

TEST_CASE("masking equivalence: conditional loss equals filter-then-weighted_bce") {
    Rng rng(2025);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 1 + rng.below(40);
        std::vector<ConditionalLabel> labels;
        std::vector<double> preds;
        std::vector<double> filtered_y;
        std::vector<double> filtered_p;
        const ClassWeights weights{.non_toxic = 0.25 + rng.uniform() * 3.0,
                                   .toxic = 0.25 + rng.uniform() * 3.0};
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t state = rng.below(3);
            const double p = 0.001 + 0.998 * rng.uniform();
            preds.push_back(p);
            if (state == 2) {
                labels.push_back(ConditionalLabel::Irrelevant);
                continue;
            }
            labels.push_back(state == 1 ? ConditionalLabel::Toxic : ConditionalLabel::NonToxic);
            filtered_y.push_back(state == 1 ? 1.0 : 0.0);
            filtered_p.push_back(p);
        }
        const LossResult conditional = conditional_weighted_bce(labels, preds, weights);
        if (filtered_y.empty()) {
            CHECK(conditional.value == 0.0);
            continue;
        }
        const LossResult filtered = weighted_bce(filtered_y, filtered_p, weights);
        CHECK(std::fabs(conditional.value - filtered.value) <= 1e-12);
        CHECK(conditional.n_contributing == filtered.n_contributing);
        CHECK(conditional.value >= 0.0);
        // Gradients at irrelevant indices are exactly zero; the rest line up
        // with the filtered gradient in order.
        std::size_t j = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (labels[i] == ConditionalLabel::Irrelevant) {
                CHECK(conditional.grad[i] == 0.0);
            } else {
                CHECK(conditional.grad[i] == filtered.grad[j++]);
            }
        }
    }
}

TEST_CASE("finite differences see no gradient at irrelevant indices") {
    const std::vector<ConditionalLabel> labels = {ConditionalLabel::Toxic,
                                                  ConditionalLabel::Irrelevant,
                                                  ConditionalLabel::NonToxic};
    std::vector<double> preds = {0.7, 0.4, 0.3};
    constexpr double h = 1e-6;
    preds[1] += h;
    const double plus = conditional_weighted_bce(labels, preds, ClassWeights{}).value;
    preds[1] -= 2.0 * h;
    const double minus = conditional_weighted_bce(labels, preds, ClassWeights{}).value;
    CHECK(std::fabs(plus - minus) / (2.0 * h) <= 1e-8);
}

TEST_CASE("adamax step examples") {
    SUBCASE("zero gradient leaves parameters unchanged") {
        AdaMaxState state(AdaMaxConfig{.learning_rate = 0.1}, 3);
        std::vector<double> params = {1.0, -2.0, 0.5};
        const std::vector<double> saved = params;
        state.step(params, std::vector<double>{0.0, 0.0, 0.0});
        CHECK(params == saved);
        CHECK(state.step_count() == 1);
    }
    SUBCASE("hand iteration of the update rule") {
        AdaMaxState state(
            AdaMaxConfig{.learning_rate = 0.1, .beta1 = 0.9, .beta2 = 0.999, .epsilon = 0.0}, 1);
        std::vector<double> params = {0.0};
        state.step(params, std::vector<double>{1.0});
        // m = 0.1, bias correction 1/(1-0.9) = 10, u = 1 → θ -= 0.1·10·0.1/1
        CHECK(params[0] == doctest::Approx(-0.1));
    }
    SUBCASE("quadratic converges within 500 steps") {
        AdaMaxState state(AdaMaxConfig{.learning_rate = 0.05}, 1);
        std::vector<double> theta = {1.0};
        for (int i = 0; i < 500; ++i) {
            state.step(theta, std::vector<double>{2.0 * theta[0]});
        }
        CHECK(std::fabs(theta[0]) < 0.05);
    }
    SUBCASE("engine matches an independent scalar reference loop") {
        const AdaMaxConfig cfg{.learning_rate = 0.01, .beta1 = 0.9, .beta2 = 0.999,
                               .epsilon = 1e-7};
        AdaMaxState state(cfg, 1);
        std::vector<double> theta = {0.8};
        double ref_theta = 0.8;
        double m = 0.0;
        double u = 0.0;
        for (int t = 1; t <= 200; ++t) {
            const double g = 2.0 * theta[0];
            const double ref_g = 2.0 * ref_theta;
            state.step(theta, std::vector<double>{g});
            m = cfg.beta1 * m + (1.0 - cfg.beta1) * ref_g;
            u = std::max(cfg.beta2 * u, std::fabs(ref_g));
            ref_theta -= cfg.learning_rate / (1.0 - std::pow(cfg.beta1, t)) * m /
                         (u + cfg.epsilon);
            CHECK(theta[0] == ref_theta);
        }
    }
    SUBCASE("infinity norm never decreases under constant-magnitude gradients") {
        AdaMaxState state(AdaMaxConfig{.learning_rate = 0.01}, 1);
        std::vector<double> theta = {0.0};
        double previous = 0.0;
        for (int t = 0; t < 50; ++t) {
            state.step(theta, std::vector<double>{t % 2 == 0 ? 3.0 : -3.0});
            CHECK(state.infinity_norm()[0] >= previous);
            previous = state.infinity_norm()[0];
        }
    }
}
