#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "condmtl/error.hpp"
#include "condmtl/model.hpp"
#include "condmtl/rng.hpp"

using namespace condmtl;

namespace {

ArchitectureSpec full_scale_spec(ModelVariant variant, std::size_t branches = 3) {
    ArchitectureSpec spec;
    spec.input_dim = 768;
    spec.shared_dims = {512};
    spec.head_dims = {128, 64, 1};
    spec.n_branches = branches;
    spec.variant = variant;
    return spec;
}

ArchitectureSpec tiny_cs_spec(std::size_t branches) {
    ArchitectureSpec spec;
    spec.input_dim = 2;
    spec.shared_dims = {};
    spec.head_dims = {3, 1};
    spec.n_branches = branches;
    spec.variant = ModelVariant::CsMtl;
    spec.hidden_activation = Activation::Tanh;
    spec.output_activation = Activation::Linear;
    return spec;
}

}  // namespace

TEST_CASE("parameter counts reproduce the published table") {
    CHECK(count_parameters(full_scale_spec(ModelVariant::StackedStl, 1)) == 467713);
    CHECK(count_parameters(full_scale_spec(ModelVariant::StackedStl)) == 1403139);
    CHECK(count_parameters(full_scale_spec(ModelVariant::CsMtl)) == 1403166);
    CHECK(count_parameters(full_scale_spec(ModelVariant::TradMtl)) == 615683);
    CHECK(count_parameters(full_scale_spec(ModelVariant::CondMtl)) == 615683);
    // Shared-trunk arithmetic: trunk + 3 heads.
    CHECK(count_parameters(full_scale_spec(ModelVariant::CondMtl)) == 393728 + 3 * 73985);
}

TEST_CASE("built models match count_parameters exactly") {
    for (ModelVariant variant : {ModelVariant::StackedStl, ModelVariant::TradMtl,
                                 ModelVariant::CondMtl, ModelVariant::CsMtl}) {
        ArchitectureSpec spec;
        spec.input_dim = 5;
        spec.shared_dims = {4};
        spec.head_dims = {3, 1};
        spec.n_branches = 3;
        spec.variant = variant;
        const MtlModel model = build(spec, 17);
        CHECK(model.parameter_count() == count_parameters(spec));
        CHECK(parameter_pointers(const_cast<MtlModel&>(model)).size() ==
              count_parameters(spec));
    }
}

TEST_CASE("cross-stitch units start as exact identities") {
    const MtlModel model = build(tiny_cs_spec(3), 5);
    REQUIRE(model.cs_units.size() == 1);  // streams [3, 1] → one stitch depth
    CHECK(model.cs_units[0].matrix == Matrix::identity(3));

    ArchitectureSpec deep = full_scale_spec(ModelVariant::CsMtl);
    const MtlModel full = build(deep, 5);
    REQUIRE(full.cs_units.size() == 3);  // after the 512, 128 and 64 layers
    for (const auto& unit : full.cs_units) {
        CHECK(unit.matrix == Matrix::identity(3));
    }
}

TEST_CASE("same seed builds bit-identical weights") {
    ArchitectureSpec spec = full_scale_spec(ModelVariant::CondMtl);
    spec.input_dim = 6;
    spec.shared_dims = {4};
    spec.head_dims = {2, 1};
    MtlModel a = build(spec, 99);
    MtlModel b = build(spec, 99);
    const auto pa = parameter_pointers(a);
    const auto pb = parameter_pointers(b);
    REQUIRE(pa.size() == pb.size());
    for (std::size_t i = 0; i < pa.size(); ++i) {
        CHECK(*pa[i] == *pb[i]);
    }
}

TEST_CASE("invalid specs are rejected") {
    ArchitectureSpec spec = full_scale_spec(ModelVariant::CondMtl);
    spec.head_dims = {128, 64};  // must end in 1
    CHECK_THROWS_AS(build(spec, 0), ConfigError);
    spec = full_scale_spec(ModelVariant::CondMtl);
    spec.input_dim = 0;
    CHECK_THROWS_AS(count_parameters(spec), ConfigError);
}

TEST_CASE("identity cross-stitch is forward-equivalent to stacked streams") {
    ArchitectureSpec cs_spec;
    cs_spec.input_dim = 3;
    cs_spec.shared_dims = {4};
    cs_spec.head_dims = {2, 1};
    cs_spec.n_branches = 3;
    cs_spec.variant = ModelVariant::CsMtl;
    cs_spec.hidden_activation = Activation::Relu;
    cs_spec.output_activation = Activation::Sigmoid;
    ArchitectureSpec stacked_spec = cs_spec;
    stacked_spec.variant = ModelVariant::StackedStl;

    // Identical seeds give identical stream weights (cs units draw nothing).
    const MtlModel cs = build(cs_spec, 31);
    const MtlModel stacked = build(stacked_spec, 31);

    Rng rng(8);
    Matrix batch(9, 3);
    for (double& v : batch.data) {
        v = rng.uniform_symmetric(2.0);
    }
    const auto out_cs = forward(cs, batch);
    const auto out_stacked = forward(stacked, batch);
    for (std::size_t b = 0; b < out_cs.size(); ++b) {
        for (std::size_t i = 0; i < out_cs[b].size(); ++i) {
            CHECK(std::fabs(out_cs[b][i] - out_stacked[b][i]) <= 1e-12);
        }
    }
}

TEST_CASE("permutation cross-stitch swaps the streams") {
    MtlModel model = build(tiny_cs_spec(2), 7);
    // Make the post-stitch layers identical so a swap at the stitch surfaces
    // as a swap of the final outputs.
    model.branch_layers[1][1] = model.branch_layers[0][1];

    Rng rng(3);
    Matrix batch(5, 2);
    for (double& v : batch.data) {
        v = rng.uniform_symmetric(1.0);
    }
    const auto identity_out = forward(model, batch);
    model.cs_units[0].matrix = Matrix::from_rows({{0.0, 1.0}, {1.0, 0.0}});
    const auto swapped_out = forward(model, batch);
    for (std::size_t i = 0; i < identity_out[0].size(); ++i) {
        CHECK(swapped_out[0][i] == doctest::Approx(identity_out[1][i]));
        CHECK(swapped_out[1][i] == doctest::Approx(identity_out[0][i]));
    }
}

TEST_CASE("stitched activations match a direct mixing computation") {
    ArchitectureSpec spec;
    spec.input_dim = 2;
    spec.shared_dims = {3};
    spec.head_dims = {2, 1};
    spec.n_branches = 3;
    spec.variant = ModelVariant::CsMtl;
    spec.hidden_activation = Activation::Tanh;
    spec.output_activation = Activation::Linear;
    MtlModel model = build(spec, 12);
    Rng rng(13);
    for (auto& unit : model.cs_units) {
        for (double& v : unit.matrix.data) {
            v += rng.uniform_symmetric(0.5);
        }
    }
    Matrix batch(4, 2);
    for (double& v : batch.data) {
        v = rng.uniform_symmetric(1.5);
    }
    ForwardCache cache;
    forward(model, batch, cache);
    const std::size_t depth = model.branch_layers[0].size();
    for (std::size_t d = 0; d + 1 < depth; ++d) {
        const Matrix& cs = model.cs_units[d].matrix;
        for (std::size_t i = 0; i < 3; ++i) {
            const Matrix& mixed = cache.branches[i][d + 1].input;
            for (std::size_t t = 0; t < mixed.size(); ++t) {
                double expected = 0.0;
                for (std::size_t j = 0; j < 3; ++j) {
                    expected += cs.at(i, j) * cache.branches[j][d].out.data[t];
                }
                CHECK(mixed.data[t] == doctest::Approx(expected).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("predict applies the inclusive threshold") {
    ArchitectureSpec spec;
    spec.input_dim = 1;
    spec.shared_dims = {};
    spec.head_dims = {1};
    spec.n_branches = 1;
    spec.variant = ModelVariant::StackedStl;
    spec.output_activation = Activation::Sigmoid;
    MtlModel model = build(spec, 0);

    SUBCASE("tie at the threshold predicts toxic") {
        // Zero weights give sigmoid(0) = 0.5 for every input.
        model.branch_layers[0][0].weights = Matrix(1, 1, 0.0);
        model.branch_layers[0][0].bias = {0.0};
        const auto out = predict(model, Matrix::from_rows({{3.0}, {-2.0}}), 0.5);
        CHECK(out[0][0] == 1);
        CHECK(out[0][1] == 1);
    }
    SUBCASE("threshold 1.0 with clamped sigmoid outputs is all non-toxic") {
        model.branch_layers[0][0].weights = Matrix(1, 1, 5.0);
        model.branch_layers[0][0].bias = {50.0};
        const auto out = predict(model, Matrix::from_rows({{10.0}}), 1.0);
        CHECK(out[0][0] == 0);
    }
    SUBCASE("threshold rule around 0.5") {
        // Linear output head so the probe values pass through unchanged.
        model.branch_layers[0][0].activation = Activation::Linear;
        model.branch_layers[0][0].weights = Matrix(1, 1, 1.0);
        model.branch_layers[0][0].bias = {0.0};
        const auto out = predict(model, Matrix::from_rows({{0.49}, {0.5}, {0.51}}), 0.5);
        CHECK(out[0][0] == 0);
        CHECK(out[0][1] == 1);
        CHECK(out[0][2] == 1);
    }
}

TEST_CASE("cross-stitch inspection norms") {
    SUBCASE("untrained model has zero deviations") {
        const MtlModel model = build(tiny_cs_spec(3), 21);
        const CsInspection inspection = inspect_cs(model);
        for (std::size_t u = 0; u < inspection.matrices.size(); ++u) {
            CHECK(inspection.identity_deviation[u] == 0.0);
            CHECK(inspection.asymmetry[u] == 0.0);
        }
    }
    SUBCASE("hand Frobenius computation on a fixed matrix") {
        MtlModel model = build(tiny_cs_spec(3), 21);
        model.cs_units[0].matrix = Matrix::from_rows(
            {{1.20, 0.41, -0.34}, {0.47, 1.21, -0.11}, {-0.43, -0.46, 1.29}});
        const CsInspection inspection = inspect_cs(model);
        // Independent derivation: each off-diagonal difference appears twice
        // in CS − CSᵀ, so the norm is
        // √(2·((0.41−0.47)² + (−0.34+0.43)² + (−0.11+0.46)²)) = √0.2684.
        const double expected_asym = std::sqrt(
            2.0 * (std::pow(0.41 - 0.47, 2) + std::pow(-0.34 + 0.43, 2) +
                   std::pow(-0.11 + 0.46, 2)));
        CHECK(expected_asym == doctest::Approx(0.518073).epsilon(1e-5));
        CHECK(inspection.asymmetry[0] == doctest::Approx(expected_asym).epsilon(1e-12));
        const double expected_dev = std::sqrt(
            0.20 * 0.20 + 0.41 * 0.41 + 0.34 * 0.34 + 0.47 * 0.47 + 0.21 * 0.21 +
            0.11 * 0.11 + 0.43 * 0.43 + 0.46 * 0.46 + 0.29 * 0.29);
        CHECK(inspection.identity_deviation[0] ==
              doctest::Approx(expected_dev).epsilon(1e-12));
    }
    SUBCASE("symmetric matrices have zero asymmetry") {
        MtlModel model = build(tiny_cs_spec(3), 21);
        model.cs_units[0].matrix = Matrix::from_rows(
            {{1.0, 0.3, -0.2}, {0.3, 1.5, 0.7}, {-0.2, 0.7, 0.9}});
        CHECK(inspect_cs(model).asymmetry[0] == 0.0);
    }
    SUBCASE("non-cs variants are rejected") {
        ArchitectureSpec spec = tiny_cs_spec(3);
        spec.variant = ModelVariant::TradMtl;
        spec.shared_dims = {3};
        const MtlModel model = build(spec, 0);
        CHECK_THROWS_AS(inspect_cs(model), VariantError);
    }
}

TEST_CASE("forward rejects feature-width mismatches") {
    const MtlModel model = build(tiny_cs_spec(2), 4);
    CHECK_THROWS_AS(forward(model, Matrix(3, 5)), ShapeError);
}
