#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "condmtl/error.hpp"
#include "condmtl/metrics.hpp"
#include "condmtl/rng.hpp"

using namespace condmtl;

namespace {

constexpr ConditionalLabel T = ConditionalLabel::Toxic;
constexpr ConditionalLabel NT = ConditionalLabel::NonToxic;
constexpr ConditionalLabel IRR = ConditionalLabel::Irrelevant;

}  // namespace

TEST_CASE("evaluate_branch hand-counted example") {
    const std::vector<ConditionalLabel> truth = {T, T, NT, NT};
    const std::vector<std::uint8_t> pred = {1, 0, 0, 0};
    const BranchReport r = evaluate_branch("all", truth, pred);
    CHECK(r.confusion.tp == 1);
    CHECK(r.confusion.fn == 1);
    CHECK(r.confusion.tn == 2);
    CHECK(r.confusion.fp == 0);
    CHECK(*r.recall_toxic == doctest::Approx(0.5));
    CHECK(*r.precision_toxic == doctest::Approx(1.0));
    CHECK(*r.f1_toxic == doctest::Approx(2.0 / 3.0));
    CHECK(r.accuracy == doctest::Approx(0.75));
}

TEST_CASE("perfect predictions have a zero off-diagonal") {
    const std::vector<ConditionalLabel> truth = {T, NT, T, NT, NT};
    const std::vector<std::uint8_t> pred = {1, 0, 1, 0, 0};
    const BranchReport r = evaluate_branch("all", truth, pred);
    CHECK(r.confusion.fp == 0);
    CHECK(r.confusion.fn == 0);
    CHECK(r.accuracy == 1.0);
}

TEST_CASE("irrelevant indices are excluded from evaluation") {
    const std::vector<ConditionalLabel> truth = {T, IRR, NT};
    const std::vector<std::uint8_t> pred = {1, 1, 0};
    const BranchReport r = evaluate_branch("men", truth, pred);
    CHECK(r.confusion.total() == 2);
    CHECK(r.confusion.tp == 1);
    CHECK(r.confusion.tn == 1);
    CHECK(r.accuracy == 1.0);
}

TEST_CASE("all-irrelevant truth is an empty-evaluation error") {
    const std::vector<ConditionalLabel> truth = {IRR, IRR};
    const std::vector<std::uint8_t> pred = {1, 0};
    CHECK_THROWS_AS(evaluate_branch("men", truth, pred), EmptyBatchError);
}

TEST_CASE("undefined metrics are explicit markers, not zeros") {
    // No toxic example in truth: toxic recall undefined; no positive
    // prediction: toxic precision undefined.
    const std::vector<ConditionalLabel> truth = {NT, NT, NT};
    const std::vector<std::uint8_t> pred = {0, 0, 0};
    const BranchReport r = evaluate_branch("women", truth, pred);
    CHECK(!r.recall_toxic.has_value());
    CHECK(!r.precision_toxic.has_value());
    CHECK(!r.f1_toxic.has_value());
    CHECK(r.accuracy == 1.0);
    const std::string csv = reports_to_csv(std::vector<BranchReport>{r});
    CHECK(csv.find("women,recall_T,NA") != std::string::npos);
}

TEST_CASE("evaluate_branch is permutation invariant") {
    Rng rng(4);
    std::vector<ConditionalLabel> truth;
    std::vector<std::uint8_t> pred;
    for (int i = 0; i < 200; ++i) {
        const std::size_t state = rng.below(3);
        truth.push_back(state == 0 ? T : state == 1 ? NT : IRR);
        pred.push_back(static_cast<std::uint8_t>(rng.below(2)));
    }
    const BranchReport base = evaluate_branch("b", truth, pred);
    std::vector<std::size_t> order(truth.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        order[i] = i;
    }
    rng.shuffle(order);
    std::vector<ConditionalLabel> truth_p;
    std::vector<std::uint8_t> pred_p;
    for (std::size_t idx : order) {
        truth_p.push_back(truth[idx]);
        pred_p.push_back(pred[idx]);
    }
    const BranchReport shuffled = evaluate_branch("b", truth_p, pred_p);
    CHECK(base.confusion.tp == shuffled.confusion.tp);
    CHECK(base.confusion.tn == shuffled.confusion.tn);
    CHECK(base.confusion.fp == shuffled.confusion.fp);
    CHECK(base.confusion.fn == shuffled.confusion.fn);
    CHECK(base.accuracy == shuffled.accuracy);
}

TEST_CASE("recall plus miss rate is one") {
    const std::vector<ConditionalLabel> truth = {T, T, T, NT, NT};
    const std::vector<std::uint8_t> pred = {1, 0, 1, 0, 1};
    const BranchReport r = evaluate_branch("all", truth, pred);
    const double miss_rate = static_cast<double>(r.confusion.fn) /
                             static_cast<double>(r.confusion.tp + r.confusion.fn);
    CHECK(*r.recall_toxic + miss_rate == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("confusion percentages sum to 100 per branch within rounding") {
    Rng rng(10);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<ConditionalLabel> truth;
        std::vector<std::uint8_t> pred;
        const std::size_t n = 3 + rng.below(50);
        for (std::size_t i = 0; i < n; ++i) {
            truth.push_back(rng.below(2) ? T : NT);
            pred.push_back(static_cast<std::uint8_t>(rng.below(2)));
        }
        const BranchReport r = evaluate_branch("all", truth, pred);
        const double total = static_cast<double>(r.confusion.total());
        const double sum = as_percent(r.confusion.tn / total) +
                           as_percent(r.confusion.fp / total) +
                           as_percent(r.confusion.fn / total) +
                           as_percent(r.confusion.tp / total);
        CHECK(std::fabs(sum - 100.0) <= 0.2);  // one-decimal rounding slack
    }
}

TEST_CASE("eo_gap arithmetic from the published rows") {
    CHECK(eo_gap(23.8, 23.6) == doctest::Approx(0.2).epsilon(1e-9));
    CHECK(eo_gap(13.6, 4.6) == doctest::Approx(9.0).epsilon(1e-9));
    CHECK(eo_gap(4.2, 2.8) == doctest::Approx(1.4).epsilon(1e-9));
    CHECK(eo_gap(28.7, 31.2) == doctest::Approx(2.5).epsilon(1e-9));
    CHECK(eo_gap(0.37, 0.37) == 0.0);
}

TEST_CASE("eo_gap is symmetric and satisfies the triangle inequality") {
    Rng rng(6);
    for (int trial = 0; trial < 200; ++trial) {
        const double a = rng.uniform();
        const double b = rng.uniform();
        const double c = rng.uniform();
        CHECK(eo_gap(a, b) == eo_gap(b, a));
        CHECK(eo_gap(a, b) <= eo_gap(a, c) + eo_gap(c, b) + 1e-15);
    }
}

TEST_CASE("aggregate_runs mean and population standard deviation") {
    BranchReport r1;
    r1.branch = "all";
    r1.accuracy = 0.85;
    r1.recall_toxic = 0.3;
    BranchReport r2 = r1;
    r2.accuracy = 0.87;
    r2.recall_toxic = 0.5;

    SUBCASE("identical runs have zero spread") {
        const RunAggregate agg = aggregate_runs({{r1}, {r1}, {r1}});
        CHECK(agg.at("all").at("accuracy").mean == doctest::Approx(0.85));
        CHECK(agg.at("all").at("accuracy").stddev == 0.0);
    }
    SUBCASE("two-run hand computation uses the population deviation") {
        const RunAggregate agg = aggregate_runs({{r1}, {r2}});
        CHECK(agg.at("all").at("accuracy").mean == doctest::Approx(0.86));
        CHECK(agg.at("all").at("accuracy").stddev == doctest::Approx(0.01));
        CHECK(agg.at("all").at("recall_T").mean == doctest::Approx(0.4));
        CHECK(agg.at("all").at("recall_T").stddev == doctest::Approx(0.1));
    }
    SUBCASE("a single run aggregates to itself with zero spread") {
        const RunAggregate agg = aggregate_runs({{r1}});
        CHECK(agg.at("all").at("accuracy").mean == doctest::Approx(0.85));
        CHECK(agg.at("all").at("accuracy").stddev == 0.0);
    }
    SUBCASE("empty input is an error") {
        CHECK_THROWS_AS(aggregate_runs({}), EmptyBatchError);
    }
    SUBCASE("heterogeneous branch sets are rejected") {
        BranchReport other = r1;
        other.branch = "men";
        CHECK_THROWS_AS(aggregate_runs({{r1}, {other}}), ShapeError);
    }
}

TEST_CASE("percent rounding to one decimal") {
    CHECK(as_percent(0.2384) == doctest::Approx(23.8));
    CHECK(as_percent(1.0) == doctest::Approx(100.0));
    CHECK(as_percent(0.04649) == doctest::Approx(4.6));
}
