#include <doctest.h>

#include "coremantle/kcore.hpp"
#include "support/oracles.hpp"

using namespace coremantle;
using namespace coremantle::kcore;
using coremantle::graph::SparseGraph;

TEST_SUITE_BEGIN("kcore");

TEST_CASE("small closed-form cores") {
    const auto k4 = SparseGraph::from_edges(4, {{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}});
    const auto marking = peel_core(k4, 3);
    CHECK(marking.core_size == 4);
    for (auto bit : marking.membership)
        CHECK(bit == 1);

    // any forest has an empty 3-core
    const auto forest = SparseGraph::from_edges(7, {{0, 1}, {0, 2}, {1, 3}, {1, 4}, {5, 6}});
    CHECK(peel_core(forest, 3).core_size == 0);

    CHECK_THROWS_AS(peel_core(k4, 0), std::invalid_argument);
}

TEST_CASE("agrees with the naive iterated-removal oracle on small graphs") {
    for (std::uint64_t seed = 0; seed < 60; ++seed) {
        rng::Stream rng(seed);
        const std::uint32_t n = 20;
        const auto g = graph::sample_gnp(n, 0.25, rng);
        for (int k : {1, 2, 3, 4}) {
            const auto marking = peel_core(g, k);
            const auto expected = oracles::naive_core(g, k);
            for (std::uint32_t v = 0; v < n; ++v)
                CHECK(marking.membership[v] == expected[v]);
        }
    }
}

TEST_CASE("peeling order does not matter") {
    rng::Stream rng(99);
    for (int trial = 0; trial < 5; ++trial) {
        const std::uint32_t n = 60;
        const auto g = graph::sample_gnp(n, 6.0 / n, rng);
        const auto marking = peel_core(g, 3);
        for (int order = 0; order < 20; ++order) {
            rng::Stream order_rng(1000 + 20 * trial + order);
            const auto shuffled = oracles::shuffled_peel(g, 3, order_rng);
            for (std::uint32_t v = 0; v < n; ++v)
                CHECK(marking.membership[v] == shuffled[v]);
        }
    }
}

TEST_CASE("min-degree invariant verified post hoc") {
    rng::Stream rng(4);
    const auto g = graph::sample_gnp(2000, 6.0 / 2000, rng);
    const auto marking = peel_core(g, 3);
    CHECK(verify_core(g, 3, marking));
}

TEST_CASE("core of a disjoint union decomposes per component") {
    rng::Stream rng(12);
    const std::uint32_t half = 50;
    const auto a = graph::sample_gnp(half, 8.0 / half, rng);
    const auto b = graph::sample_gnp(half, 8.0 / half, rng);

    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    for (std::uint32_t v = 0; v < half; ++v)
        for (std::uint32_t w : a.neighbors(v))
            if (v < w)
                edges.emplace_back(v, w);
    for (std::uint32_t v = 0; v < half; ++v)
        for (std::uint32_t w : b.neighbors(v))
            if (v < w)
                edges.emplace_back(half + v, half + w);
    const auto joint = SparseGraph::from_edges(2 * half, edges);

    const auto joint_marking = peel_core(joint, 3);
    const auto a_marking = peel_core(a, 3);
    const auto b_marking = peel_core(b, 3);
    for (std::uint32_t v = 0; v < half; ++v) {
        CHECK(joint_marking.membership[v] == a_marking.membership[v]);
        CHECK(joint_marking.membership[half + v] == b_marking.membership[v]);
    }
}

TEST_SUITE_END();
