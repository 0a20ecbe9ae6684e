#include <doctest.h>

#include <cmath>

#include "coremantle/fixedpoint.hpp"
#include "coremantle/kcore.hpp"
#include "coremantle/wp.hpp"
#include "support/oracles.hpp"

using namespace coremantle;
using namespace coremantle::wp;
using coremantle::graph::SparseGraph;

TEST_SUITE_BEGIN("wp");

namespace {

SparseGraph cycle(std::uint32_t n) {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    for (std::uint32_t v = 0; v < n; ++v)
        edges.emplace_back(std::min(v, (v + 1) % n), std::max(v, (v + 1) % n));
    return SparseGraph::from_edges(n, edges);
}

SparseGraph complete(std::uint32_t n) {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    for (std::uint32_t v = 0; v < n; ++v)
        for (std::uint32_t w = v + 1; w < n; ++w)
            edges.emplace_back(v, w);
    return SparseGraph::from_edges(n, edges);
}

SparseGraph star(std::uint32_t leaves) {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    for (std::uint32_t i = 1; i <= leaves; ++i)
        edges.emplace_back(0, i);
    return SparseGraph::from_edges(leaves + 1, edges);
}

} // namespace

TEST_CASE("initial marks") {
    const auto c5 = cycle(5);
    auto state = wp_init(c5, 3);
    CHECK(state.round == 0);
    CHECK(state.ones_messages == c5.directed_edge_count());
    for (auto mark : state.marks)
        CHECK(mark == 0); // degree 2 < 3

    auto k5_state = wp_init(complete(5), 3);
    for (auto mark : k5_state.marks)
        CHECK(mark == 1);

    const auto empty = SparseGraph::from_edges(3, {});
    auto empty_state = wp_init(empty, 3);
    CHECK(empty_state.messages.empty());
    for (auto mark : empty_state.marks)
        CHECK(mark == 0);
}

TEST_CASE("K5 is a fixed point from the start") {
    const auto g = complete(5);
    auto state = wp_init(g, 3);
    for (int t = 0; t < 5; ++t) {
        CHECK(wp_step(state, g, 3) == 0);
        CHECK(state.ones_messages == g.directed_edge_count());
        for (auto mark : state.marks)
            CHECK(mark == 1);
    }
}

TEST_CASE("star collapses at t=1") {
    const auto g = star(5);
    auto state = wp_init(g, 3);
    CHECK(state.marks[0] == 1); // center sees 5 ones at t=0
    wp_step(state, g, 3);
    CHECK(state.marks[0] == 0); // all leaf->center messages died
}

TEST_CASE("round-t messages equal the naive reference implementation") {
    rng::Stream rng(31);
    for (int trial = 0; trial < 6; ++trial) {
        const std::uint32_t n = 50;
        const auto g = graph::sample_gnp(n, 4.0 / n, rng);
        for (int t : {0, 1, 2, 5}) {
            const auto naive = oracles::naive_wp(g, 3, t);
            const auto state = wp_run(g, 3, t);
            for (std::uint32_t slot = 0; slot < g.directed_edge_count(); ++slot) {
                const auto key = std::make_pair(g.slot_source(slot), g.slot_target(slot));
                CHECK(static_cast<int>(state.messages[slot]) == naive.messages.at(key));
            }
            for (std::uint32_t v = 0; v < n; ++v)
                CHECK(static_cast<int>(state.marks[v]) == naive.marks[v]);
        }
    }
}

TEST_CASE("fixpoint marks equal the k-core, with the core inside every round's marks") {
    rng::Stream rng(57);
    for (double d : {1.0, 3.0, 5.0, 8.0}) {
        for (int k : {3, 4, 5}) {
            for (int rep = 0; rep < 2; ++rep) {
                const std::uint32_t n = 600;
                const auto g = graph::sample_gnp(n, d / n, rng);
                const auto core = kcore::peel_core(g, k);
                const std::uint64_t t_cap = 2 * g.edge_count() + 2;

                std::uint64_t inclusion_violations = 0;
                auto state = wp_init(g, k);
                for (std::uint64_t t = 0;; ++t) {
                    REQUIRE(t <= t_cap);
                    for (std::uint32_t v = 0; v < n; ++v)
                        inclusion_violations += core.membership[v] && !state.marks[v];
                    if (wp_step(state, g, k) == 0)
                        break;
                }
                CHECK(inclusion_violations == 0);

                std::uint64_t mismatches = 0;
                for (std::uint32_t v = 0; v < n; ++v)
                    mismatches += state.marks[v] != core.membership[v];
                CHECK(mismatches == 0);
            }
        }
    }
}

TEST_CASE("forests converge to all-zero marks") {
    // a path and a star are both forests
    const auto path = SparseGraph::from_edges(6, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 5}});
    const auto result = wp_run_to_fixpoint(path, 3, 100);
    for (auto mark : result.state.marks)
        CHECK(mark == 0);
    CHECK(result.t_converged <= 2 * path.edge_count() + 1);
}

TEST_CASE("non-convergence is reported when t_cap is too small") {
    rng::Stream rng(8);
    const auto g = graph::sample_gnp(500, 5.0 / 500, rng);
    CHECK_THROWS_AS(wp_run_to_fixpoint(g, 3, 1), ConvergenceError);
}

TEST_CASE("monotone message and mark counts") {
    rng::Stream rng(71);
    const auto g = graph::sample_gnp(2000, 5.0 / 2000, rng);
    auto state = wp_init(g, 3);
    std::uint64_t prev_messages = state.ones_messages;
    std::uint64_t prev_marks = state.ones_marks;
    for (int t = 0; t < 30; ++t) {
        wp_step(state, g, 3); // throws on any per-edge monotonicity violation
        CHECK(state.ones_messages <= prev_messages);
        CHECK(state.ones_marks <= prev_marks);
        prev_messages = state.ones_messages;
        prev_marks = state.ones_marks;
    }
}

TEST_CASE("density trace tracks the analytic trajectory at n=1e5") {
    const double d = 5.0;
    const int k = 3;
    const std::uint32_t n = 100000;
    rng::Stream rng(2024);
    const auto g = graph::sample_gnp(n, d / n, rng);
    const auto core = kcore::peel_core(g, k);
    const auto trace = wp_density_trace(g, k, 20, core);
    REQUIRE(trace.size() == 21);

    const auto traj = fixedpoint::density_trajectory({d, k}, 20);
    CHECK(trace[0].message_density == 1.0);
    for (std::uint32_t t = 0; t <= 20; ++t) {
        CHECK(std::fabs(trace[t].message_density - traj[t]) <= 0.01);
        // marks at round t come from round-t messages, so the matching
        // analytic mark density is the one driven by p^(t)
        const double expected_marks = fixedpoint::mark_density({d, k}, traj[t]);
        CHECK(std::fabs(trace[t].mark_fraction - expected_marks) <= 0.01);
    }
    for (std::size_t t = 0; t + 1 < trace.size(); ++t)
        CHECK(trace[t + 1].excess_fraction <= trace[t].excess_fraction + 1e-12);
}

TEST_SUITE_END();
