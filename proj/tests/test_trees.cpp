#include <doctest.h>

#include <cmath>
#include <map>

#include "coremantle/canon.hpp"
#include "coremantle/fixedpoint.hpp"
#include "coremantle/trees.hpp"
#include "support/oracles.hpp"
#include "support/stats.hpp"

using namespace coremantle;
using namespace coremantle::trees;

TEST_SUITE_BEGIN("trees");

namespace {

const double kPStar53 = fixedpoint::solve_p_star({5.0, 3}, 1e-12).p_star;
const double kPsi53 = fixedpoint::solve_p_star({5.0, 3}, 1e-12).psi;

std::map<std::string, std::uint64_t> code_tally(std::uint64_t samples, std::uint32_t s,
                                                std::uint64_t seed,
                                                const std::function<MarkedTree(rng::Stream&)>& fn) {
    std::map<std::string, std::uint64_t> tally;
    rng::Stream rng(seed);
    for (std::uint64_t i = 0; i < samples; ++i)
        ++tally[canon::canonical_tree_code(fn(rng), s)];
    return tally;
}

} // namespace

TEST_CASE("sample_gw degenerate cases and offspring mean") {
    rng::Stream rng(1);
    CHECK(sample_gw(0.0, 5, rng).size() == 1);
    CHECK(sample_gw(3.0, 0, rng).size() == 1);

    const double d = 3.0;
    const std::uint64_t samples = 100000;
    double total = 0.0;
    for (std::uint64_t i = 0; i < samples; ++i)
        total += static_cast<double>(sample_gw(d, 1, rng).size() - 1);
    const double mean = total / static_cast<double>(samples);
    const double se = std::sqrt(d / static_cast<double>(samples));
    CHECK(std::fabs(mean - d) <= 4.0 * se);
}

TEST_CASE("tree_wp hand examples") {
    MarkedTree lone;
    lone.add_root();
    lone.sampled_depth = 0;
    const auto wp_lone = tree_wp(lone, 3, 2);
    CHECK(wp_lone.up[0][0] == 1);
    CHECK(wp_lone.up[1][0] == 0);
    CHECK(wp_lone.up[2][0] == 0);

    // root with exactly k-1 = 2 genuine leaf children
    MarkedTree fork;
    fork.add_root();
    fork.add_child(0, 0);
    fork.add_child(0, 0);
    fork.sampled_depth = 2; // leaves at depth 1 are genuine
    const auto wp_fork = tree_wp(fork, 3, 1);
    CHECK(wp_fork.up[1][0] == 1);        // two round-0 ones reach the root
    CHECK(wp_fork.node_mark[1][0] == 0); // k-1 < k and no parent message
}

TEST_CASE("root up-message mean follows the density trajectory") {
    const double d = 5.0;
    const int k = 3;
    const auto traj = fixedpoint::density_trajectory({d, k}, 5);
    rng::Stream rng(7);
    const std::uint64_t samples = 30000;
    for (int t = 1; t <= 5; ++t) {
        std::uint64_t ones = 0;
        for (std::uint64_t i = 0; i < samples; ++i) {
            const auto tree = sample_gw(d, static_cast<std::uint32_t>(t), rng);
            const auto wp = tree_wp(tree, k, t);
            ones += wp.up[static_cast<std::size_t>(t)][0];
        }
        const double mean = static_cast<double>(ones) / static_cast<double>(samples);
        const double p_t = traj[static_cast<std::size_t>(t)];
        const double se = std::sqrt(p_t * (1.0 - p_t) / static_cast<double>(samples));
        CHECK(std::fabs(mean - p_t) <= 4.0 * se);
    }
}

TEST_CASE("depth bookkeeping is enforced") {
    rng::Stream rng(3);
    const auto tree = sample_gw(4.0, 4, rng);
    const auto wp = tree_wp(tree, 3, 2);
    CHECK_NOTHROW(message_marked(tree, wp, 2, 2));
    CHECK_THROWS_AS(message_marked(tree, wp, 2, 3), InsufficientDepthError);
    CHECK_NOTHROW(node_marked(tree, wp, 2, 1));
    CHECK_THROWS_AS(node_marked(tree, wp, 2, 2), InsufficientDepthError);
}

TEST_CASE("boundary process: s=0 root message is the Be(p*) draw") {
    rng::Stream rng(11);
    const std::uint64_t samples = 100000;
    std::uint64_t ones = 0;
    for (std::uint64_t i = 0; i < samples; ++i) {
        auto gw = sample_gw(5.0, 0, rng);
        ones += tree_wp_boundary(gw, 3, kPStar53, 0, rng).mark[0];
    }
    const double mean = static_cast<double>(ones) / static_cast<double>(samples);
    const double se = std::sqrt(kPStar53 * (1.0 - kPStar53) / static_cast<double>(samples));
    CHECK(std::fabs(mean - kPStar53) <= 4.0 * se);
}

TEST_CASE("boundary process: root mean reproduces the fixed point at s=2") {
    rng::Stream rng(13);
    const std::uint64_t samples = 100000;
    std::uint64_t ones = 0;
    for (std::uint64_t i = 0; i < samples; ++i) {
        auto gw = sample_gw(5.0, 2, rng);
        ones += tree_wp_boundary(gw, 3, kPStar53, 2, rng).mark[0];
    }
    const double mean = static_cast<double>(ones) / static_cast<double>(samples);
    const double se = std::sqrt(kPStar53 * (1.0 - kPStar53) / static_cast<double>(samples));
    CHECK(std::fabs(mean - kPStar53) <= 4.0 * se);
}

TEST_CASE("boundary process: extra rounds leave the depth-s law unchanged") {
    const std::uint32_t s = 2;
    const std::uint64_t samples = 100000;
    const auto run = [&](int rounds, std::uint64_t seed) {
        return code_tally(samples, s, seed, [&](rng::Stream& rng) {
            auto gw = sample_gw(5.0, s, rng);
            return tree_wp_boundary(gw, 3, kPStar53, rounds, rng);
        });
    };
    const auto at_s = run(static_cast<int>(s), 21);
    const auto at_s3 = run(static_cast<int>(s) + 3, 22);
    CHECK(teststats::chi_square_two_sample_pvalue(at_s, at_s3) >= 1e-3);
}

TEST_CASE("two-type star: structure holds on every sample and the root is Be(p*)") {
    const auto spec = BranchingSpec::two_type_star(5.0, 3, kPStar53);
    rng::Stream rng(31);
    const std::uint64_t samples = 100000;
    std::uint64_t root_ones = 0;
    for (std::uint64_t i = 0; i < samples; ++i) {
        const auto tree = sample_two_type_star(spec, 2, rng);
        validate_two_type_star(tree, 3); // throws on any violation
        root_ones += tree.mark[0];
    }
    const double mean = static_cast<double>(root_ones) / static_cast<double>(samples);
    const double se = std::sqrt(kPStar53 * (1.0 - kPStar53) / static_cast<double>(samples));
    CHECK(std::fabs(mean - kPStar53) <= 4.0 * se);
}

TEST_CASE("two-type star law equals the boundary-message law at s=2") {
    const std::uint32_t s = 2;
    const std::uint64_t samples = 100000;
    const auto star = code_tally(samples, s, 41, [&](rng::Stream& rng) {
        return sample_two_type_star(BranchingSpec::two_type_star(5.0, 3, kPStar53), s, rng);
    });
    const auto boundary = code_tally(samples, s, 42, [&](rng::Stream& rng) {
        auto gw = sample_gw(5.0, s, rng);
        return tree_wp_boundary(gw, 3, kPStar53, static_cast<int>(s), rng);
    });
    CHECK(teststats::chi_square_two_sample_pvalue(star, boundary) >= 1e-3);
}

TEST_CASE("bottom-up message sampler matches literal tree WP at small t") {
    const double d = 5.0;
    const int k = 3;
    const std::uint32_t s = 1;
    const int t = 3;
    const std::uint64_t samples = 30000;
    const auto literal = code_tally(samples, s, 51, [&](rng::Stream& rng) {
        const auto tree = sample_gw(d, s + static_cast<std::uint32_t>(t), rng);
        const auto wp = tree_wp(tree, k, t);
        return message_marked(tree, wp, t, s);
    });
    const auto direct = code_tally(samples, s, 52, [&](rng::Stream& rng) {
        return sample_bottomup_message_tree(d, k, t, s, rng);
    });
    CHECK(teststats::chi_square_two_sample_pvalue(literal, direct) >= 1e-3);
}

TEST_CASE("bottom-up message law approaches the boundary law as t grows") {
    const std::uint32_t s = 2;
    const std::uint64_t samples = 100000;
    const auto late = code_tally(samples, s, 61, [&](rng::Stream& rng) {
        return sample_bottomup_message_tree(5.0, 3, 12, s, rng);
    });
    const auto boundary = code_tally(samples, s, 62, [&](rng::Stream& rng) {
        auto gw = sample_gw(5.0, s, rng);
        return tree_wp_boundary(gw, 3, kPStar53, static_cast<int>(s), rng);
    });
    CHECK(teststats::chi_square_two_sample_pvalue(late, boundary) >= 1e-3);
}

TEST_CASE("derive_top_down_marks hand example and legality") {
    // single root with up-mark 1 and no children: triple (0,1,0)
    MarkedTree lone;
    lone.add_root();
    lone.mark[0] = 1;
    lone.sampled_depth = 0;
    const auto derived = derive_top_down_marks(lone, 3);
    CHECK(derived.mark[0] == kTriple010);

    rng::Stream rng(71);
    const auto spec = BranchingSpec::two_type_star(5.0, 3, kPStar53);
    for (int trial = 0; trial < 2000; ++trial) {
        const auto tree = derive_top_down_marks(sample_two_type_star(spec, 3, rng), 3);
        std::uint64_t illegal = 0;
        std::uint64_t root_down = tree.mark[0] & 1;
        for (std::size_t v = 0; v < tree.size(); ++v)
            if (tree.depth[v] < tree.sampled_depth && !legal_triple(tree.mark[v]))
                ++illegal;
        CHECK(illegal == 0);
        CHECK(root_down == 0);
    }
}

TEST_CASE("five-type spec validation") {
    CHECK_THROWS_AS(BranchingSpec::five_type(5.0, 3, 0.0), std::domain_error);
    CHECK_THROWS_AS(BranchingSpec::five_type(5.0, 3, 1.5), std::domain_error);
    const auto spec = BranchingSpec::five_type(5.0, 3, kPStar53);
    CHECK(spec.q == doctest::Approx(fixedpoint::q_of({5.0, 3}, kPStar53)));
    CHECK(spec.q_bar == doctest::Approx(fixedpoint::q_bar_of({5.0, 3}, kPStar53)));
}

TEST_CASE("five-type structural invariants hold on every sample") {
    for (const auto& [d, k] : std::vector<std::pair<double, int>>{{5.0, 3}, {7.0, 4}}) {
        const double p_star = fixedpoint::solve_p_star({d, k}, 1e-12).p_star;
        const auto spec = BranchingSpec::five_type(d, k, p_star);
        rng::Stream rng(81);
        std::uint64_t interior = 0;
        FiveTypeStats totals;
        while (interior < 100000) {
            const auto tree = sample_five_type(spec, 3, rng);
            const auto stats = validate_five_type(tree, k);
            totals.violations += stats.violations;
            interior += stats.interior_nodes;
        }
        CHECK(totals.violations == 0);
    }
}

TEST_CASE("five-type root law") {
    const auto spec = BranchingSpec::five_type(5.0, 3, kPStar53);
    rng::Stream rng(91);
    const std::uint64_t samples = 100000;
    std::uint64_t mark1 = 0;
    for (std::uint64_t i = 0; i < samples; ++i)
        mark1 += (sample_five_type(spec, 0, rng).mark[0] >> 2) & 1;
    const double mean = static_cast<double>(mark1) / static_cast<double>(samples);
    const double se = std::sqrt(kPsi53 * (1.0 - kPsi53) / static_cast<double>(samples));
    CHECK(std::fabs(mean - kPsi53) <= 4.0 * se);
}

TEST_CASE("offspring vectors match the exact generating-function coefficients") {
    // quick per-type check at (5,3); the acceptance suite runs the full matrix
    const double d = 5.0;
    const int k = 3;
    const double p = kPStar53;
    const auto spec = BranchingSpec::five_type(d, k, p);
    rng::Stream rng(101);
    const std::uint64_t samples = 30000;

    for (std::uint8_t type : {kTriple000, kTriple001, kTriple010, kTriple110, kTriple111}) {
        // enumerate offspring vectors with total <= 6
        std::vector<oracles::OffspringVector> support;
        std::vector<double> probs;
        for (unsigned a = 0; a <= 6; ++a)
            for (unsigned b = 0; a + b <= 6; ++b)
                for (unsigned c = 0; a + b + c <= 6; ++c)
                    for (unsigned e = 0; a + b + c + e <= 6; ++e)
                        for (unsigned f = 0; a + b + c + e + f <= 6; ++f) {
                            const oracles::OffspringVector y{a, b, c, e, f};
                            const double prob = oracles::exact_offspring_probability(type, d, k, p, y);
                            if (prob > 0.0) {
                                support.push_back(y);
                                probs.push_back(prob);
                            }
                        }
        std::map<oracles::OffspringVector, std::size_t> index;
        for (std::size_t i = 0; i < support.size(); ++i)
            index[support[i]] = i;

        // The offspring of a node given its type are independent of the
        // rest of the tree, so locating the first depth-1 node of the
        // wanted type in fresh depth-2 samples draws from g_type.
        std::vector<std::uint64_t> observed(support.size(), 0);
        for (std::uint64_t i = 0; i < samples; ++i) {
            oracles::OffspringVector y{0, 0, 0, 0, 0};
            bool found = false;
            while (!found) {
                const auto candidate = sample_five_type(spec, 2, rng);
                for (std::size_t v = 0; v < candidate.size() && !found; ++v) {
                    if (candidate.mark[v] != type || candidate.depth[v] != 1)
                        continue;
                    for (std::uint32_t w : candidate.children[v]) {
                        switch (candidate.mark[w]) {
                        case kTriple000: ++y[0]; break;
                        case kTriple001: ++y[1]; break;
                        case kTriple010: ++y[2]; break;
                        case kTriple110: ++y[3]; break;
                        default: ++y[4]; break;
                        }
                    }
                    found = true;
                }
            }
            const auto it = index.find(y);
            if (it != index.end())
                ++observed[it->second];
        }
        CAPTURE(static_cast<int>(type));
        CHECK(teststats::chi_square_gof_pvalue(observed, probs, samples) >= 1e-3);
    }
}

TEST_CASE("projection to two types") {
    const auto spec = BranchingSpec::five_type(5.0, 3, kPStar53);
    rng::Stream rng(111);
    const auto tree = sample_five_type(spec, 3, rng);
    const auto projected = project_two_type(tree);
    REQUIRE(projected.size() == tree.size());
    for (std::size_t v = 0; v < tree.size(); ++v) {
        CHECK(projected.parent[v] == tree.parent[v]);
        CHECK(projected.mark[v] == ((tree.mark[v] >> 2) & 1));
    }
    // triple-level spot checks
    CHECK(((kTriple111 >> 2) & 1) == 1);
    CHECK(((kTriple001 >> 2) & 1) == 0);
    CHECK(((kTriple010 >> 2) & 1) == 0);

    // projecting then canonicalizing equals canonicalizing the projection
    MarkedTree manual = tree;
    manual.alphabet = MarkAlphabet::binary;
    for (auto& m : manual.mark)
        m = (m >> 2) & 1;
    CHECK(canon::canonical_tree_code(projected, 3) == canon::canonical_tree_code(manual, 3));
}

TEST_CASE("serialization round trip with canonical child order") {
    rng::Stream rng(121);
    const auto spec = BranchingSpec::five_type(5.0, 3, kPStar53);
    for (int trial = 0; trial < 200; ++trial) {
        const auto tree = sample_five_type(spec, 2, rng);
        const auto text = serialize(tree);
        const auto back = parse(text);
        CHECK(back.alphabet == MarkAlphabet::triple);
        CHECK(serialize(back) == text);
        CHECK(canon::canonical_tree_code(back, 8) == canon::canonical_tree_code(tree, 8));
    }
    // binary trees too
    for (int trial = 0; trial < 200; ++trial) {
        const auto tree = sample_gw(2.0, 3, rng);
        const auto back = parse(serialize(tree));
        CHECK(canon::canonical_tree_code(back, 8) == canon::canonical_tree_code(tree, 8));
    }
    CHECK_THROWS_AS(parse("(2)"), std::runtime_error);
    CHECK_THROWS_AS(parse("(1 (0)"), std::runtime_error);
    CHECK_THROWS_AS(parse("(011)"), std::runtime_error);
}

TEST_SUITE_END();
