// Empirical distributions of depth-s marked neighbourhoods — graph side
// and tree side — and their total-variation comparison.
#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "coremantle/canon.hpp"
#include "coremantle/graph.hpp"
#include "coremantle/kcore.hpp"
#include "coremantle/rng.hpp"
#include "coremantle/trees.hpp"

namespace coremantle::empirics {

struct NeighborhoodDistribution {
    std::uint32_t depth = 0;
    std::uint64_t total = 0;
    std::map<canon::Code, std::uint64_t> class_freq; // ordered for determinism
    std::string provenance;

    void add(const canon::Code& code) {
        ++class_freq[code];
        ++total;
    }
    void merge(const NeighborhoodDistribution& other);
    double frequency(const canon::Code& code) const {
        const auto it = class_freq.find(code);
        return it == class_freq.end() || total == 0
                   ? 0.0
                   : static_cast<double>(it->second) / static_cast<double>(total);
    }
};

// One depth-s neighbourhood per vertex, marked by core membership,
// keyed by canonical code (cyclic classes lumped under CYCLIC).
NeighborhoodDistribution empirical_neighborhoods(const graph::SparseGraph& g,
                                                 const kcore::CoreMarking& marking,
                                                 std::uint32_t s);

// Which tree process a Monte Carlo law is drawn from.
struct TreeLaw {
    enum class Kind : std::uint8_t { plain_gw, five_type, two_type_star, boundary, bottomup };

    Kind kind = Kind::plain_gw;
    double d = 0.0;
    int k = 3;
    double p = 0.0; // process parameter (p* for two_type_star/boundary)
    int t = 0;      // rounds, for bottomup

    static TreeLaw plain_gw(double d) { return {Kind::plain_gw, d, 3, 0.0, 0}; }
    static TreeLaw five_type(double d, int k, double p) { return {Kind::five_type, d, k, p, 0}; }
    static TreeLaw two_type_star(double d, int k, double p_star) {
        return {Kind::two_type_star, d, k, p_star, 0};
    }
    static TreeLaw boundary(double d, int k, double p_star) {
        return {Kind::boundary, d, k, p_star, 0};
    }
    static TreeLaw bottomup(double d, int k, int t) { return {Kind::bottomup, d, k, 0.0, t}; }

    // One tree truncated at depth s, marked on {0,1} (5-type projected).
    trees::MarkedTree sample(std::uint32_t s, rng::Stream& rng) const;
    std::string label() const;
};

// M independent samples of the designated process, truncated to depth s,
// canonicalized and tallied. Parallelized over fixed chunks with
// substreams (seed, stream_base + chunk); the result is independent of
// the thread count.
NeighborhoodDistribution mc_tree_law(const TreeLaw& law, std::uint32_t s, std::uint64_t samples,
                                     std::uint64_t seed, std::uint64_t stream_base);

// Same tallying machinery for an arbitrary sampler (e.g. 5-type codes
// without projection).
NeighborhoodDistribution
mc_tree_codes(const std::function<trees::MarkedTree(rng::Stream&)>& sampler, std::uint32_t s,
              std::uint64_t samples, std::uint64_t seed, std::uint64_t stream_base,
              std::string provenance);

struct ClassRow {
    canon::Code code;
    double freq_a = 0.0;
    double freq_b = 0.0;
    double abs_diff = 0.0;
};

struct ComparisonReport {
    double tv = 0.0;
    double mc_error_bound = 0.0; // sqrt(K_union / min(total_a, total_b))
    std::uint64_t support_union = 0;
    // two-sample chi-square over classes with expected count >= 10 on
    // both sides, remainder pooled
    double chi_square = 0.0;
    std::uint64_t chi_square_dof = 0;
    std::vector<ClassRow> per_class;
    std::string settings;
};

// TV = half the L1 distance between class frequencies over the union of
// supports. Throws std::invalid_argument on depth mismatch.
ComparisonReport tv_distance(const NeighborhoodDistribution& a,
                             const NeighborhoodDistribution& b);

// Thread budget for the chunked Monte Carlo loops: CORE_MANTLE_THREADS
// when set, otherwise the hardware concurrency.
unsigned thread_budget();

} // namespace coremantle::empirics
