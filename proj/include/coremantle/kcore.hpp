// Exact k-core extraction by peeling.
#pragma once

#include <cstdint>
#include <vector>

#include "coremantle/graph.hpp"

namespace coremantle::kcore {

struct CoreMarking {
    std::vector<std::uint8_t> membership; // 1 = in core
    std::uint64_t core_size = 0;
};

// Repeatedly deletes vertices of current degree < k using a bucket queue
// keyed by current degree with lazy (stale-entry) handling; O(n + m).
// The input graph is not mutated. k = 1, 2 are accepted for testing
// convenience even though the theory assumes k >= 3.
CoreMarking peel_core(const graph::SparseGraph& g, int k);

// Checks the min-degree invariant: every marked vertex has >= k marked
// neighbours.
bool verify_core(const graph::SparseGraph& g, int k, const CoreMarking& marking);

} // namespace coremantle::kcore
