#include "coremantle/kcore.hpp"

#include <stdexcept>

namespace coremantle::kcore {

CoreMarking peel_core(const graph::SparseGraph& g, int k) {
    if (k < 1)
        throw std::invalid_argument("peel_core: k must be at least 1");
    const std::uint32_t n = g.vertex_count();
    const std::uint32_t uk = static_cast<std::uint32_t>(k);

    std::vector<std::uint32_t> deg(n);
    std::vector<std::uint8_t> removed(n, 0);
    // bucket[d] holds candidates whose degree was d when pushed; entries
    // become stale when the degree drops further.
    std::vector<std::vector<std::uint32_t>> bucket(uk);
    for (std::uint32_t v = 0; v < n; ++v) {
        deg[v] = g.degree(v);
        if (deg[v] < uk)
            bucket[deg[v]].push_back(v);
    }

    std::uint64_t removed_count = 0;
    std::uint32_t level = 0;
    while (level < uk) {
        if (bucket[level].empty()) {
            ++level;
            continue;
        }
        const std::uint32_t v = bucket[level].back();
        bucket[level].pop_back();
        if (removed[v] || deg[v] != level)
            continue; // stale entry
        removed[v] = 1;
        ++removed_count;
        for (std::uint32_t w : g.neighbors(v)) {
            if (removed[w])
                continue;
            const std::uint32_t dw = --deg[w];
            if (dw < uk) {
                bucket[dw].push_back(w);
                if (dw < level)
                    level = dw;
            }
        }
    }

    CoreMarking marking;
    marking.membership.resize(n);
    for (std::uint32_t v = 0; v < n; ++v)
        marking.membership[v] = removed[v] ? 0 : 1;
    marking.core_size = n - removed_count;

    if (!verify_core(g, k, marking))
        throw std::logic_error("peel_core: min-degree invariant violated");
    return marking;
}

bool verify_core(const graph::SparseGraph& g, int k, const CoreMarking& marking) {
    const std::uint32_t n = g.vertex_count();
    if (marking.membership.size() != n)
        return false;
    std::uint64_t size = 0;
    for (std::uint32_t v = 0; v < n; ++v) {
        if (!marking.membership[v])
            continue;
        ++size;
        std::uint32_t inside = 0;
        for (std::uint32_t w : g.neighbors(v))
            inside += marking.membership[w];
        if (inside < static_cast<std::uint32_t>(k))
            return false;
    }
    return size == marking.core_size;
}

} // namespace coremantle::kcore
