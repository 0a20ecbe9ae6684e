#include "coremantle/canon.hpp"

#include <algorithm>
#include <vector>

namespace coremantle::canon {

namespace {

// children(v) given as index lists; symbol(v) a single char per vertex.
template <typename ChildrenFn, typename SymbolFn>
Code code_below(std::uint32_t v, std::uint32_t remaining, ChildrenFn&& children,
                SymbolFn&& symbol) {
    Code out = "(";
    out += symbol(v);
    if (remaining > 0) {
        std::vector<Code> parts;
        for (std::uint32_t w : children(v))
            parts.push_back(code_below(w, remaining - 1, children, symbol));
        std::sort(parts.begin(), parts.end());
        for (const Code& part : parts)
            out += part;
    }
    out += ')';
    return out;
}

} // namespace

Code canonical_tree_code(const trees::MarkedTree& tree, std::uint32_t s) {
    if (tree.size() == 0)
        return "()";
    return code_below(
        0, s, [&](std::uint32_t v) -> const std::vector<std::uint32_t>& { return tree.children[v]; },
        [&](std::uint32_t v) { return trees::mark_symbol(tree.alphabet, tree.mark[v]); });
}

Code canonical_neighborhood_code(const graph::RootedMarkedNeighborhood& nb) {
    if (!nb.is_tree())
        return kCyclicCode;
    std::vector<std::vector<std::uint32_t>> children(nb.vertices.size());
    for (std::uint32_t v = 1; v < nb.vertices.size(); ++v)
        children[static_cast<std::uint32_t>(nb.bfs_parent[v])].push_back(v);
    return code_below(
        0, nb.depth, [&](std::uint32_t v) -> const std::vector<std::uint32_t>& { return children[v]; },
        [&](std::uint32_t v) { return nb.marks[v] ? '1' : '0'; });
}

} // namespace coremantle::canon
