#include "coremantle/graph.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace coremantle::graph {

SparseGraph SparseGraph::from_edges(std::uint32_t n,
                                    const std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges) {
    SparseGraph g;
    g.n_ = n;
    g.offsets_.assign(static_cast<std::size_t>(n) + 1, 0);

    for (const auto& [u, v] : edges) {
        if (u >= n || v >= n)
            throw std::invalid_argument("SparseGraph: edge endpoint out of range");
        if (u == v)
            throw std::invalid_argument("SparseGraph: self-loop");
        ++g.offsets_[u + 1];
        ++g.offsets_[v + 1];
    }
    for (std::uint32_t v = 0; v < n; ++v)
        g.offsets_[v + 1] += g.offsets_[v];

    const std::size_t m2 = edges.size() * 2;
    g.targets_.resize(m2);
    g.sources_.resize(m2);
    std::vector<std::uint32_t> cursor(g.offsets_.begin(), g.offsets_.end() - 1);
    for (const auto& [u, v] : edges) {
        g.targets_[cursor[u]++] = v;
        g.targets_[cursor[v]++] = u;
    }
    for (std::uint32_t v = 0; v < n; ++v) {
        auto begin = g.targets_.begin() + g.offsets_[v];
        auto end = g.targets_.begin() + g.offsets_[v + 1];
        std::sort(begin, end);
        if (std::adjacent_find(begin, end) != end)
            throw std::invalid_argument("SparseGraph: duplicate edge");
        std::fill(g.sources_.begin() + g.offsets_[v], g.sources_.begin() + g.offsets_[v + 1], v);
    }

    // reverse slot of (v,w) = position of v within w's sorted adjacency
    g.reverse_.resize(m2);
    for (std::uint32_t slot = 0; slot < m2; ++slot) {
        const std::uint32_t v = g.sources_[slot];
        const std::uint32_t w = g.targets_[slot];
        auto begin = g.targets_.begin() + g.offsets_[w];
        auto end = g.targets_.begin() + g.offsets_[w + 1];
        auto it = std::lower_bound(begin, end, v);
        g.reverse_[slot] = static_cast<std::uint32_t>(it - g.targets_.begin());
    }
    return g;
}

SparseGraph sample_gnp(std::uint32_t n, double edge_prob, rng::Stream& rng) {
    if (edge_prob < 0.0 || edge_prob > 1.0 || std::isnan(edge_prob))
        throw std::invalid_argument("sample_gnp: edge_prob must lie in [0,1]");

    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    const std::uint64_t total = static_cast<std::uint64_t>(n) * (n - (n ? 1 : 0)) / 2;

    if (edge_prob == 1.0) {
        edges.reserve(total);
        for (std::uint32_t v = 1; v < n; ++v)
            for (std::uint32_t w = 0; w < v; ++w)
                edges.emplace_back(w, v);
    } else if (edge_prob > 0.0 && total > 0) {
        // Pair (w,v) with w < v sits at linear index v(v-1)/2 + w. Skip
        // lengths between successive present pairs are Geometric(p).
        const double log1mp = std::log1p(-edge_prob);
        std::uint64_t idx = 0;
        bool first = true;
        std::uint32_t v = 1;
        while (true) {
            const double u = rng.uniform01();
            const double fskip = std::floor(std::log1p(-u) / log1mp);
            if (fskip >= static_cast<double>(total))
                break;
            const std::uint64_t skip = static_cast<std::uint64_t>(fskip) + 1;
            idx = first ? skip - 1 : idx + skip;
            first = false;
            if (idx >= total)
                break;
            while (static_cast<std::uint64_t>(v) * (v + 1) / 2 <= idx)
                ++v;
            const std::uint32_t w = static_cast<std::uint32_t>(idx - static_cast<std::uint64_t>(v) * (v - 1) / 2);
            edges.emplace_back(w, v);
        }
    }
    return SparseGraph::from_edges(n, edges);
}

NeighborhoodExtractor::NeighborhoodExtractor(const SparseGraph& g)
    : g_(g), stamp_(g.vertex_count(), 0), local_(g.vertex_count(), 0) {}

RootedMarkedNeighborhood NeighborhoodExtractor::extract(std::uint32_t v, std::uint32_t s,
                                                        std::span<const std::uint8_t> marks) {
    if (v >= g_.vertex_count())
        throw std::invalid_argument("extract_neighborhood: vertex id out of range");

    ++epoch_;
    RootedMarkedNeighborhood nb;
    nb.root = v;
    nb.depth = s;
    nb.vertices.push_back(v);
    nb.dist.push_back(0);
    nb.bfs_parent.push_back(-1);
    stamp_[v] = epoch_;
    local_[v] = 0;

    for (std::size_t head = 0; head < nb.vertices.size(); ++head) {
        const std::uint32_t u = nb.vertices[head];
        const std::uint32_t du = nb.dist[head];
        if (du == s)
            break; // BFS order: all later vertices are at distance >= du
        for (std::uint32_t w : g_.neighbors(u)) {
            if (stamp_[w] != epoch_) {
                stamp_[w] = epoch_;
                local_[w] = static_cast<std::uint32_t>(nb.vertices.size());
                nb.vertices.push_back(w);
                nb.dist.push_back(du + 1);
                nb.bfs_parent.push_back(static_cast<std::int32_t>(head));
            }
        }
    }

    // induced edges, including those between same-level vertices
    for (std::uint32_t a = 0; a < nb.vertices.size(); ++a) {
        const std::uint32_t u = nb.vertices[a];
        for (std::uint32_t w : g_.neighbors(u)) {
            if (stamp_[w] == epoch_ && u < w)
                nb.edges.emplace_back(std::min(a, local_[w]), std::max(a, local_[w]));
        }
    }

    nb.marks.reserve(nb.vertices.size());
    for (std::uint32_t u : nb.vertices)
        nb.marks.push_back(marks.empty() ? 0 : marks[u]);
    return nb;
}

RootedMarkedNeighborhood extract_neighborhood(const SparseGraph& g, std::uint32_t v,
                                              std::uint32_t s,
                                              std::span<const std::uint8_t> marks) {
    NeighborhoodExtractor extractor(g);
    return extractor.extract(v, s, marks);
}

void write_edge_list(const SparseGraph& g, std::ostream& out) {
    out << "n=" << g.vertex_count() << '\n';
    for (std::uint32_t v = 0; v < g.vertex_count(); ++v)
        for (std::uint32_t w : g.neighbors(v))
            if (v < w)
                out << v << ' ' << w << '\n';
}

SparseGraph read_edge_list(std::istream& in) {
    std::string line;
    std::uint64_t line_no = 0;

    const auto fail = [&](const std::string& what) {
        throw std::runtime_error("edge list parse error at line " + std::to_string(line_no) +
                                 ": " + what);
    };

    ++line_no;
    if (!std::getline(in, line) || line.rfind("n=", 0) != 0)
        fail("expected header \"n=<n>\"");
    std::uint64_t n64 = 0;
    try {
        std::size_t pos = 0;
        n64 = std::stoull(line.substr(2), &pos);
        if (pos + 2 != line.size())
            fail("trailing characters after vertex count");
    } catch (const std::logic_error&) {
        fail("invalid vertex count");
    }
    const std::uint32_t n = static_cast<std::uint32_t>(n64);

    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty())
            continue;
        std::istringstream row(line);
        std::uint64_t u = 0, v = 0;
        char extra = 0;
        if (!(row >> u >> v) || (row >> extra))
            fail("expected \"u v\"");
        if (u >= v)
            fail("endpoints must satisfy u < v");
        if (v >= n)
            fail("vertex id out of range");
        const std::pair<std::uint32_t, std::uint32_t> e{static_cast<std::uint32_t>(u),
                                                        static_cast<std::uint32_t>(v)};
        if (!edges.empty()) {
            if (e == edges.back())
                fail("duplicate edge");
            if (e < edges.back())
                fail("edges not sorted");
        }
        edges.push_back(e);
    }
    return SparseGraph::from_edges(n, edges);
}

} // namespace coremantle::graph
