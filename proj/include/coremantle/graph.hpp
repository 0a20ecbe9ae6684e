// Sparse undirected graphs with directed-edge indexing, G(n,p) sampling,
// BFS neighbourhood extraction and edge-list persistence.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "coremantle/rng.hpp"

namespace coremantle::graph {

// Adjacency in CSR form. Directed edge (v,w) is addressed by its slot in
// the flattened neighbour array; reverse_slot gives the slot of (w,v) in
// O(1). Immutable after construction.
class SparseGraph {
public:
    SparseGraph() : offsets_(1, 0) {}

    // Takes unordered endpoint pairs; validates vertex range, self-loops
    // and duplicates.
    static SparseGraph from_edges(std::uint32_t n,
                                  const std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges);

    std::uint32_t vertex_count() const { return n_; }
    std::uint64_t edge_count() const { return targets_.size() / 2; }
    std::uint64_t directed_edge_count() const { return targets_.size(); }

    std::uint32_t degree(std::uint32_t v) const { return offsets_[v + 1] - offsets_[v]; }
    std::span<const std::uint32_t> neighbors(std::uint32_t v) const {
        return {targets_.data() + offsets_[v], targets_.data() + offsets_[v + 1]};
    }

    std::uint32_t slot_begin(std::uint32_t v) const { return offsets_[v]; }
    std::uint32_t slot_end(std::uint32_t v) const { return offsets_[v + 1]; }
    std::uint32_t slot_source(std::uint32_t slot) const { return sources_[slot]; }
    std::uint32_t slot_target(std::uint32_t slot) const { return targets_[slot]; }
    std::uint32_t reverse_slot(std::uint32_t slot) const { return reverse_[slot]; }

private:
    std::uint32_t n_ = 0;
    std::vector<std::uint32_t> offsets_; // size n+1
    std::vector<std::uint32_t> targets_; // size 2m, sorted per vertex
    std::vector<std::uint32_t> sources_; // size 2m
    std::vector<std::uint32_t> reverse_; // size 2m
};

// G(n, p): every unordered pair present independently with probability p.
// Geometric skipping over the pair sequence, O(n + m) time.
SparseGraph sample_gnp(std::uint32_t n, double edge_prob, rng::Stream& rng);

// Induced subgraph on the vertices at distance <= depth from root, with
// per-vertex marks. Vertices are listed in BFS order (root first);
// edges use local indices into `vertices`.
struct RootedMarkedNeighborhood {
    std::uint32_t root = 0;
    std::uint32_t depth = 0;
    std::vector<std::uint32_t> vertices;                       // original ids
    std::vector<std::uint32_t> dist;                           // per local vertex
    std::vector<std::int32_t> bfs_parent;                      // local index, -1 for root
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges; // local, a < b
    std::vector<std::uint8_t> marks;                           // per local vertex

    bool is_tree() const { return edges.size() + 1 == vertices.size(); }
};

RootedMarkedNeighborhood extract_neighborhood(const SparseGraph& g, std::uint32_t v,
                                              std::uint32_t s,
                                              std::span<const std::uint8_t> marks);

// Reusable extractor for tight per-vertex loops; holds O(n) scratch so the
// per-call cost is proportional to the neighbourhood size.
class NeighborhoodExtractor {
public:
    explicit NeighborhoodExtractor(const SparseGraph& g);
    RootedMarkedNeighborhood extract(std::uint32_t v, std::uint32_t s,
                                     std::span<const std::uint8_t> marks);

private:
    const SparseGraph& g_;
    std::vector<std::uint32_t> stamp_;
    std::vector<std::uint32_t> local_;
    std::uint32_t epoch_ = 0;
};

// Plain-text format: first line "n=<n>", then one "u v" line per edge
// with u < v, sorted. Parse errors carry the offending line number.
void write_edge_list(const SparseGraph& g, std::ostream& out);
SparseGraph read_edge_list(std::istream& in);

} // namespace coremantle::graph
