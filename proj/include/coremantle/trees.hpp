// The tree processes: plain Galton-Watson trees, bottom-up Warning
// Propagation on trees (plain and with Be(p*) boundary), the top-down
// 2-type tree whose types mimic the upward messages, the 5-type tree
// sampled from its offspring generating functions, and the top-down mark
// derivation connecting the two.
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "coremantle/rng.hpp"

namespace coremantle::trees {

enum class MarkAlphabet : std::uint8_t { binary, triple };

// Triples (mark, up-message, down-message) packed as mark<<2|up<<1|down.
inline constexpr std::uint8_t kTriple000 = 0b000;
inline constexpr std::uint8_t kTriple001 = 0b001;
inline constexpr std::uint8_t kTriple010 = 0b010;
inline constexpr std::uint8_t kTriple110 = 0b110;
inline constexpr std::uint8_t kTriple111 = 0b111;

inline bool legal_triple(std::uint8_t t) {
    return t == kTriple000 || t == kTriple001 || t == kTriple010 || t == kTriple110 ||
           t == kTriple111;
}

char mark_symbol(MarkAlphabet alphabet, std::uint8_t mark);

// Rooted tree in BFS order: node 0 is the root and children always have
// larger indices. sampled_depth records the truncation depth used when
// the tree was generated; leaves at that depth stand for unexplored
// subtrees, not genuine leaves.
struct MarkedTree {
    MarkAlphabet alphabet = MarkAlphabet::binary;
    std::uint32_t sampled_depth = 0;
    std::vector<std::int32_t> parent;  // -1 for the root
    std::vector<std::uint32_t> depth;
    std::vector<std::vector<std::uint32_t>> children;
    std::vector<std::uint8_t> mark;

    std::size_t size() const { return parent.size(); }

    std::uint32_t add_root() {
        parent.assign(1, -1);
        depth.assign(1, 0);
        children.assign(1, {});
        mark.assign(1, 0);
        return 0;
    }
    std::uint32_t add_child(std::uint32_t p, std::uint8_t m) {
        const std::uint32_t id = static_cast<std::uint32_t>(parent.size());
        parent.push_back(static_cast<std::int32_t>(p));
        depth.push_back(depth[p] + 1);
        children.emplace_back();
        mark.push_back(m);
        children[p].push_back(id);
        return id;
    }
};

// Keeps nodes at depth <= s; sampled_depth becomes min(s, old).
MarkedTree truncate(const MarkedTree& tree, std::uint32_t s);

// Nested parenthesized text form "(mark child child ...)" with children
// serialized in canonical (sorted) order; round-trips through parse.
std::string serialize(const MarkedTree& tree);
MarkedTree parse(std::string_view text);

// ---- samplers -----------------------------------------------------------

// Unmarked Po(d) Galton-Watson tree truncated at `depth`.
MarkedTree sample_gw(double d, std::uint32_t depth, rng::Stream& rng);

struct InsufficientDepthError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Warning Propagation run on a finite tree, all messages starting at 1.
// up[r][v], down[r][v] and node_mark[r][v] follow the same update rules
// as graph WP specialized to a rooted tree; down at the root is 0 in
// every round.
//
// Truncation bookkeeping: on a tree sampled to depth S, round-r
// up-messages are exact for depth <= S - r and round-r node marks for
// depth <= S - r - 1 (a mark consults the children's round-r messages
// one level deeper). The extraction helpers enforce those bounds.
struct TreeWp {
    int k = 0;
    int rounds = 0;
    std::vector<std::vector<std::uint8_t>> up;        // [r][node]
    std::vector<std::vector<std::uint8_t>> down;      // [r][node]
    std::vector<std::vector<std::uint8_t>> node_mark; // [r][node]
};

TreeWp tree_wp(const MarkedTree& tree, int k, int t);

// Depth-s tree marked with round-r up-messages; requires s + r <= sampled_depth.
MarkedTree message_marked(const MarkedTree& tree, const TreeWp& wp, int round, std::uint32_t s);

// Depth-s tree marked with round-r node marks; requires s + r + 1 <= sampled_depth.
MarkedTree node_marked(const MarkedTree& tree, const TreeWp& wp, int round, std::uint32_t s);

// Boundary-message process on a tree sampled to depth s: every vertex
// starts with an independent Be(p_star) bit, depth-s vertices keep theirs
// in every round, interior vertices update with the k-1 threshold rule.
// Marks of the returned tree are the round-r messages; for r >= s the law
// of any depth prefix has stabilized.
MarkedTree tree_wp_boundary(const MarkedTree& gw_tree, int k, double p_star, int rounds,
                            rng::Stream& rng);

// Exact sampler for the depth-s prefix of the tree marked with round-t
// up-messages, without materializing the depth-(s+t) subtree: conditioned
// on the structure, the boundary messages at depth s are independent
// monotone round-paths with marginals p^(t-s..t), which determine interior
// messages. Algebraically equivalent to tree_wp on the full tree.
MarkedTree sample_bottomup_message_tree(double d, int k, int t, std::uint32_t s,
                                        rng::Stream& rng);

// ---- branching processes ------------------------------------------------

struct BranchingSpec {
    enum class Variant : std::uint8_t { plain_gw, two_type_star, five_type };

    double d = 0.0;
    int k = 3;
    double p = 0.0;
    double q = 0.0;
    double q_bar = 0.0;
    Variant variant = Variant::plain_gw;

    static BranchingSpec plain_gw(double d);
    static BranchingSpec two_type_star(double d, int k, double p_star);
    // Computes q and q_bar; throws std::domain_error when they are not
    // well-defined at (d, k, p).
    static BranchingSpec five_type(double d, int k, double p);
};

// Two-type process whose type is the upward message: the root is type 1
// with probability p_star; a type-0 vertex spawns Po(d(1-p*)) type-0 and
// Po_{<k-1}(dp*) type-1 children, a type-1 vertex Po(d(1-p*)) type-0 and
// Po_{>=k-1}(dp*) type-1 children. Marks are the types.
MarkedTree sample_two_type_star(const BranchingSpec& spec, std::uint32_t depth, rng::Stream& rng);

// Top-down mark derivation on a tree carrying up-marks: down at the root
// is 0, down_w = 1{down_v + sum of up over siblings of w >= k-1}, and
// mark_v = 1{down_v + sum of up over children >= k}. Returns the same
// shape with triple marks. Triples at depth < sampled_depth are checked
// against the legal alphabet; at the truncation boundary the mark bit
// depends on unexplored children and is not meaningful.
MarkedTree derive_top_down_marks(const MarkedTree& star, int k);

// Direct 5-type sampler: root type from (1-p, pq, p(1-q)) on
// (000, 010, 110), offspring drawn per type from the generating-function
// translation into independent truncated-Poisson and Bernoulli draws.
MarkedTree sample_five_type(const BranchingSpec& spec, std::uint32_t depth, rng::Stream& rng);

// First bit of each triple; tree shape unchanged.
MarkedTree project_two_type(const MarkedTree& five_type_tree);

// Structural checks for 5-type trees: legal alphabet everywhere, root
// down-bit 0, and at every interior node (children fully sampled) the
// middle-bit threshold, the exact k-1 rule for 010, the >=k / >=k-1
// type-111 rules for 110 / 111, and the mark/down consistency relations.
struct FiveTypeStats {
    std::uint64_t nodes = 0;
    std::uint64_t interior_nodes = 0;
    std::uint64_t violations = 0;
};

FiveTypeStats validate_five_type(const MarkedTree& tree, int k);

// Interior type-1 vertices have >= k-1 type-1 children, interior type-0
// vertices at most k-2. Throws std::logic_error on violation.
void validate_two_type_star(const MarkedTree& tree, int k);

} // namespace coremantle::trees
