#include "coremantle/trees.hpp"

#include <algorithm>
#include <cmath>

#include "coremantle/fixedpoint.hpp"
#include "coremantle/probdist.hpp"

namespace coremantle::trees {

using probdist::Constraint;
using probdist::sample_poisson;
using probdist::sample_truncated_poisson;
using probdist::TruncatedPoissonSpec;

char mark_symbol(MarkAlphabet alphabet, std::uint8_t mark) {
    if (alphabet == MarkAlphabet::binary) {
        if (mark > 1)
            throw std::invalid_argument("mark_symbol: binary mark out of range");
        return static_cast<char>('0' + mark);
    }
    if (!legal_triple(mark))
        throw std::invalid_argument("mark_symbol: illegal triple");
    return static_cast<char>('0' + mark);
}

MarkedTree truncate(const MarkedTree& tree, std::uint32_t s) {
    MarkedTree out;
    out.alphabet = tree.alphabet;
    out.sampled_depth = std::min(s, tree.sampled_depth);
    if (tree.size() == 0)
        return out;
    out.add_root();
    out.mark[0] = tree.mark[0];
    // BFS order guarantees parents precede children.
    std::vector<std::uint32_t> remap(tree.size(), UINT32_MAX);
    remap[0] = 0;
    for (std::uint32_t v = 1; v < tree.size(); ++v) {
        if (tree.depth[v] > s)
            continue;
        const std::uint32_t p = remap[static_cast<std::uint32_t>(tree.parent[v])];
        remap[v] = out.add_child(p, tree.mark[v]);
    }
    return out;
}

namespace {

std::string serialize_node(const MarkedTree& tree, std::uint32_t v) {
    std::vector<std::string> parts;
    parts.reserve(tree.children[v].size());
    for (std::uint32_t w : tree.children[v])
        parts.push_back(serialize_node(tree, w));
    std::sort(parts.begin(), parts.end());
    std::string out = "(";
    switch (tree.alphabet) {
    case MarkAlphabet::binary:
        out += tree.mark[v] ? '1' : '0';
        break;
    case MarkAlphabet::triple: {
        const std::uint8_t m = tree.mark[v];
        out += static_cast<char>('0' + ((m >> 2) & 1));
        out += static_cast<char>('0' + ((m >> 1) & 1));
        out += static_cast<char>('0' + (m & 1));
        break;
    }
    }
    for (const std::string& part : parts) {
        out += ' ';
        out += part;
    }
    out += ')';
    return out;
}

} // namespace

std::string serialize(const MarkedTree& tree) {
    if (tree.size() == 0)
        return "()";
    return serialize_node(tree, 0);
}

namespace {

struct Parser {
    std::string_view text;
    std::size_t pos = 0;

    [[noreturn]] void fail(const std::string& what) const {
        throw std::runtime_error("tree parse error at offset " + std::to_string(pos) + ": " + what);
    }
    void expect(char c) {
        if (pos >= text.size() || text[pos] != c)
            fail(std::string("expected '") + c + "'");
        ++pos;
    }
    void skip_spaces() {
        while (pos < text.size() && text[pos] == ' ')
            ++pos;
    }

    // Returns (mark, alphabet-is-triple).
    std::pair<std::uint8_t, bool> parse_mark() {
        std::size_t start = pos;
        while (pos < text.size() && (text[pos] == '0' || text[pos] == '1'))
            ++pos;
        const std::size_t len = pos - start;
        if (len == 1)
            return {static_cast<std::uint8_t>(text[start] - '0'), false};
        if (len == 3) {
            const std::uint8_t triple = static_cast<std::uint8_t>(
                ((text[start] - '0') << 2) | ((text[start + 1] - '0') << 1) | (text[start + 2] - '0'));
            if (!legal_triple(triple))
                fail("illegal triple mark");
            return {triple, true};
        }
        fail("expected a 1-bit or 3-bit mark");
    }

    void parse_node(MarkedTree& tree, std::int32_t parent_id, bool& saw_triple) {
        expect('(');
        auto [mark, is_triple] = parse_mark();
        saw_triple = saw_triple || is_triple;
        std::uint32_t id;
        if (parent_id < 0) {
            id = tree.add_root();
            tree.mark[0] = mark;
        } else {
            id = tree.add_child(static_cast<std::uint32_t>(parent_id), mark);
        }
        skip_spaces();
        while (pos < text.size() && text[pos] == '(') {
            parse_node(tree, static_cast<std::int32_t>(id), saw_triple);
            skip_spaces();
        }
        expect(')');
    }
};

} // namespace

MarkedTree parse(std::string_view text) {
    MarkedTree tree;
    Parser parser{text};
    parser.skip_spaces();
    bool saw_triple = false;
    parser.parse_node(tree, -1, saw_triple);
    parser.skip_spaces();
    if (parser.pos != text.size())
        parser.fail("trailing characters");
    tree.alphabet = saw_triple ? MarkAlphabet::triple : MarkAlphabet::binary;
    if (saw_triple)
        for (std::uint8_t m : tree.mark)
            if (!legal_triple(m))
                throw std::runtime_error("tree parse error: mixed mark alphabets");
    tree.sampled_depth = tree.size() ? *std::max_element(tree.depth.begin(), tree.depth.end()) : 0;
    return tree;
}

MarkedTree sample_gw(double d, std::uint32_t depth, rng::Stream& rng) {
    if (d < 0.0)
        throw std::invalid_argument("sample_gw: d must be nonnegative");
    MarkedTree tree;
    tree.alphabet = MarkAlphabet::binary;
    tree.sampled_depth = depth;
    tree.add_root();
    for (std::uint32_t v = 0; v < tree.size(); ++v) {
        if (tree.depth[v] == depth)
            continue;
        const unsigned c = sample_poisson(d, rng);
        for (unsigned i = 0; i < c; ++i)
            tree.add_child(v, 0);
    }
    return tree;
}

TreeWp tree_wp(const MarkedTree& tree, int k, int t) {
    if (k < 1)
        throw std::invalid_argument("tree_wp: k must be at least 1");
    if (t < 0)
        throw std::invalid_argument("tree_wp: t must be nonnegative");
    const std::size_t n = tree.size();
    const std::uint32_t threshold_up = static_cast<std::uint32_t>(k - 1);
    const std::uint32_t threshold_mark = static_cast<std::uint32_t>(k);

    TreeWp wp;
    wp.k = k;
    wp.rounds = t;
    wp.up.assign(t + 1, std::vector<std::uint8_t>(n, 0));
    wp.down.assign(t + 1, std::vector<std::uint8_t>(n, 0));
    wp.node_mark.assign(t + 1, std::vector<std::uint8_t>(n, 0));

    std::fill(wp.up[0].begin(), wp.up[0].end(), 1);
    for (std::size_t v = 1; v < n; ++v)
        wp.down[0][v] = 1;
    // down at the root stays 0 in every round

    std::vector<std::uint32_t> upsum(n, 0);
    for (int r = 0; r <= t; ++r) {
        const auto& up = wp.up[r];
        for (std::size_t v = 0; v < n; ++v) {
            std::uint32_t acc = 0;
            for (std::uint32_t w : tree.children[v])
                acc += up[w];
            upsum[v] = acc;
        }
        for (std::size_t v = 0; v < n; ++v)
            wp.node_mark[r][v] = (wp.down[r][v] + upsum[v] >= threshold_mark) ? 1 : 0;
        if (r == t)
            break;
        for (std::size_t v = 0; v < n; ++v)
            wp.up[r + 1][v] = (upsum[v] >= threshold_up) ? 1 : 0;
        for (std::size_t v = 1; v < n; ++v) {
            const std::uint32_t u = static_cast<std::uint32_t>(tree.parent[v]);
            const std::uint32_t from_siblings = upsum[u] - up[v];
            wp.down[r + 1][v] = (wp.down[r][u] + from_siblings >= threshold_up) ? 1 : 0;
        }
    }
    return wp;
}

namespace {

MarkedTree with_marks(const MarkedTree& tree, const std::vector<std::uint8_t>& marks,
                      std::uint32_t s) {
    MarkedTree out = tree;
    out.alphabet = MarkAlphabet::binary;
    out.mark = marks;
    return truncate(out, s);
}

} // namespace

MarkedTree message_marked(const MarkedTree& tree, const TreeWp& wp, int round, std::uint32_t s) {
    if (round < 0 || round > wp.rounds)
        throw std::invalid_argument("message_marked: round out of range");
    if (s + static_cast<std::uint32_t>(round) > tree.sampled_depth)
        throw InsufficientDepthError(
            "message_marked: round-" + std::to_string(round) + " messages at depth " +
            std::to_string(s) + " need the tree sampled to depth >= " +
            std::to_string(s + static_cast<std::uint32_t>(round)));
    return with_marks(tree, wp.up[round], s);
}

MarkedTree node_marked(const MarkedTree& tree, const TreeWp& wp, int round, std::uint32_t s) {
    if (round < 0 || round > wp.rounds)
        throw std::invalid_argument("node_marked: round out of range");
    if (s + static_cast<std::uint32_t>(round) + 1 > tree.sampled_depth)
        throw InsufficientDepthError(
            "node_marked: round-" + std::to_string(round) + " marks at depth " + std::to_string(s) +
            " need the tree sampled to depth >= " +
            std::to_string(s + static_cast<std::uint32_t>(round) + 1));
    return with_marks(tree, wp.node_mark[round], s);
}

MarkedTree tree_wp_boundary(const MarkedTree& gw_tree, int k, double p_star, int rounds,
                            rng::Stream& rng) {
    if (p_star < 0.0 || p_star > 1.0)
        throw std::invalid_argument("tree_wp_boundary: p_star must lie in [0,1]");
    if (rounds < 0)
        throw std::invalid_argument("tree_wp_boundary: rounds must be nonnegative");
    const std::size_t n = gw_tree.size();
    const std::uint32_t s = gw_tree.sampled_depth;
    const std::uint32_t threshold = static_cast<std::uint32_t>(k - 1);

    std::vector<std::uint8_t> msg(n);
    for (std::size_t v = 0; v < n; ++v)
        msg[v] = rng.bernoulli(p_star) ? 1 : 0;

    std::vector<std::uint8_t> next(n);
    for (int r = 0; r < rounds; ++r) {
        for (std::size_t v = 0; v < n; ++v) {
            if (gw_tree.depth[v] >= s) {
                next[v] = msg[v]; // boundary vertices keep their Be(p*) bit
                continue;
            }
            std::uint32_t acc = 0;
            for (std::uint32_t w : gw_tree.children[v])
                acc += msg[w];
            next[v] = acc >= threshold ? 1 : 0;
        }
        msg.swap(next);
    }

    MarkedTree out = gw_tree;
    out.alphabet = MarkAlphabet::binary;
    out.mark = std::move(msg);
    return out;
}

MarkedTree sample_bottomup_message_tree(double d, int k, int t, std::uint32_t s,
                                        rng::Stream& rng) {
    if (t < 0)
        throw std::invalid_argument("sample_bottomup_message_tree: t must be nonnegative");
    const auto traj = fixedpoint::density_trajectory({d, k}, t);
    const auto p_at = [&](int r) { return r <= 0 ? 1.0 : traj[static_cast<std::size_t>(r)]; };

    MarkedTree tree = sample_gw(d, s, rng);
    const std::size_t n = tree.size();
    const std::uint32_t threshold = static_cast<std::uint32_t>(k - 1);

    // window index w corresponds to round t - s + w; entry w of a depth-j
    // node is valid for w >= s - j.
    std::vector<std::vector<std::uint8_t>> win(n, std::vector<std::uint8_t>(s + 1, 0));
    for (std::size_t v = 0; v < n; ++v) {
        if (tree.depth[v] != s)
            continue;
        // monotone round-path: still 1 at round r iff u < p^(r)
        const double u = rng.uniform01();
        for (std::uint32_t w = 0; w <= s; ++w)
            win[v][w] = u < p_at(t - static_cast<int>(s) + static_cast<int>(w)) ? 1 : 0;
    }
    // nodes are in BFS order, so reverse iteration is children-first
    for (std::size_t i = n; i-- > 0;) {
        const std::uint32_t j = tree.depth[i];
        if (j == s)
            continue;
        for (std::uint32_t w = s - j; w <= s; ++w) {
            std::uint32_t acc = 0;
            for (std::uint32_t c : tree.children[i])
                acc += win[c][w - 1];
            win[i][w] = acc >= threshold ? 1 : 0;
        }
    }

    for (std::size_t v = 0; v < n; ++v)
        tree.mark[v] = win[v][s];
    tree.alphabet = MarkAlphabet::binary;
    return tree;
}

BranchingSpec BranchingSpec::plain_gw(double d) {
    BranchingSpec spec;
    spec.d = d;
    spec.variant = Variant::plain_gw;
    return spec;
}

BranchingSpec BranchingSpec::two_type_star(double d, int k, double p_star) {
    if (p_star < 0.0 || p_star > 1.0)
        throw std::domain_error("BranchingSpec: p must lie in [0,1]");
    BranchingSpec spec;
    spec.d = d;
    spec.k = k;
    spec.p = p_star;
    spec.variant = Variant::two_type_star;
    return spec;
}

BranchingSpec BranchingSpec::five_type(double d, int k, double p) {
    if (p < 0.0 || p > 1.0)
        throw std::domain_error("BranchingSpec: p must lie in [0,1]");
    BranchingSpec spec;
    spec.d = d;
    spec.k = k;
    spec.p = p;
    spec.variant = Variant::five_type;
    spec.q = fixedpoint::q_of({d, k}, p);
    spec.q_bar = fixedpoint::q_bar_of({d, k}, p);
    return spec;
}

MarkedTree sample_two_type_star(const BranchingSpec& spec, std::uint32_t depth, rng::Stream& rng) {
    if (spec.variant != BranchingSpec::Variant::two_type_star)
        throw std::invalid_argument("sample_two_type_star: wrong spec variant");
    const double rate0 = spec.d * (1.0 - spec.p);
    const double rate1 = spec.d * spec.p;
    const unsigned km1 = static_cast<unsigned>(spec.k - 1);
    const TruncatedPoissonSpec below{rate1, Constraint::less_than, km1};
    const TruncatedPoissonSpec above{rate1, Constraint::at_least, km1};

    MarkedTree tree;
    tree.alphabet = MarkAlphabet::binary;
    tree.sampled_depth = depth;
    tree.add_root();
    tree.mark[0] = rng.bernoulli(spec.p) ? 1 : 0;
    for (std::uint32_t v = 0; v < tree.size(); ++v) {
        if (tree.depth[v] == depth)
            continue;
        const unsigned zeros = sample_poisson(rate0, rng);
        const unsigned ones = sample_truncated_poisson(tree.mark[v] ? above : below, rng);
        for (unsigned i = 0; i < zeros; ++i)
            tree.add_child(v, 0);
        for (unsigned i = 0; i < ones; ++i)
            tree.add_child(v, 1);
    }
    return tree;
}

MarkedTree derive_top_down_marks(const MarkedTree& star, int k) {
    if (star.alphabet != MarkAlphabet::binary)
        throw std::invalid_argument("derive_top_down_marks: input must carry binary up-marks");
    const std::size_t n = star.size();
    const std::uint32_t threshold_down = static_cast<std::uint32_t>(k - 1);
    const std::uint32_t threshold_mark = static_cast<std::uint32_t>(k);

    std::vector<std::uint32_t> upsum(n, 0);
    for (std::size_t v = 0; v < n; ++v) {
        std::uint32_t acc = 0;
        for (std::uint32_t w : star.children[v])
            acc += star.mark[w];
        upsum[v] = acc;
    }

    MarkedTree out = star;
    out.alphabet = MarkAlphabet::triple;
    std::vector<std::uint8_t> down(n, 0);
    for (std::size_t v = 0; v < n; ++v) { // BFS order: parents first
        if (star.parent[v] >= 0) {
            const std::uint32_t u = static_cast<std::uint32_t>(star.parent[v]);
            down[v] = (down[u] + upsum[u] - star.mark[v] >= threshold_down) ? 1 : 0;
        }
        const std::uint8_t node = (down[v] + upsum[v] >= threshold_mark) ? 1 : 0;
        out.mark[v] = static_cast<std::uint8_t>((node << 2) | (star.mark[v] << 1) | down[v]);
        if (star.depth[v] < star.sampled_depth && !legal_triple(out.mark[v]))
            throw std::logic_error("derive_top_down_marks: illegal triple produced");
    }
    return out;
}

MarkedTree sample_five_type(const BranchingSpec& spec, std::uint32_t depth, rng::Stream& rng) {
    if (spec.variant != BranchingSpec::Variant::five_type)
        throw std::invalid_argument("sample_five_type: wrong spec variant");
    const int k = spec.k;
    const double q = spec.q;
    const double rate0 = spec.d * (1.0 - spec.p);
    const double rate1 = spec.d * spec.p;

    MarkedTree tree;
    tree.alphabet = MarkAlphabet::triple;
    tree.sampled_depth = depth;
    tree.add_root();
    {
        const double u = rng.uniform01();
        if (u < 1.0 - spec.p)
            tree.mark[0] = kTriple000;
        else if (u < 1.0 - spec.p + spec.p * q)
            tree.mark[0] = kTriple010;
        else
            tree.mark[0] = kTriple110;
    }

    const auto mixed_child = [&](std::uint32_t v) {
        tree.add_child(v, rng.bernoulli(q) ? kTriple010 : kTriple110);
    };

    for (std::uint32_t v = 0; v < tree.size(); ++v) {
        if (tree.depth[v] == depth)
            continue;
        const unsigned background = sample_poisson(rate0, rng);
        switch (tree.mark[v]) {
        case kTriple000: {
            for (unsigned i = 0; i < background; ++i)
                tree.add_child(v, kTriple000);
            const unsigned h = sample_truncated_poisson(
                {rate1, Constraint::at_most, static_cast<unsigned>(k - 2)}, rng);
            for (unsigned i = 0; i < h; ++i)
                mixed_child(v);
            break;
        }
        case kTriple001: {
            if (rng.bernoulli(spec.q_bar)) {
                for (unsigned i = 0; i < background; ++i)
                    tree.add_child(v, kTriple001);
                for (int i = 0; i < k - 2; ++i)
                    mixed_child(v);
            } else {
                for (unsigned i = 0; i < background; ++i)
                    tree.add_child(v, kTriple000);
                // Po_{<=k-3}(dp); for k = 3 the count is deterministically 0
                if (k > 3) {
                    const unsigned h = sample_truncated_poisson(
                        {rate1, Constraint::at_most, static_cast<unsigned>(k - 3)}, rng);
                    for (unsigned i = 0; i < h; ++i)
                        mixed_child(v);
                }
            }
            break;
        }
        case kTriple010: {
            for (unsigned i = 0; i < background; ++i)
                tree.add_child(v, kTriple001);
            for (int i = 0; i < k - 1; ++i)
                mixed_child(v);
            break;
        }
        case kTriple110: {
            for (unsigned i = 0; i < background; ++i)
                tree.add_child(v, kTriple001);
            const unsigned h = sample_truncated_poisson(
                {rate1, Constraint::at_least, static_cast<unsigned>(k)}, rng);
            for (unsigned i = 0; i < h; ++i)
                tree.add_child(v, kTriple111);
            break;
        }
        case kTriple111: {
            for (unsigned i = 0; i < background; ++i)
                tree.add_child(v, kTriple001);
            const unsigned h = sample_truncated_poisson(
                {rate1, Constraint::at_least, static_cast<unsigned>(k - 1)}, rng);
            for (unsigned i = 0; i < h; ++i)
                tree.add_child(v, kTriple111);
            break;
        }
        default:
            throw std::logic_error("sample_five_type: illegal node type");
        }
    }
    return tree;
}

MarkedTree project_two_type(const MarkedTree& five_type_tree) {
    if (five_type_tree.alphabet != MarkAlphabet::triple)
        throw std::invalid_argument("project_two_type: input must be a 5-type tree");
    MarkedTree out = five_type_tree;
    out.alphabet = MarkAlphabet::binary;
    for (std::uint8_t& m : out.mark)
        m = (m >> 2) & 1;
    return out;
}

FiveTypeStats validate_five_type(const MarkedTree& tree, int k) {
    if (tree.alphabet != MarkAlphabet::triple)
        throw std::invalid_argument("validate_five_type: input must be a 5-type tree");
    FiveTypeStats stats;
    stats.nodes = tree.size();

    for (std::size_t v = 0; v < tree.size(); ++v) {
        const std::uint8_t triple = tree.mark[v];
        if (!legal_triple(triple)) {
            ++stats.violations;
            continue;
        }
        if (tree.parent[v] < 0 && (triple & 1))
            ++stats.violations; // root never receives a down message

        if (tree.depth[v] >= tree.sampled_depth)
            continue; // children not sampled; offspring rules unverifiable
        ++stats.interior_nodes;

        const std::uint8_t node_bit = (triple >> 2) & 1;
        const std::uint8_t up_bit = (triple >> 1) & 1;
        const std::uint8_t down_bit = triple & 1;
        std::uint32_t mid1 = 0, type111 = 0;
        for (std::uint32_t w : tree.children[v])
            mid1 += (tree.mark[w] >> 1) & 1;
        for (std::uint32_t w : tree.children[v])
            type111 += tree.mark[w] == kTriple111;

        // up-message consistency with the children's up bits
        if (up_bit != (mid1 >= static_cast<std::uint32_t>(k - 1) ? 1 : 0))
            ++stats.violations;
        // mark consistency (the eqKathrin2 relation)
        if (node_bit != (down_bit + mid1 >= static_cast<std::uint32_t>(k) ? 1 : 0))
            ++stats.violations;
        // down-message consistency at every child (the eqKathrin1 relation)
        for (std::uint32_t w : tree.children[v]) {
            const std::uint8_t w_up = (tree.mark[w] >> 1) & 1;
            const std::uint8_t w_down = tree.mark[w] & 1;
            const std::uint8_t expected =
                (down_bit + mid1 - w_up >= static_cast<std::uint32_t>(k - 1)) ? 1 : 0;
            if (w_down != expected)
                ++stats.violations;
        }
        // per-type offspring structure
        if (triple == kTriple010 && mid1 != static_cast<std::uint32_t>(k - 1))
            ++stats.violations;
        if (triple == kTriple110 && type111 < static_cast<std::uint32_t>(k))
            ++stats.violations;
        if (triple == kTriple111 && type111 < static_cast<std::uint32_t>(k - 1))
            ++stats.violations;
    }
    return stats;
}

void validate_two_type_star(const MarkedTree& tree, int k) {
    if (tree.alphabet != MarkAlphabet::binary)
        throw std::invalid_argument("validate_two_type_star: input must be binary-marked");
    for (std::size_t v = 0; v < tree.size(); ++v) {
        if (tree.depth[v] >= tree.sampled_depth)
            continue;
        std::uint32_t ones = 0;
        for (std::uint32_t w : tree.children[v])
            ones += tree.mark[w];
        if (tree.mark[v] && ones < static_cast<std::uint32_t>(k - 1))
            throw std::logic_error("validate_two_type_star: type-1 vertex with too few type-1 children");
        if (!tree.mark[v] && ones > static_cast<std::uint32_t>(k - 2))
            throw std::logic_error("validate_two_type_star: type-0 vertex with too many type-1 children");
    }
}

} // namespace coremantle::trees
