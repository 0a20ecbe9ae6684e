#include "coremantle/wp.hpp"

namespace coremantle::wp {

namespace {

// Sum of round-t messages arriving at each vertex.
std::vector<std::uint32_t> incoming_sums(const MessageState& state, const graph::SparseGraph& g) {
    const std::uint32_t n = g.vertex_count();
    std::vector<std::uint32_t> in_sum(n, 0);
    for (std::uint32_t v = 0; v < n; ++v) {
        std::uint32_t acc = 0;
        for (std::uint32_t slot = g.slot_begin(v); slot < g.slot_end(v); ++slot)
            acc += state.messages[g.reverse_slot(slot)];
        in_sum[v] = acc;
    }
    return in_sum;
}

void recompute_marks(MessageState& state, const graph::SparseGraph& g, int k,
                     const std::vector<std::uint32_t>& in_sum) {
    const std::uint32_t n = g.vertex_count();
    state.marks.resize(n);
    state.ones_marks = 0;
    for (std::uint32_t v = 0; v < n; ++v) {
        const std::uint8_t mark = in_sum[v] >= static_cast<std::uint32_t>(k) ? 1 : 0;
        state.marks[v] = mark;
        state.ones_marks += mark;
    }
}

} // namespace

MessageState wp_init(const graph::SparseGraph& g, int k) {
    MessageState state;
    state.round = 0;
    state.messages.assign(g.directed_edge_count(), 1);
    state.ones_messages = g.directed_edge_count();
    const auto in_sum = incoming_sums(state, g); // = deg(v) at round 0
    recompute_marks(state, g, k, in_sum);
    return state;
}

std::uint64_t wp_step(MessageState& state, const graph::SparseGraph& g, int k) {
    const std::uint32_t n = g.vertex_count();
    const auto in_sum = incoming_sums(state, g);

    std::vector<std::uint8_t> next(state.messages.size());
    std::uint64_t changed = 0;
    std::uint64_t ones = 0;
    for (std::uint32_t v = 0; v < n; ++v) {
        for (std::uint32_t slot = g.slot_begin(v); slot < g.slot_end(v); ++slot) {
            // message v->w from round-t values of dv \ w
            const std::uint32_t from_others = in_sum[v] - state.messages[g.reverse_slot(slot)];
            const std::uint8_t value = from_others >= static_cast<std::uint32_t>(k - 1) ? 1 : 0;
            if (value > state.messages[slot])
                throw std::logic_error("wp_step: monotonicity violated");
            changed += value != state.messages[slot];
            ones += value;
            next[slot] = value;
        }
    }
    state.messages = std::move(next);
    state.ones_messages = ones;
    ++state.round;

    const auto new_in_sum = incoming_sums(state, g);
    recompute_marks(state, g, k, new_in_sum);
    return changed;
}

MessageState wp_run(const graph::SparseGraph& g, int k, std::uint32_t t) {
    MessageState state = wp_init(g, k);
    for (std::uint32_t i = 0; i < t; ++i)
        wp_step(state, g, k);
    return state;
}

FixpointResult wp_run_to_fixpoint(const graph::SparseGraph& g, int k, std::uint64_t t_cap) {
    if (t_cap < 1)
        throw std::invalid_argument("wp_run_to_fixpoint: t_cap must be at least 1");
    MessageState state = wp_init(g, k);
    for (std::uint64_t t = 1; t <= t_cap; ++t) {
        if (wp_step(state, g, k) == 0)
            return {std::move(state), static_cast<std::uint32_t>(t)};
    }
    throw ConvergenceError("wp_run_to_fixpoint: no fixpoint within t_cap rounds");
}

std::vector<TraceRow> wp_density_trace(const graph::SparseGraph& g, int k, std::uint32_t t_max,
                                       const kcore::CoreMarking& core) {
    const std::uint32_t n = g.vertex_count();
    if (core.membership.size() != n)
        throw std::invalid_argument("wp_density_trace: core marking does not match graph");

    MessageState state = wp_init(g, k);
    std::vector<TraceRow> trace;
    trace.reserve(t_max + 1);
    const auto record = [&]() {
        std::uint64_t excess = 0;
        for (std::uint32_t v = 0; v < n; ++v)
            excess += state.marks[v] && !core.membership[v];
        trace.push_back({state.round, state.message_density(g), state.mark_fraction(g),
                         n ? static_cast<double>(excess) / static_cast<double>(n) : 0.0});
    };
    record();
    for (std::uint32_t t = 1; t <= t_max; ++t) {
        wp_step(state, g, k);
        record();
    }
    return trace;
}

} // namespace coremantle::wp
