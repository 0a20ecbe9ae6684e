// Warning Propagation on finite graphs: synchronous message updates,
// per-round marks, fixed-point detection, density traces.
#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "coremantle/graph.hpp"
#include "coremantle/kcore.hpp"

namespace coremantle::wp {

// Per-directed-edge messages mu_{v->w}(t) indexed by graph slot, and
// per-vertex marks mu_v(t) derived from the same round's messages.
struct MessageState {
    std::uint32_t round = 0;
    std::vector<std::uint8_t> messages;
    std::vector<std::uint8_t> marks;
    std::uint64_t ones_messages = 0;
    std::uint64_t ones_marks = 0;

    double message_density(const graph::SparseGraph& g) const {
        const std::uint64_t m2 = g.directed_edge_count();
        return m2 ? static_cast<double>(ones_messages) / static_cast<double>(m2) : 1.0;
    }
    double mark_fraction(const graph::SparseGraph& g) const {
        const std::uint32_t n = g.vertex_count();
        return n ? static_cast<double>(ones_marks) / static_cast<double>(n) : 0.0;
    }
};

struct ConvergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// All messages 1, round 0; mark_v = 1{deg(v) >= k}.
MessageState wp_init(const graph::SparseGraph& g, int k);

// One synchronous round (double-buffered); recomputes marks from the new
// messages. Returns the number of messages that changed. Throws
// std::logic_error if any message increases (monotonicity violation).
std::uint64_t wp_step(MessageState& state, const graph::SparseGraph& g, int k);

MessageState wp_run(const graph::SparseGraph& g, int k, std::uint32_t t);

struct FixpointResult {
    MessageState state;
    std::uint32_t t_converged = 0;
};

// Runs until no message changes in a round; on a finite graph this takes
// at most 2m + 1 rounds. Throws ConvergenceError if t_cap is exhausted.
FixpointResult wp_run_to_fixpoint(const graph::SparseGraph& g, int k, std::uint64_t t_cap);

struct TraceRow {
    std::uint32_t t = 0;
    double message_density = 0.0;
    double mark_fraction = 0.0;
    double excess_fraction = 0.0; // |{v : mark=1} \ core| / n
};

std::vector<TraceRow> wp_density_trace(const graph::SparseGraph& g, int k, std::uint32_t t_max,
                                       const kcore::CoreMarking& core);

} // namespace coremantle::wp
