// Canonical codes for rooted marked trees and BFS neighbourhoods, so
// isomorphism classes can serve as map keys. Code equality is exactly
// rooted-marked isomorphism for tree inputs; cyclic neighbourhoods are
// lumped into the single reserved class CYCLIC.
#pragma once

#include <string>

#include "coremantle/graph.hpp"
#include "coremantle/trees.hpp"

namespace coremantle::canon {

using Code = std::string;

inline const Code kCyclicCode = "CYCLIC";

// AHU-style bottom-up encoding truncated at depth s: the code of a vertex
// is its mark symbol followed by the lexicographically sorted codes of
// its children. Stable across runs and platforms.
Code canonical_tree_code(const trees::MarkedTree& tree, std::uint32_t s);

// Tree neighbourhoods get the tree code for their BFS tree (which is the
// whole neighbourhood when it is acyclic); anything containing a cycle
// maps to kCyclicCode.
Code canonical_neighborhood_code(const graph::RootedMarkedNeighborhood& nb);

} // namespace coremantle::canon
