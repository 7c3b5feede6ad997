#pragma once

// Seeded node placement and unit-disk connectivity. The border router sits
// at the area center; everything else lands uniformly at random. Draws that
// leave any node unreachable from the border router are regenerated with an
// incremented sub-seed.

#include <map>
#include <set>
#include <vector>

#include "dshrpl/scenario.hpp"
#include "dshrpl/types.hpp"

namespace dshrpl {

struct Position {
    double x = 0.0;
    double y = 0.0;
};

struct Topology {
    std::vector<Position> positions;  // indexed by node id
    std::map<NodeId, std::set<NodeId>> adjacency;

    std::set<NodeId> node_ids() const;
    bool linked(NodeId a, NodeId b) const;
    // True when every node can reach the border router over the link set.
    bool fully_connected() const;
};

// Builds the adjacency for a given placement: bidirectional links wherever
// the distance is <= radio_range (closed boundary).
void recompute_links(Topology& topo, double radio_range_m);

// Throws Error(Config) when the bounded regeneration budget is exhausted.
Topology generate_topology(const ScenarioConfig& config);

} // namespace dshrpl
