#include "dshrpl/topology.hpp"

#include <cmath>
#include <deque>

#include "dshrpl/errors.hpp"
#include "dshrpl/rng.hpp"

namespace dshrpl {

std::set<NodeId> Topology::node_ids() const {
    std::set<NodeId> ids;
    for (std::uint32_t i = 0; i < positions.size(); ++i) ids.insert(NodeId{i});
    return ids;
}

bool Topology::linked(NodeId a, NodeId b) const {
    auto it = adjacency.find(a);
    return it != adjacency.end() && it->second.count(b) != 0;
}

bool Topology::fully_connected() const {
    if (positions.empty()) return false;
    std::set<NodeId> seen{kBorderRouter};
    std::deque<NodeId> frontier{kBorderRouter};
    while (!frontier.empty()) {
        const NodeId cur = frontier.front();
        frontier.pop_front();
        auto it = adjacency.find(cur);
        if (it == adjacency.end()) continue;
        for (NodeId nb : it->second)
            if (seen.insert(nb).second) frontier.push_back(nb);
    }
    return seen.size() == positions.size();
}

void recompute_links(Topology& topo, double radio_range_m) {
    topo.adjacency.clear();
    for (std::uint32_t i = 0; i < topo.positions.size(); ++i) topo.adjacency[NodeId{i}];
    for (std::uint32_t i = 0; i < topo.positions.size(); ++i) {
        for (std::uint32_t j = i + 1; j < topo.positions.size(); ++j) {
            const double dx = topo.positions[i].x - topo.positions[j].x;
            const double dy = topo.positions[i].y - topo.positions[j].y;
            if (std::sqrt(dx * dx + dy * dy) <= radio_range_m) {
                topo.adjacency[NodeId{i}].insert(NodeId{j});
                topo.adjacency[NodeId{j}].insert(NodeId{i});
            }
        }
    }
}

Topology generate_topology(const ScenarioConfig& config) {
    config.validate();
    constexpr int kMaxRetries = 64;

    for (int attempt = 0; attempt < kMaxRetries; ++attempt) {
        Rng rng = Rng(config.seed).fork(0x70B0 + static_cast<std::uint64_t>(attempt));
        Topology topo;
        topo.positions.resize(config.num_nodes);
        topo.positions[0] = {config.area_width_m / 2.0, config.area_height_m / 2.0};
        for (std::uint32_t i = 1; i < config.num_nodes; ++i) {
            topo.positions[i] = {rng.next_double() * config.area_width_m,
                                 rng.next_double() * config.area_height_m};
        }
        recompute_links(topo, config.radio_range_m);
        if (topo.fully_connected()) return topo;
    }
    fail(ErrorKind::Config, "could not draw a topology connected to the border router");
}

} // namespace dshrpl
