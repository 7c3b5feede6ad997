#include "dshrpl/dodag_builder.hpp"

#include <algorithm>
#include <cmath>

#include "dshrpl/errors.hpp"

namespace dshrpl {

void RankParams::validate() const {
    if (min_h == 0 || min_h > max_h)
        fail(ErrorKind::Config, "rank params require 0 < min_h <= max_h");
    if (root_base == 0 || root_base > kMaxAssignableRank)
        fail(ErrorKind::Config, "root_base outside assignable rank range");
    if (reliability_threshold < 0.0 || reliability_threshold > 1.0)
        fail(ErrorKind::Config, "reliability threshold outside [0,1]");
}

ParentSelection select_parents(const std::vector<ParentCandidate>& candidates,
                               const RankParams& params) {
    params.validate();
    ParentSelection sel;
    for (const ParentCandidate& c : candidates)
        if (c.final_reliability >= params.reliability_threshold) sel.parent_set.push_back(c);

    std::sort(sel.parent_set.begin(), sel.parent_set.end(),
              [](const ParentCandidate& a, const ParentCandidate& b) {
                  if (a.final_reliability != b.final_reliability)
                      return a.final_reliability > b.final_reliability;
                  if (a.advertised_rank != b.advertised_rank)
                      return a.advertised_rank < b.advertised_rank;
                  return a.neighbor < b.neighbor;
              });

    if (!sel.parent_set.empty()) sel.chosen = sel.parent_set.front();
    return sel;
}

Rank compute_rank(Rank parent_rank, double parent_final_reliability, const RankParams& params) {
    params.validate();
    if (parent_final_reliability < 0.0 || parent_final_reliability > 1.0)
        fail(ErrorKind::Domain, "parent reliability outside [0,1]");
    if (parent_rank == kInfiniteRank)
        fail(ErrorKind::Domain, "cannot derive a rank from a detached parent");

    const std::uint32_t reliability_term =
        static_cast<std::uint32_t>(std::floor(parent_final_reliability * 100.0 + 0.5));
    const std::uint32_t raw = static_cast<std::uint32_t>(parent_rank.value) + reliability_term +
                              static_cast<std::uint32_t>(params.min_h);
    if (raw > kMaxAssignableRank)
        fail(ErrorKind::Overflow, "rank overflow: node refuses attachment");
    return Rank{static_cast<std::uint16_t>(raw)};
}

DodagGraph build_dodag(const BuildInput& input, const RankParams& params) {
    params.validate();
    if (input.nodes.count(kBorderRouter) == 0)
        fail(ErrorKind::Config, "build_dodag requires the border router");

    DodagGraph graph;
    for (NodeId id : input.nodes) graph.add_node(id);
    graph.set_rank(kBorderRouter, Rank{params.root_base});

    std::map<NodeId, Rank> rank;
    std::map<NodeId, NodeId> parent;
    rank[kBorderRouter] = Rank{params.root_base};

    auto rank_of = [&](NodeId id) {
        auto it = rank.find(id);
        return it == rank.end() ? kInfiniteRank : it->second;
    };

    // Fixpoint iteration stands in for DIO propagation: every pass each node
    // re-evaluates its parent against current advertised ranks. The pass
    // bound is generous; scenarios converge in a handful of sweeps.
    const std::size_t max_passes = input.nodes.size() * input.nodes.size() + 8;
    for (std::size_t pass = 0; pass < max_passes; ++pass) {
        bool changed = false;
        for (NodeId id : input.nodes) {
            if (id == kBorderRouter) continue;

            std::vector<ParentCandidate> candidates;
            auto adj = input.neighbors.find(id);
            if (adj != input.neighbors.end()) {
                for (NodeId nb : adj->second) {
                    const Rank advertised = rank_of(nb);
                    if (advertised == kInfiniteRank) continue;
                    if (advertised >= rank_of(id)) continue;  // upward only
                    candidates.push_back(
                        {nb, input.final_reliability(id, nb), advertised});
                }
            }

            ParentSelection sel = select_parents(candidates, params);
            if (!sel.chosen) {
                if (rank.count(id) != 0) {  // lost every candidate: detach
                    rank.erase(id);
                    parent.erase(id);
                    changed = true;
                }
                continue;
            }

            Rank new_rank;
            try {
                new_rank = compute_rank(sel.chosen->advertised_rank,
                                        sel.chosen->final_reliability, params);
            } catch (const Error&) {
                continue;  // overflow: keep the current attachment
            }

            auto p = parent.find(id);
            if (p == parent.end() || p->second != sel.chosen->neighbor ||
                rank_of(id) != new_rank) {
                parent[id] = sel.chosen->neighbor;
                rank[id] = new_rank;
                changed = true;
            }
        }
        if (!changed) break;
    }

    for (const auto& [child, par] : parent) graph.set_parent(child, par, rank[child]);
    for (const auto& [id, r] : rank) graph.set_rank(id, r);
    return graph;
}

} // namespace dshrpl
