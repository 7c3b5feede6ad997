#pragma once

// Parent selection and rank assignment. A node admits neighbors whose final
// reliability clears the configured threshold, prefers the most reliable one
// (ties: lowest advertised rank, then lowest id), and derives its own rank
// from the chosen parent's rank and reliability.

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <vector>

#include "dshrpl/dodag_graph.hpp"
#include "dshrpl/types.hpp"

namespace dshrpl {

struct ParentCandidate {
    NodeId neighbor;
    double final_reliability = 0.0;  // aggregated assessment of this neighbor
    Rank advertised_rank;            // from its most recent DIO

    bool operator==(const ParentCandidate&) const = default;
};

struct RankParams {
    std::uint16_t min_h = 128;   // minimum hop rank increase
    std::uint16_t max_h = 1024;  // advisory ceiling on a single hop increase
    std::uint16_t root_base = 128;
    double reliability_threshold = 0.5;

    void validate() const;
};

struct ParentSelection {
    std::vector<ParentCandidate> parent_set;  // every candidate above threshold
    std::optional<ParentCandidate> chosen;    // empty = node stays unattached
};

ParentSelection select_parents(const std::vector<ParentCandidate>& candidates,
                               const RankParams& params);

// rank = parent_rank + round(reliability * 100) + min_h. Throws
// Error(Overflow) when the result does not fit a 16-bit rank; the node then
// refuses attachment.
Rank compute_rank(Rank parent_rank, double parent_final_reliability, const RankParams& params);

// Static snapshot fed to the standalone builder: the link set plus each
// node's aggregated reliability assessment of each neighbor.
struct BuildInput {
    std::set<NodeId> nodes;  // must include the border router
    std::map<NodeId, std::set<NodeId>> neighbors;
    // final_reliability(observer, neighbor); symmetric access, assessments
    // need not be.
    std::function<double(NodeId, NodeId)> final_reliability;
};

// Runs DIO propagation to quiescence over the snapshot and returns the
// resulting graph. Unreachable or below-threshold nodes stay unattached.
DodagGraph build_dodag(const BuildInput& input, const RankParams& params);

} // namespace dshrpl
