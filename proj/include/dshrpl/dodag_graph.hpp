#pragma once

// Observer-side aggregate of the routing topology: parent edges, ranks and
// the quarantine set. Rebuilt from node states for assertions, export and
// metrics; never consulted by the protocol itself.

#include <map>
#include <set>
#include <string>
#include <vector>

#include "dshrpl/types.hpp"

namespace dshrpl {

class DodagGraph {
public:
    void add_node(NodeId id) { nodes_.insert(id); }

    // Child gains (or replaces) its single parent edge.
    void set_parent(NodeId child, NodeId parent, Rank child_rank);
    void detach(NodeId child);
    void set_rank(NodeId id, Rank r) { ranks_[id] = r; }
    void quarantine(NodeId id);

    bool contains(NodeId id) const { return nodes_.count(id) != 0; }
    bool is_quarantined(NodeId id) const { return quarantined_.count(id) != 0; }
    bool is_attached(NodeId id) const;

    // BR counts as attached with no parent.
    const std::map<NodeId, NodeId>& parent_edges() const { return parents_; }
    const std::map<NodeId, Rank>& ranks() const { return ranks_; }
    const std::set<NodeId>& nodes() const { return nodes_; }
    const std::set<NodeId>& quarantined() const { return quarantined_; }

    Rank rank_of(NodeId id) const;

    // Path from the node up to BR (inclusive); empty when detached or a
    // parent walk fails to terminate at the root.
    std::vector<NodeId> path_to_root(NodeId id) const;

    // Forest check: every parent walk terminates at BR without revisiting a
    // node, no edge touches a quarantined node, BR has no parent. Returns an
    // empty string when consistent, otherwise a description of the first
    // violation found.
    std::string validate() const;

    // "child parent rank" edge list, one line per attached non-root node.
    std::string to_edge_list() const;

private:
    std::set<NodeId> nodes_;
    std::map<NodeId, NodeId> parents_;
    std::map<NodeId, Rank> ranks_;
    std::set<NodeId> quarantined_;
};

} // namespace dshrpl
