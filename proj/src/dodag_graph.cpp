#include "dshrpl/dodag_graph.hpp"

#include <sstream>

#include "dshrpl/errors.hpp"

namespace dshrpl {

void DodagGraph::set_parent(NodeId child, NodeId parent, Rank child_rank) {
    nodes_.insert(child);
    nodes_.insert(parent);
    parents_[child] = parent;
    ranks_[child] = child_rank;
}

void DodagGraph::detach(NodeId child) {
    parents_.erase(child);
    ranks_[child] = kInfiniteRank;
}

void DodagGraph::quarantine(NodeId id) {
    if (id == kBorderRouter)
        fail(ErrorKind::Domain, "the border router is trusted and cannot be quarantined");
    quarantined_.insert(id);
    parents_.erase(id);
    ranks_.erase(id);
    for (auto it = parents_.begin(); it != parents_.end();) {
        if (it->second == id)
            it = parents_.erase(it);
        else
            ++it;
    }
}

bool DodagGraph::is_attached(NodeId id) const {
    if (id == kBorderRouter) return contains(id);
    return parents_.count(id) != 0 && rank_of(id) != kInfiniteRank;
}

Rank DodagGraph::rank_of(NodeId id) const {
    auto it = ranks_.find(id);
    return it == ranks_.end() ? kInfiniteRank : it->second;
}

std::vector<NodeId> DodagGraph::path_to_root(NodeId id) const {
    std::vector<NodeId> path;
    std::set<NodeId> seen;
    NodeId cur = id;
    while (true) {
        if (!seen.insert(cur).second) return {};  // cycle
        path.push_back(cur);
        if (cur == kBorderRouter) return path;
        auto it = parents_.find(cur);
        if (it == parents_.end()) return {};
        cur = it->second;
    }
}

std::string DodagGraph::validate() const {
    if (parents_.count(kBorderRouter) != 0) return "border router has a parent";
    for (const auto& [child, parent] : parents_) {
        if (is_quarantined(child))
            return "quarantined node " + to_string(child) + " still has a parent edge";
        if (is_quarantined(parent))
            return "edge " + to_string(child) + "->" + to_string(parent) +
                   " touches quarantined parent";
        if (path_to_root(child).empty())
            return "parent walk from " + to_string(child) + " does not reach the root";
        if (rank_of(child) == kInfiniteRank)
            return "attached node " + to_string(child) + " has infinite rank";
        if (parent != kBorderRouter && rank_of(parent) == kInfiniteRank)
            return "parent " + to_string(parent) + " of " + to_string(child) + " is detached";
        if (rank_of(child) <= rank_of(parent) && parent != kBorderRouter)
            return "rank of " + to_string(child) + " does not exceed its parent " +
                   to_string(parent);
        if (parent == kBorderRouter && rank_of(child) <= rank_of(kBorderRouter))
            return "rank of " + to_string(child) + " does not exceed the root rank";
    }
    return {};
}

std::string DodagGraph::to_edge_list() const {
    std::ostringstream os;
    for (const auto& [child, parent] : parents_)
        os << child.value << ' ' << parent.value << ' ' << rank_of(child).value << '\n';
    return os.str();
}

} // namespace dshrpl
