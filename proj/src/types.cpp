#include "dshrpl/types.hpp"

namespace dshrpl {

std::string to_string(NodeId id) {
    return id.is_root() ? "BR" : "N" + std::to_string(id.value);
}

std::string to_string(Rank r) {
    return r == kInfiniteRank ? "inf" : std::to_string(r.value);
}

} // namespace dshrpl
