#include "dshrpl/trace.hpp"

#include <sstream>

#include "dshrpl/errors.hpp"

namespace dshrpl {

void EventTrace::append(SimTime at, std::string kind, std::string actor, std::string detail) {
    if (!records_.empty() && at < records_.back().at)
        fail(ErrorKind::Domain, "trace timestamps must be non-decreasing");
    records_.push_back({at, std::move(kind), std::move(actor), std::move(detail)});
}

std::size_t EventTrace::count_kind(const std::string& kind) const {
    std::size_t n = 0;
    for (const TraceRecord& r : records_)
        if (r.kind == kind) ++n;
    return n;
}

std::string EventTrace::to_text() const {
    std::ostringstream os;
    for (const TraceRecord& r : records_)
        os << r.at << '\t' << r.kind << '\t' << r.actor << '\t' << r.detail << '\n';
    return os.str();
}

std::uint64_t EventTrace::digest() const {
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (char c : to_text()) {
        h ^= static_cast<std::uint8_t>(c);
        h *= 0x100000001B3ULL;
    }
    return h;
}

} // namespace dshrpl
