#pragma once

// Ordered run log. Every record is one tab-separated line; the digest over
// the canonical serialization is the determinism fingerprint of a run.

#include <cstdint>
#include <string>
#include <vector>

#include "dshrpl/types.hpp"

namespace dshrpl {

struct TraceRecord {
    SimTime at = 0;
    std::string kind;
    std::string actor;
    std::string detail;
};

class EventTrace {
public:
    // Timestamps must be non-decreasing; violations throw Error(Domain).
    void append(SimTime at, std::string kind, std::string actor, std::string detail);

    const std::vector<TraceRecord>& records() const { return records_; }
    std::size_t count_kind(const std::string& kind) const;

    // Tab-separated "time kind actor detail" lines.
    std::string to_text() const;

    // FNV-1a over the canonical text.
    std::uint64_t digest() const;

private:
    std::vector<TraceRecord> records_;
};

} // namespace dshrpl
