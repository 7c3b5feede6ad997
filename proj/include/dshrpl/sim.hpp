#pragma once

// Deterministic discrete-event engine running the full protocol lifecycle:
// REQP_R warm-up and trust building, DIO-driven DODAG construction, the
// two-stage sinkhole detection loop with quarantine, and encrypted data
// transport. A config plus seed fully determines the event order, the trace
// and every metric.

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "dshrpl/dodag_graph.hpp"
#include "dshrpl/metrics.hpp"
#include "dshrpl/scenario.hpp"
#include "dshrpl/topology.hpp"
#include "dshrpl/trace.hpp"
#include "dshrpl/types.hpp"

namespace dshrpl {

struct AttackerProfile {
    NodeId node;
    Rank advertise_rank{0};
    double drop_probability = 1.0;
    SimTime activation_time = 0;  // honest before this point
};

struct RunOptions {
    bool defense = true;  // false = plain RPL baseline: no trust, no detection
    bool keep_trace = true;
};

struct LinkCounters {
    std::uint64_t sent = 0;       // per-receiver copies put on the air
    std::uint64_t delivered = 0;
    std::uint64_t dropped = 0;    // ambient link loss
    std::uint64_t in_flight = 0;  // still queued when the run ended
};

struct RunResult {
    EventTrace trace;
    std::uint64_t trace_digest = 0;

    ConfusionCounts confusion;
    std::set<NodeId> attackers;
    std::set<NodeId> quarantined;
    std::set<NodeId> unprobed_attackers;  // attackers that never drew a probe

    // Data-plane payload accounting (per origin and totals)
    std::map<NodeId, std::uint64_t> sent_per_node;
    std::map<NodeId, std::uint64_t> delivered_per_node;
    std::uint64_t payloads_sent = 0;
    std::uint64_t payloads_delivered = 0;
    std::uint64_t payloads_dropped = 0;
    std::uint64_t payloads_pending = 0;  // held or in flight at run end
    std::uint64_t decrypt_mismatches = 0;

    // Link-level conservation per packet type (index = PacketType value)
    std::array<LinkCounters, 7> link;

    DodagGraph final_graph;
    std::string graph_violation;  // empty when the final graph validates
};

class Simulator {
public:
    // Seeded topology and attacker draw.
    Simulator(const ScenarioConfig& config, const RunOptions& opts);

    // Fixture constructor: explicit topology and attacker set. Node ids must
    // be dense 0..n-1 with 0 the border router.
    Simulator(const ScenarioConfig& config, const RunOptions& opts, Topology topology,
              const std::set<NodeId>& attackers);

    RunResult run();

    // Post-run inspection hooks for tests.
    const MonitoringTable& monitoring_table(NodeId id) const;
    EnergyLevel node_energy(NodeId id) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;

public:
    ~Simulator();
};

RunResult run_scenario(const ScenarioConfig& config, const RunOptions& opts = {});

} // namespace dshrpl
