#pragma once

// Per-node monitoring table and the reliability calculus built on it.
// A node scores each neighbor on three components (energy, trust and
// veracity), blends each with its own history, and combines them into a
// single weighted reliability in [0,1].

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dshrpl/packet.hpp"
#include "dshrpl/types.hpp"

namespace dshrpl {

struct ReliabilityWeights {
    double w_energy = 0.3;
    double w_trust = 0.4;
    double w_veracity = 0.3;
    double alpha = 0.7;                         // history mixing factor
    SimTime delta_t = 10 * kMicrosPerSecond;    // reliability update period

    // weights must sum to 1 (± 1e-9) and every field must lie in [0,1]
    void validate() const;
};

// Trust counters are unbounded; the trust component saturates at this many
// observed forwards.
inline constexpr std::uint32_t kDefaultTrustCap = 20;

struct MonitoringEntry {
    NodeId neighbor;
    std::uint32_t trust_count = 0;
    EnergyLevel observed_energy{};
    // Truthful until an actual claims comparison says otherwise; comparisons
    // with zero overlap never overwrite this.
    double veracity = 1.0;
    // Per-component blending history; empty until the first update.
    std::optional<double> last_energy_rel;
    std::optional<double> last_trust_rel;
    std::optional<double> last_veracity_rel;
    SimTime last_update = 0;
};

// Append-only observation record standing in for the node's tamper-proof
// hardware store.
class TpmStore {
public:
    struct Observation {
        SimTime at;
        NodeId neighbor;
        std::string field;
        double value;
    };

    void append(SimTime at, NodeId neighbor, const std::string& field, double value) {
        log_.push_back({at, neighbor, field, value});
    }

    const std::vector<Observation>& log() const { return log_; }

private:
    std::vector<Observation> log_;
};

class MonitoringTable {
public:
    explicit MonitoringTable(std::uint32_t trust_cap = kDefaultTrustCap)
        : trust_cap_(trust_cap) {}

    // Called once per distinct REQP_R forward observed from this neighbor.
    void record_forward(SimTime at, NodeId neighbor, EnergyLevel energy);

    void record_veracity(SimTime at, NodeId neighbor, double score);

    bool contains(NodeId neighbor) const { return entries_.count(neighbor) != 0; }
    const MonitoringEntry* find(NodeId neighbor) const;
    MonitoringEntry* find(NodeId neighbor);

    const std::map<NodeId, MonitoringEntry>& entries() const { return entries_; }
    const TpmStore& tpm() const { return tpm_; }

    std::uint32_t trust_cap() const { return trust_cap_; }

    // Normalized [0,1] components feeding the weighted reliability.
    double energy_component(const MonitoringEntry& e) const { return e.observed_energy.fraction(); }
    double trust_component(const MonitoringEntry& e) const;
    double veracity_component(const MonitoringEntry& e) const { return e.veracity; }

    // Runs one reliability update for every entry: each component is blended
    // with its stored history and the result cached back into the entry.
    // Returns the per-neighbor weighted reliabilities.
    std::map<NodeId, double> update_reliabilities(SimTime now, const ReliabilityWeights& w);

    // Debug dump, one "neighbor trust energy veracity" line per entry.
    std::string to_text() const;

    // Wire form for table ACKs.
    std::vector<ClaimedEntry> claims() const;

private:
    std::uint32_t trust_cap_;
    std::map<NodeId, MonitoringEntry> entries_;
    TpmStore tpm_;
};

// Blend of a fresh observation with the previous value: alpha*direct +
// (1-alpha)*previous. Inputs must be in [0,1].
double component_reliability(double direct, double previous, double alpha);

// Weighted combination of the three components; stays in [0,1] for valid
// weights (1 = complete reliability, 0 = non-reliability).
double weighted_reliability(double energy, double trust, double veracity,
                            const ReliabilityWeights& w);

// Arithmetic mean over the contributing assessments. Throws
// Error(Evidence) on an empty list.
double final_reliability(const std::vector<double>& received_values);
double self_reliability(const std::vector<double>& received_about_self);

// Fraction of the peer's claims about shared neighbors that agree with the
// majority local view (trust within +-1 and energy within 5%); 0.5 when no
// neighbors are shared. "other_peers" carries claim sets already held from
// other nodes and contributes to the majority alongside our own observations.
double veracity_score(const MonitoringTable& own,
                      const std::vector<ClaimedEntry>& peer_claims,
                      const std::map<NodeId, std::vector<ClaimedEntry>>& other_peers = {});

// Number of claims in the list that concern neighbors we observe ourselves;
// zero means a veracity comparison would carry no evidence.
std::size_t overlapping_claims(const MonitoringTable& own,
                               const std::vector<ClaimedEntry>& peer_claims);

} // namespace dshrpl
