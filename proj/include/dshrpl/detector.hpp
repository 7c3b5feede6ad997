#pragma once

// Two-stage sinkhole detection. Stage one is a local rank rule: a DIO is
// suspicious when the sender's advertised rank sits further from the
// receiver than the receiver's own parent does (DSN-NI > DNR-P). Stage two
// is root-driven: the suspect's route is probed with RPL-MC messages and the
// measured delivery rate compared against a statistical threshold.

#include <cstdint>
#include <vector>

#include "dshrpl/types.hpp"

namespace dshrpl {

struct RankObservation {
    Rank node_rank;
    Rank parent_rank;  // recorded when the routing table was built/updated
    Rank sender_rank;  // advertised in the DIO under test
    NodeId sender;
};

enum class DioVerdict : std::uint8_t { Benign, Suspicious };

// |parent_rank - node_rank|. Throws Error(Evidence) when the node has no
// parent (parent_rank infinite).
std::uint32_t dnr_p(Rank node_rank, Rank parent_rank);

// |sender_rank - node_rank|.
std::uint32_t dsn_ni(Rank sender_rank, Rank node_rank);

// Suspicious iff DSN-NI strictly exceeds DNR-P.
DioVerdict classify_dio(const RankObservation& obs);

struct PdrProbeRecord {
    std::vector<NodeId> route;  // root-first, destination last
    NodeId suspect;
    std::uint32_t mc_sent = 0;
    std::uint32_t acks_received = 0;

    double pdr() const {
        return mc_sent == 0 ? 0.0
                            : static_cast<double>(acks_received) / static_cast<double>(mc_sent);
    }
};

struct PdrThresholdState {
    std::vector<double> samples;  // clean-route PDR history
    double pdr_a = 0.0;           // mean
    double sd = 0.0;              // population standard deviation
    double pdr_t = 0.0;           // decision threshold: mean - sd
    double lt_p = 0.0;            // abnormality bounds: mean -+ 2*sd,
    double ut_p = 1.0;            //   clamped to [0,1]; reporting only
};

// Appends the sample and recomputes mean, population SD, threshold and
// bounds with a two-pass sweep over the stored history.
PdrThresholdState update_threshold(const PdrThresholdState& state, double new_sample);

enum class ProbeOutcome : std::uint8_t { Confirmed, Cleared };

// Confirmed iff the measured PDR falls strictly below the threshold.
// Throws Error(Evidence) when no probe was actually sent.
ProbeOutcome confirm_sinkhole(const PdrProbeRecord& record, const PdrThresholdState& state);

} // namespace dshrpl
