#include "dshrpl/detector.hpp"

#include <algorithm>
#include <cmath>

#include "dshrpl/errors.hpp"

namespace dshrpl {

std::uint32_t dnr_p(Rank node_rank, Rank parent_rank) {
    if (parent_rank == kInfiniteRank)
        fail(ErrorKind::Evidence, "DNR-P undefined without a parent");
    const std::int32_t diff =
        static_cast<std::int32_t>(parent_rank.value) - static_cast<std::int32_t>(node_rank.value);
    return static_cast<std::uint32_t>(std::abs(diff));
}

std::uint32_t dsn_ni(Rank sender_rank, Rank node_rank) {
    const std::int32_t diff =
        static_cast<std::int32_t>(sender_rank.value) - static_cast<std::int32_t>(node_rank.value);
    return static_cast<std::uint32_t>(std::abs(diff));
}

DioVerdict classify_dio(const RankObservation& obs) {
    return dsn_ni(obs.sender_rank, obs.node_rank) > dnr_p(obs.node_rank, obs.parent_rank)
               ? DioVerdict::Suspicious
               : DioVerdict::Benign;
}

PdrThresholdState update_threshold(const PdrThresholdState& state, double new_sample) {
    if (new_sample < 0.0 || new_sample > 1.0)
        fail(ErrorKind::Domain, "PDR sample outside [0,1]");

    PdrThresholdState next = state;
    next.samples.push_back(new_sample);

    const double n = static_cast<double>(next.samples.size());
    double sum = 0.0;
    for (double s : next.samples) sum += s;
    next.pdr_a = sum / n;

    double sq = 0.0;
    for (double s : next.samples) {
        const double d = s - next.pdr_a;
        sq += d * d;
    }
    next.sd = std::sqrt(sq / n);

    next.pdr_t = next.pdr_a - next.sd;
    next.lt_p = std::clamp(next.pdr_a - 2.0 * next.sd, 0.0, 1.0);
    next.ut_p = std::clamp(next.pdr_a + 2.0 * next.sd, 0.0, 1.0);
    return next;
}

ProbeOutcome confirm_sinkhole(const PdrProbeRecord& record, const PdrThresholdState& state) {
    if (record.mc_sent == 0)
        fail(ErrorKind::Evidence, "probe produced no samples; re-probe required");
    return record.pdr() < state.pdr_t ? ProbeOutcome::Confirmed : ProbeOutcome::Cleared;
}

} // namespace dshrpl
