#pragma once

// Node-level classification tallies and the four run metrics. Rates whose
// denominator is empty are "not applicable" rather than zero, so callers can
// tell an attack-free run from a perfectly missed one.

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "dshrpl/types.hpp"

namespace dshrpl {

struct ConfusionCounts {
    std::uint64_t tp = 0;  // attackers quarantined
    std::uint64_t tn = 0;  // honest non-root nodes left alone
    std::uint64_t fp = 0;  // honest nodes quarantined
    std::uint64_t fn = 0;  // attackers never quarantined
};

// 100 * tp / (tp + fn); empty when the run had no attackers.
std::optional<double> detection_rate(const ConfusionCounts& c);

// 100 * fp / (fp + tn); empty when the run had no honest non-root nodes.
std::optional<double> false_positive_rate(const ConfusionCounts& c);

// 100 * fn / (fn + tp); complements detection_rate exactly.
std::optional<double> false_negative_rate(const ConfusionCounts& c);

// 100 * total delivered / total sent over data payloads.
std::optional<double> packet_delivery_rate(const std::map<NodeId, std::uint64_t>& sent,
                                           const std::map<NodeId, std::uint64_t>& delivered);
std::optional<double> packet_delivery_rate(std::uint64_t sent, std::uint64_t delivered);

struct MetricsRow {
    std::string scenario;
    double attack_interval = 0.0;
    std::string defense_mode;  // "dsh-rpl" or "off"
    std::uint64_t seed = 0;
    std::optional<double> dr;
    std::optional<double> fpr;
    std::optional<double> fnr;
    std::optional<double> pdr;
    double runtime_s = 0.0;
    std::string error;  // empty on success
};

// Fixed 4-decimal formatting; "NA" for not-applicable values.
std::string format_metric(const std::optional<double>& value);

} // namespace dshrpl
