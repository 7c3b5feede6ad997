#include "dshrpl/metrics.hpp"

#include <cstdio>

namespace dshrpl {

std::optional<double> detection_rate(const ConfusionCounts& c) {
    const std::uint64_t attackers = c.tp + c.fn;
    if (attackers == 0) return std::nullopt;
    return 100.0 * static_cast<double>(c.tp) / static_cast<double>(attackers);
}

std::optional<double> false_positive_rate(const ConfusionCounts& c) {
    const std::uint64_t honest = c.fp + c.tn;
    if (honest == 0) return std::nullopt;
    return 100.0 * static_cast<double>(c.fp) / static_cast<double>(honest);
}

std::optional<double> false_negative_rate(const ConfusionCounts& c) {
    const std::uint64_t attackers = c.tp + c.fn;
    if (attackers == 0) return std::nullopt;
    return 100.0 * static_cast<double>(c.fn) / static_cast<double>(attackers);
}

std::optional<double> packet_delivery_rate(std::uint64_t sent, std::uint64_t delivered) {
    if (sent == 0) return std::nullopt;
    return 100.0 * static_cast<double>(delivered) / static_cast<double>(sent);
}

std::optional<double> packet_delivery_rate(const std::map<NodeId, std::uint64_t>& sent,
                                           const std::map<NodeId, std::uint64_t>& delivered) {
    std::uint64_t total_sent = 0, total_delivered = 0;
    for (const auto& [id, n] : sent) total_sent += n;
    for (const auto& [id, n] : delivered) total_delivered += n;
    return packet_delivery_rate(total_sent, total_delivered);
}

std::string format_metric(const std::optional<double>& value) {
    if (!value.has_value()) return "NA";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", *value);
    return buf;
}

} // namespace dshrpl
