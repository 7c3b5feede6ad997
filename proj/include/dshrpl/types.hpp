#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <string>

namespace dshrpl {

// Simulation clock, integer microseconds. Integer ticks keep event ordering
// exact and hashable.
using SimTime = std::int64_t;

constexpr SimTime kMicrosPerSecond = 1'000'000;

inline constexpr SimTime seconds_to_us(double s) {
    return static_cast<SimTime>(s * static_cast<double>(kMicrosPerSecond));
}

// Node identity. Id 0 is reserved for the border router.
struct NodeId {
    std::uint32_t value = 0;

    constexpr NodeId() = default;
    constexpr explicit NodeId(std::uint32_t v) : value(v) {}

    constexpr bool is_root() const { return value == 0; }

    auto operator<=>(const NodeId&) const = default;
};

inline constexpr NodeId kBorderRouter{0};

// DODAG rank, dimensionless rank units. Lower is closer to the root.
// kInfiniteRank marks an unattached node.
struct Rank {
    std::uint16_t value = 0;

    constexpr Rank() = default;
    constexpr explicit Rank(std::uint16_t v) : value(v) {}

    auto operator<=>(const Rank&) const = default;
};

inline constexpr Rank kInfiniteRank{0xFFFF};
// Largest rank a node may actually hold (kInfiniteRank is the sentinel).
inline constexpr std::uint16_t kMaxAssignableRank = 0xFFFE;

// Residual/initial energy in fixed-point milli-units. Residual only ever
// decreases over a run.
struct EnergyLevel {
    std::uint32_t residual = 0;
    std::uint32_t initial = 0;

    constexpr EnergyLevel() = default;
    constexpr EnergyLevel(std::uint32_t res, std::uint32_t init)
        : residual(res), initial(init) {}

    double fraction() const {
        return initial == 0 ? 0.0
                            : static_cast<double>(residual) / static_cast<double>(initial);
    }

    // Debit saturates at zero; a drained node keeps running in the model.
    void debit(std::uint32_t cost) {
        residual = cost >= residual ? 0 : residual - cost;
    }

    auto operator<=>(const EnergyLevel&) const = default;
};

std::string to_string(NodeId id);
std::string to_string(Rank r);

} // namespace dshrpl

template <>
struct std::hash<dshrpl::NodeId> {
    std::size_t operator()(const dshrpl::NodeId& id) const noexcept {
        return std::hash<std::uint32_t>{}(id.value);
    }
};
