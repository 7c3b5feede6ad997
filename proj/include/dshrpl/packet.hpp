#pragma once

// Wire formats for every control and data message in the protocol.
// All packets share a 4-octet header:
//
//     octet 0   type
//     octet 1   code
//     octet 2-3 checksum (Internet ones'-complement over the whole packet
//               with this field zeroed, stored big-endian)
//
// Multi-octet integers are network byte order. The full octet-by-octet
// layouts are documented in docs/wire-format.md and frozen by tests.

#include <array>
#include <cstdint>
#include <optional>
#include <variant>
#include <vector>

#include "dshrpl/types.hpp"

namespace dshrpl {

enum class PacketType : std::uint8_t {
    Dio = 1,
    ReqpR = 2,
    Ack = 3,
    RplMc = 4,
    Warning = 5,
    Data = 6,
};

using Ipv6Address = std::array<std::uint8_t, 16>;

// Synthetic ULA-style address carrying the node id in the last 4 octets.
Ipv6Address address_for(NodeId id);
NodeId node_from_address(const Ipv6Address& addr);

// Reliability travels as 16-bit fixed point, 1/10000 units.
std::uint16_t reliability_to_wire(double r);
double reliability_from_wire(std::uint16_t w);

struct DioBody {
    NodeId sender;
    Rank rank;                 // kInfiniteRank doubles as the poison value
    std::uint16_t reliability_fp = 0;  // sender final-reliability, 1/10000 units

    bool operator==(const DioBody&) const = default;
};

// Reliability probe flooded from the border router. The node-id/energy pair
// always describes the current transmitter; the route list accumulates every
// hop the packet has traversed.
struct ReqpRBody {
    NodeId transmitter;
    std::uint32_t transmitter_energy = 0;  // residual milli-units
    Ipv6Address source_address{};          // flood origin
    std::uint32_t source_sequence = 0;
    std::vector<NodeId> route;

    bool operator==(const ReqpRBody&) const = default;
};

// One monitoring-table row as claimed by its owner inside a table ACK.
struct ClaimedEntry {
    NodeId neighbor;
    std::uint32_t trust_count = 0;
    std::uint32_t energy_residual = 0;
    std::uint32_t energy_initial = 0;
    std::uint16_t veracity_fp = 0;  // 1/10000 units

    bool operator==(const ClaimedEntry&) const = default;
};

enum class AckKind : std::uint8_t {
    Table = 0,   // REQP_R response carrying the originator's monitoring table
    Probe = 1,   // RPL-MC response
    Report = 2,  // suspicion notice for the border router
};

struct AckBody {
    AckKind kind = AckKind::Table;
    NodeId origin;                  // whose table / who answered / who reports
    std::uint32_t reference = 0;    // REQP_R sequence, probe id, or report seq
    std::vector<NodeId> route;      // hop list toward the border router
    std::vector<ClaimedEntry> table;  // populated for AckKind::Table only
    NodeId subject;                 // accused node, AckKind::Report only
    Rank subject_rank;              // the advertised rank that triggered the report

    bool operator==(const AckBody&) const = default;
};

struct RplMcBody {
    Ipv6Address base{};             // destination address
    std::vector<std::uint8_t> options;

    bool operator==(const RplMcBody&) const = default;
};

// The probe machinery packs its source route into the RPL-MC option bytes.
struct ProbeOptions {
    std::uint32_t probe_id = 0;
    std::vector<NodeId> route;  // full downward route, root first

    bool operator==(const ProbeOptions&) const = default;
};

std::vector<std::uint8_t> pack_probe_options(const ProbeOptions& opt);
ProbeOptions unpack_probe_options(const std::vector<std::uint8_t>& bytes);

struct WarningBody {
    NodeId malicious;
    Rank malicious_rank;
    SimTime issue_time = 0;

    bool operator==(const WarningBody&) const = default;
};

struct DataBody {
    NodeId source;
    std::uint32_t sequence = 0;
    std::uint32_t key_id = 0;
    std::vector<std::uint8_t> ciphertext;  // big-endian magnitude

    bool operator==(const DataBody&) const = default;
};

using Packet = std::variant<DioBody, ReqpRBody, AckBody, RplMcBody, WarningBody, DataBody>;

PacketType type_of(const Packet& p);

// Serializes with network byte order and a freshly computed checksum.
// Throws Error(Overflow) naming the field when a value exceeds its width.
std::vector<std::uint8_t> encode_packet(const Packet& p);

// Parses and validates length, tag and checksum.
// Throws Error(Format) for structural problems and Error(Integrity) for a
// checksum mismatch.
Packet decode_packet(const std::vector<std::uint8_t>& bytes);

// Internet ones'-complement checksum over a byte range (odd length padded
// with a zero octet).
std::uint16_t internet_checksum(const std::uint8_t* data, std::size_t len);

} // namespace dshrpl
