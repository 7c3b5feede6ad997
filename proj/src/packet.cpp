#include "dshrpl/packet.hpp"

#include <cstring>

#include "dshrpl/errors.hpp"

namespace dshrpl {

namespace {

constexpr std::size_t kHeaderSize = 4;
constexpr std::size_t kChecksumOffset = 2;

class Writer {
public:
    explicit Writer(std::vector<std::uint8_t>& out) : out_(out) {}

    void u8(std::uint8_t v) { out_.push_back(v); }

    void u16(std::uint16_t v) {
        out_.push_back(static_cast<std::uint8_t>(v >> 8));
        out_.push_back(static_cast<std::uint8_t>(v & 0xFF));
    }

    void u32(std::uint32_t v) {
        u16(static_cast<std::uint16_t>(v >> 16));
        u16(static_cast<std::uint16_t>(v & 0xFFFF));
    }

    void u64(std::uint64_t v) {
        u32(static_cast<std::uint32_t>(v >> 32));
        u32(static_cast<std::uint32_t>(v & 0xFFFFFFFF));
    }

    void bytes(const std::uint8_t* data, std::size_t len) {
        out_.insert(out_.end(), data, data + len);
    }

    void count16(std::size_t n, const char* field) {
        if (n > 0xFFFF) fail(ErrorKind::Overflow, std::string("field overflow: ") + field);
        u16(static_cast<std::uint16_t>(n));
    }

private:
    std::vector<std::uint8_t>& out_;
};

class Reader {
public:
    Reader(const std::uint8_t* data, std::size_t len) : data_(data), len_(len) {}

    std::uint8_t u8() {
        need(1);
        return data_[pos_++];
    }

    std::uint16_t u16() {
        need(2);
        std::uint16_t v = static_cast<std::uint16_t>(data_[pos_] << 8) |
                          static_cast<std::uint16_t>(data_[pos_ + 1]);
        pos_ += 2;
        return v;
    }

    std::uint32_t u32() {
        std::uint32_t hi = u16();
        return (hi << 16) | u16();
    }

    std::uint64_t u64() {
        std::uint64_t hi = u32();
        return (hi << 32) | u32();
    }

    void bytes(std::uint8_t* dst, std::size_t len) {
        need(len);
        std::memcpy(dst, data_ + pos_, len);
        pos_ += len;
    }

    std::size_t remaining() const { return len_ - pos_; }

    void expect_end() const {
        if (pos_ != len_) fail(ErrorKind::Format, "trailing bytes after packet payload");
    }

private:
    void need(std::size_t n) const {
        if (len_ - pos_ < n) fail(ErrorKind::Format, "truncated packet");
    }

    const std::uint8_t* data_;
    std::size_t len_;
    std::size_t pos_ = 0;
};

void encode_body(Writer& w, const DioBody& b) {
    w.u32(b.sender.value);
    w.u16(b.rank.value);
    w.u16(b.reliability_fp);
}

void encode_body(Writer& w, const ReqpRBody& b) {
    w.u32(b.transmitter.value);
    w.u32(b.transmitter_energy);
    w.bytes(b.source_address.data(), b.source_address.size());
    w.u32(b.source_sequence);
    w.count16(b.route.size(), "reqp-r route");
    for (NodeId hop : b.route) w.u32(hop.value);
}

void encode_body(Writer& w, const AckBody& b) {
    w.u32(b.origin.value);
    w.u32(b.reference);
    w.count16(b.route.size(), "ack route");
    for (NodeId hop : b.route) w.u32(hop.value);
    if (b.kind == AckKind::Table) {
        w.count16(b.table.size(), "ack table");
        for (const ClaimedEntry& e : b.table) {
            w.u32(e.neighbor.value);
            w.u32(e.trust_count);
            w.u32(e.energy_residual);
            w.u32(e.energy_initial);
            w.u16(e.veracity_fp);
        }
    } else if (!b.table.empty()) {
        fail(ErrorKind::Overflow, "field overflow: only table acks carry a table");
    }
    if (b.kind == AckKind::Report) {
        w.u32(b.subject.value);
        w.u16(b.subject_rank.value);
    } else if (b.subject != NodeId{} || b.subject_rank != Rank{}) {
        fail(ErrorKind::Overflow, "field overflow: only reports carry a subject");
    }
}

void encode_body(Writer& w, const RplMcBody& b) {
    w.bytes(b.base.data(), b.base.size());
    w.count16(b.options.size(), "rpl-mc options");
    w.bytes(b.options.data(), b.options.size());
}

void encode_body(Writer& w, const WarningBody& b) {
    w.u32(b.malicious.value);
    w.u16(b.malicious_rank.value);
    w.u64(static_cast<std::uint64_t>(b.issue_time));
}

void encode_body(Writer& w, const DataBody& b) {
    w.u32(b.source.value);
    w.u32(b.sequence);
    w.u32(b.key_id);
    w.count16(b.ciphertext.size(), "data ciphertext");
    w.bytes(b.ciphertext.data(), b.ciphertext.size());
}

DioBody decode_dio(Reader& r) {
    DioBody b;
    b.sender = NodeId{r.u32()};
    b.rank = Rank{r.u16()};
    b.reliability_fp = r.u16();
    return b;
}

ReqpRBody decode_reqp(Reader& r) {
    ReqpRBody b;
    b.transmitter = NodeId{r.u32()};
    b.transmitter_energy = r.u32();
    r.bytes(b.source_address.data(), b.source_address.size());
    b.source_sequence = r.u32();
    std::uint16_t n = r.u16();
    b.route.reserve(n);
    for (std::uint16_t i = 0; i < n; ++i) b.route.push_back(NodeId{r.u32()});
    return b;
}

AckBody decode_ack(Reader& r, std::uint8_t code) {
    if (code > 2) fail(ErrorKind::Format, "unknown ack code");
    AckBody b;
    b.kind = static_cast<AckKind>(code);
    b.origin = NodeId{r.u32()};
    b.reference = r.u32();
    std::uint16_t hops = r.u16();
    b.route.reserve(hops);
    for (std::uint16_t i = 0; i < hops; ++i) b.route.push_back(NodeId{r.u32()});
    if (b.kind == AckKind::Table) {
        std::uint16_t rows = r.u16();
        b.table.reserve(rows);
        for (std::uint16_t i = 0; i < rows; ++i) {
            ClaimedEntry e;
            e.neighbor = NodeId{r.u32()};
            e.trust_count = r.u32();
            e.energy_residual = r.u32();
            e.energy_initial = r.u32();
            e.veracity_fp = r.u16();
            b.table.push_back(e);
        }
    }
    if (b.kind == AckKind::Report) {
        b.subject = NodeId{r.u32()};
        b.subject_rank = Rank{r.u16()};
    }
    return b;
}

RplMcBody decode_rplmc(Reader& r) {
    RplMcBody b;
    r.bytes(b.base.data(), b.base.size());
    std::uint16_t n = r.u16();
    b.options.resize(n);
    if (n > 0) r.bytes(b.options.data(), n);
    return b;
}

WarningBody decode_warning(Reader& r) {
    WarningBody b;
    b.malicious = NodeId{r.u32()};
    b.malicious_rank = Rank{r.u16()};
    b.issue_time = static_cast<SimTime>(r.u64());
    return b;
}

DataBody decode_data(Reader& r) {
    DataBody b;
    b.source = NodeId{r.u32()};
    b.sequence = r.u32();
    b.key_id = r.u32();
    std::uint16_t n = r.u16();
    b.ciphertext.resize(n);
    if (n > 0) r.bytes(b.ciphertext.data(), n);
    return b;
}

std::uint8_t code_of(const Packet& p) {
    if (const auto* ack = std::get_if<AckBody>(&p))
        return static_cast<std::uint8_t>(ack->kind);
    return 0;
}

} // namespace

Ipv6Address address_for(NodeId id) {
    Ipv6Address addr{};
    addr[0] = 0xFD;
    addr[12] = static_cast<std::uint8_t>(id.value >> 24);
    addr[13] = static_cast<std::uint8_t>(id.value >> 16);
    addr[14] = static_cast<std::uint8_t>(id.value >> 8);
    addr[15] = static_cast<std::uint8_t>(id.value);
    return addr;
}

NodeId node_from_address(const Ipv6Address& addr) {
    return NodeId{(static_cast<std::uint32_t>(addr[12]) << 24) |
                  (static_cast<std::uint32_t>(addr[13]) << 16) |
                  (static_cast<std::uint32_t>(addr[14]) << 8) |
                  static_cast<std::uint32_t>(addr[15])};
}

std::uint16_t reliability_to_wire(double r) {
    if (r < 0.0 || r > 1.0) fail(ErrorKind::Overflow, "field overflow: reliability");
    return static_cast<std::uint16_t>(r * 10000.0 + 0.5);
}

double reliability_from_wire(std::uint16_t w) {
    return static_cast<double>(w) / 10000.0;
}

std::vector<std::uint8_t> pack_probe_options(const ProbeOptions& opt) {
    std::vector<std::uint8_t> out;
    Writer w(out);
    w.u32(opt.probe_id);
    w.count16(opt.route.size(), "probe route");
    for (NodeId hop : opt.route) w.u32(hop.value);
    return out;
}

ProbeOptions unpack_probe_options(const std::vector<std::uint8_t>& bytes) {
    Reader r(bytes.data(), bytes.size());
    ProbeOptions opt;
    opt.probe_id = r.u32();
    std::uint16_t n = r.u16();
    opt.route.reserve(n);
    for (std::uint16_t i = 0; i < n; ++i) opt.route.push_back(NodeId{r.u32()});
    r.expect_end();
    return opt;
}

PacketType type_of(const Packet& p) {
    switch (p.index()) {
        case 0: return PacketType::Dio;
        case 1: return PacketType::ReqpR;
        case 2: return PacketType::Ack;
        case 3: return PacketType::RplMc;
        case 4: return PacketType::Warning;
        default: return PacketType::Data;
    }
}

std::uint16_t internet_checksum(const std::uint8_t* data, std::size_t len) {
    std::uint32_t sum = 0;
    std::size_t i = 0;
    for (; i + 1 < len; i += 2)
        sum += (static_cast<std::uint32_t>(data[i]) << 8) | data[i + 1];
    if (i < len) sum += static_cast<std::uint32_t>(data[i]) << 8;
    while (sum >> 16) sum = (sum & 0xFFFF) + (sum >> 16);
    return static_cast<std::uint16_t>(~sum & 0xFFFF);
}

std::vector<std::uint8_t> encode_packet(const Packet& p) {
    std::vector<std::uint8_t> out;
    Writer w(out);
    w.u8(static_cast<std::uint8_t>(type_of(p)));
    w.u8(code_of(p));
    w.u16(0);  // checksum placeholder
    std::visit([&w](const auto& body) { encode_body(w, body); }, p);

    std::uint16_t sum = internet_checksum(out.data(), out.size());
    out[kChecksumOffset] = static_cast<std::uint8_t>(sum >> 8);
    out[kChecksumOffset + 1] = static_cast<std::uint8_t>(sum & 0xFF);
    return out;
}

Packet decode_packet(const std::vector<std::uint8_t>& bytes) {
    if (bytes.size() < kHeaderSize) fail(ErrorKind::Format, "packet shorter than header");

    std::vector<std::uint8_t> zeroed = bytes;
    std::uint16_t stored = (static_cast<std::uint16_t>(bytes[kChecksumOffset]) << 8) |
                           bytes[kChecksumOffset + 1];
    zeroed[kChecksumOffset] = 0;
    zeroed[kChecksumOffset + 1] = 0;
    if (internet_checksum(zeroed.data(), zeroed.size()) != stored)
        fail(ErrorKind::Integrity, "packet checksum mismatch");

    Reader r(bytes.data(), bytes.size());
    std::uint8_t type = r.u8();
    std::uint8_t code = r.u8();
    r.u16();  // checksum, already verified

    Packet p;
    switch (static_cast<PacketType>(type)) {
        case PacketType::Dio: p = decode_dio(r); break;
        case PacketType::ReqpR: p = decode_reqp(r); break;
        case PacketType::Ack: p = decode_ack(r, code); break;
        case PacketType::RplMc: p = decode_rplmc(r); break;
        case PacketType::Warning: p = decode_warning(r); break;
        case PacketType::Data: p = decode_data(r); break;
        default: fail(ErrorKind::Format, "unknown packet tag");
    }
    if (type != static_cast<std::uint8_t>(PacketType::Ack) && code != 0)
        fail(ErrorKind::Format, "nonzero code on non-ack packet");
    r.expect_end();
    return p;
}

} // namespace dshrpl
