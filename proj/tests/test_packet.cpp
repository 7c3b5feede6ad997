#include <doctest.h>

#include "dshrpl/errors.hpp"
#include "dshrpl/packet.hpp"
#include "dshrpl/rng.hpp"

using namespace dshrpl;

namespace {

// Independent checksum implementation kept deliberately different in style
// from the library one.
std::uint16_t oracle_checksum(const std::vector<std::uint8_t>& bytes) {
    std::uint64_t total = 0;
    for (std::size_t i = 0; i < bytes.size(); i += 2) {
        std::uint16_t word = static_cast<std::uint16_t>(bytes[i]) << 8;
        if (i + 1 < bytes.size()) word |= bytes[i + 1];
        total += word;
    }
    while (total > 0xFFFF) total = (total & 0xFFFF) + (total >> 16);
    return static_cast<std::uint16_t>(~total & 0xFFFF);
}

Packet random_packet(Rng& rng) {
    switch (rng.below(6)) {
        case 0: {
            DioBody b;
            b.sender = NodeId{rng.next_u32()};
            b.rank = Rank{static_cast<std::uint16_t>(rng.below(0x10000))};
            b.reliability_fp = static_cast<std::uint16_t>(rng.below(10001));
            return b;
        }
        case 1: {
            ReqpRBody b;
            b.transmitter = NodeId{rng.next_u32()};
            b.transmitter_energy = rng.next_u32();
            b.source_address = address_for(NodeId{rng.next_u32()});
            b.source_sequence = rng.next_u32();
            const std::size_t hops = rng.below(12);
            for (std::size_t i = 0; i < hops; ++i) b.route.push_back(NodeId{rng.next_u32()});
            return b;
        }
        case 2: {
            AckBody b;
            b.kind = static_cast<AckKind>(rng.below(3));
            b.origin = NodeId{rng.next_u32()};
            b.reference = rng.next_u32();
            const std::size_t hops = rng.below(8);
            for (std::size_t i = 0; i < hops; ++i) b.route.push_back(NodeId{rng.next_u32()});
            if (b.kind == AckKind::Table) {
                const std::size_t rows = rng.below(6);
                for (std::size_t i = 0; i < rows; ++i) {
                    ClaimedEntry e;
                    e.neighbor = NodeId{rng.next_u32()};
                    e.trust_count = rng.next_u32();
                    e.energy_residual = rng.next_u32();
                    e.energy_initial = rng.next_u32();
                    e.veracity_fp = static_cast<std::uint16_t>(rng.below(10001));
                    b.table.push_back(e);
                }
            }
            if (b.kind == AckKind::Report) {
                b.subject = NodeId{rng.next_u32()};
                b.subject_rank = Rank{static_cast<std::uint16_t>(rng.below(0x10000))};
            }
            return b;
        }
        case 3: {
            RplMcBody b;
            b.base = address_for(NodeId{rng.next_u32()});
            ProbeOptions opt;
            opt.probe_id = rng.next_u32();
            const std::size_t hops = rng.below(10);
            for (std::size_t i = 0; i < hops; ++i) opt.route.push_back(NodeId{rng.next_u32()});
            b.options = pack_probe_options(opt);
            return b;
        }
        case 4: {
            WarningBody b;
            b.malicious = NodeId{rng.next_u32()};
            b.malicious_rank = Rank{static_cast<std::uint16_t>(rng.below(0x10000))};
            b.issue_time = static_cast<SimTime>(rng.below(1'000'000'000));
            return b;
        }
        default: {
            DataBody b;
            b.source = NodeId{rng.next_u32()};
            b.sequence = rng.next_u32();
            b.key_id = rng.next_u32();
            const std::size_t len = rng.below(40);
            for (std::size_t i = 0; i < len; ++i)
                b.ciphertext.push_back(static_cast<std::uint8_t>(rng.below(256)));
            if (!b.ciphertext.empty() && b.ciphertext.front() == 0) b.ciphertext.front() = 1;
            return b;
        }
    }
}

} // namespace

TEST_CASE("header layout matches the 1B/1B/2B contract") {
    ReqpRBody b;
    b.transmitter = NodeId{7};
    b.transmitter_energy = 1000;
    b.source_address = address_for(kBorderRouter);
    b.source_sequence = 1;
    b.route = {kBorderRouter};

    const auto bytes = encode_packet(Packet{b});
    CHECK(bytes[0] == 2);  // type
    CHECK(bytes[1] == 0);  // code
    // octets 2-3 are the checksum, verified by re-encoding below
    std::vector<std::uint8_t> zeroed = bytes;
    zeroed[2] = zeroed[3] = 0;
    const std::uint16_t sum = oracle_checksum(zeroed);
    CHECK(bytes[2] == static_cast<std::uint8_t>(sum >> 8));
    CHECK(bytes[3] == static_cast<std::uint8_t>(sum & 0xFF));
}

TEST_CASE("all-zero REQP_R checksum equals the hand-layout oracle") {
    ReqpRBody b;  // every payload field zero, empty route
    const auto bytes = encode_packet(Packet{b});

    // Hand layout: header + 4B id + 4B energy + 16B address + 4B seq + 2B count
    std::vector<std::uint8_t> expected(4 + 4 + 4 + 16 + 4 + 2, 0);
    expected[0] = 2;
    const std::uint16_t sum = oracle_checksum(expected);  // checksum over zeroed field
    expected[2] = static_cast<std::uint8_t>(sum >> 8);
    expected[3] = static_cast<std::uint8_t>(sum & 0xFF);

    REQUIRE(bytes.size() == expected.size());
    CHECK(bytes == expected);
    // Only the type/code word is nonzero, so the sum is 0x0200.
    CHECK(sum == static_cast<std::uint16_t>(~0x0200 & 0xFFFF));
}

TEST_CASE("encode/decode roundtrip on fuzzed packets") {
    Rng rng(0xDECAF);
    for (int i = 0; i < 2000; ++i) {
        const Packet p = random_packet(rng);
        const auto bytes = encode_packet(p);
        CHECK(decode_packet(bytes) == p);
    }
}

TEST_CASE("every single-bit flip is caught by the checksum") {
    Rng rng(0xBEEF);
    for (int i = 0; i < 200; ++i) {
        const Packet p = random_packet(rng);
        auto bytes = encode_packet(p);
        for (std::size_t bit = 0; bit < bytes.size() * 8; ++bit) {
            bytes[bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
            CHECK_THROWS_AS(decode_packet(bytes), Error);
            bytes[bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
        }
    }
}

TEST_CASE("flipped payload bit raises an integrity error specifically") {
    DioBody b;
    b.sender = NodeId{3};
    b.rank = Rank{346};
    b.reliability_fp = 9000;
    auto bytes = encode_packet(Packet{b});
    bytes[6] ^= 0x01;
    try {
        decode_packet(bytes);
        FAIL("decode accepted corrupted bytes");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Integrity);
    }
}

TEST_CASE("degenerate inputs raise format errors") {
    CHECK_THROWS_AS(decode_packet({}), Error);
    CHECK_THROWS_AS(decode_packet({0x01, 0x00}), Error);

    // Unknown tag with a valid checksum
    std::vector<std::uint8_t> bogus{0x77, 0x00, 0x00, 0x00};
    const std::uint16_t sum = oracle_checksum(bogus);
    bogus[2] = static_cast<std::uint8_t>(sum >> 8);
    bogus[3] = static_cast<std::uint8_t>(sum & 0xFF);
    try {
        decode_packet(bogus);
        FAIL("decode accepted unknown tag");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Format);
    }
}

TEST_CASE("field overflow is rejected with the field named") {
    ReqpRBody b;
    b.route.assign(70000, kBorderRouter);  // exceeds the 16-bit count
    try {
        encode_packet(Packet{b});
        FAIL("oversized route accepted");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::Overflow);
        CHECK(std::string(e.what()).find("route") != std::string::npos);
    }
}

TEST_CASE("probe options roundtrip and address mapping") {
    ProbeOptions opt;
    opt.probe_id = 42;
    opt.route = {kBorderRouter, NodeId{3}, NodeId{5}};
    CHECK(unpack_probe_options(pack_probe_options(opt)) == opt);

    const NodeId id{0xDEADBEEF};
    CHECK(node_from_address(address_for(id)) == id);
}

TEST_CASE("reliability wire scaling is 1/10000 fixed point") {
    CHECK(reliability_to_wire(0.0) == 0);
    CHECK(reliability_to_wire(1.0) == 10000);
    CHECK(reliability_to_wire(0.9) == 9000);
    CHECK(reliability_from_wire(9000) == doctest::Approx(0.9));
    CHECK_THROWS_AS(reliability_to_wire(1.5), Error);
}
