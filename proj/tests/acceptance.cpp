// Acceptance suite: every release gate in one binary, one PASS/FAIL line
// per criterion. Exact worked-example fidelity, property sweeps, and
// qualitative trend checks at desk scale.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <numeric>
#include <set>
#include <vector>

#include "dshrpl/detector.hpp"
#include "dshrpl/dodag_builder.hpp"
#include "dshrpl/errors.hpp"
#include "dshrpl/matrix.hpp"
#include "dshrpl/metrics.hpp"
#include "dshrpl/packet.hpp"
#include "dshrpl/paillier.hpp"
#include "dshrpl/rng.hpp"
#include "dshrpl/sim.hpp"
#include "dshrpl/trust.hpp"

using namespace dshrpl;

namespace {

int g_passed = 0;
int g_failed = 0;

#define CRITERION(fn)                                        \
    do {                                                     \
        std::cout << "[......] " << #fn << std::flush;       \
        bool ok = false;                                     \
        try {                                                \
            ok = fn();                                       \
        } catch (const std::exception& e) {                  \
            std::cout << "\n         exception: " << e.what(); \
            ok = false;                                      \
        }                                                    \
        std::cout << "\r[" << (ok ? " PASS " : " FAIL ")     \
                  << "] " << #fn << "\n";                    \
        if (ok)                                              \
            ++g_passed;                                      \
        else                                                 \
            ++g_failed;                                      \
    } while (0)

#define REQUIRE_TRUE(cond)                                          \
    do {                                                            \
        if (!(cond)) {                                              \
            std::cout << "\n         failed: " << #cond << " (line " \
                      << __LINE__ << ")";                           \
            return false;                                           \
        }                                                           \
    } while (0)

ScenarioConfig desk_config() {
    ScenarioConfig c;
    c.num_nodes = 50;
    c.duration_s = 100;
    c.reqp_rounds = 2;       // warm-up ends 20s, build 21s, armed 26s
    c.data_start_s = 30;
    c.attack_start_s = 35;
    c.drain_margin_s = 5;
    c.sinkhole_rate = 0.0;
    c.drop_probability = 1.0;
    return c;
}

Topology six_node_topology() {
    Topology topo;
    topo.positions.resize(6);
    auto link = [&topo](std::uint32_t a, std::uint32_t b) {
        topo.adjacency[NodeId{a}].insert(NodeId{b});
        topo.adjacency[NodeId{b}].insert(NodeId{a});
    };
    link(0, 1);
    link(0, 2);
    link(0, 3);
    link(1, 4);
    link(3, 5);
    link(4, 5);
    return topo;
}

bool trace_has(const EventTrace& trace, const std::string& kind, const std::string& actor,
               const std::string& detail_substr = "") {
    for (const TraceRecord& r : trace.records()) {
        if (r.kind != kind) continue;
        if (!actor.empty() && r.actor != actor) continue;
        if (!detail_substr.empty() && r.detail.find(detail_substr) == std::string::npos) continue;
        return true;
    }
    return false;
}

// ---------------------------------------------------------------------------
// Fig. 5 fidelity: the worked rank-rule values, exactly.
bool rank_rule_worked_example() {
    REQUIRE_TRUE(dnr_p(Rank{3}, Rank{2}) == 1);
    REQUIRE_TRUE(dsn_ni(Rank{2}, Rank{3}) == 1);  // honest N3 advertising rank 2
    REQUIRE_TRUE(dsn_ni(Rank{0}, Rank{3}) == 3);  // sinkhole advertising rank 0

    RankObservation sinkhole{Rank{3}, Rank{2}, Rank{0}, NodeId{3}};
    RankObservation honest{Rank{3}, Rank{2}, Rank{2}, NodeId{3}};
    REQUIRE_TRUE(classify_dio(sinkhole) == DioVerdict::Suspicious);
    REQUIRE_TRUE(classify_dio(honest) == DioVerdict::Benign);
    return true;
}

// ---------------------------------------------------------------------------
// End-to-end lifecycle on the six-node fixture with a full-drop attacker.
bool end_to_end_lifecycle() {
    ScenarioConfig c = desk_config();
    c.num_nodes = 6;
    c.duration_s = 80;
    c.tx_cost = 0;
    c.rx_cost = 0;

    Simulator sim(c, RunOptions{}, six_node_topology(), {NodeId{3}});
    RunResult r = sim.run();

    REQUIRE_TRUE(trace_has(r.trace, "flag", "N5", "N3"));          // rank-flagged
    REQUIRE_TRUE(trace_has(r.trace, "pdr-confirm", "BR", "N3"));   // PDR-confirmed
    REQUIRE_TRUE(trace_has(r.trace, "pdr-confirm", "BR", "pdr=0.0000"));
    REQUIRE_TRUE(trace_has(r.trace, "quarantine", "BR", "N3"));    // quarantined
    REQUIRE_TRUE(r.quarantined == std::set<NodeId>{NodeId{3}});
    REQUIRE_TRUE(r.confusion.tp == 1 && r.confusion.fn == 0 && r.confusion.fp == 0);

    REQUIRE_TRUE(r.graph_violation.empty());
    REQUIRE_TRUE(r.final_graph.parent_edges().at(NodeId{5}) == NodeId{4});
    for (const auto& [child, parent] : r.final_graph.parent_edges()) {
        REQUIRE_TRUE(child != NodeId{3});
        REQUIRE_TRUE(parent != NodeId{3});
    }
    return true;
}

// ---------------------------------------------------------------------------
// Attack-free soundness: 100 topologies, zero false positives, 100% delivery.
bool attack_free_soundness() {
    ScenarioConfig c = desk_config();
    c.duration_s = 60;
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        c.seed = seed;
        RunOptions opts;
        opts.keep_trace = false;
        RunResult r = run_scenario(c, opts);
        REQUIRE_TRUE(r.confusion.fp == 0);
        REQUIRE_TRUE(r.quarantined.empty());
        REQUIRE_TRUE(r.payloads_sent > 0);
        REQUIRE_TRUE(r.payloads_delivered == r.payloads_sent);
    }
    return true;
}

// ---------------------------------------------------------------------------
// Detection property: pooled DR >= 90%, zero false confirmations.
bool detection_property() {
    const double rates[] = {0.1, 0.2, 0.3};
    std::uint64_t tp = 0, fn = 0;
    std::uint64_t unprobed_total = 0;
    std::size_t runs_with_unprobed = 0;

    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        ScenarioConfig c = desk_config();
        c.sinkhole_rate = rates[seed % 3];
        c.seed = 1000 + seed;
        RunOptions opts;
        opts.keep_trace = false;
        RunResult r = run_scenario(c, opts);

        tp += r.confusion.tp;
        fn += r.confusion.fn;
        REQUIRE_TRUE(r.confusion.fp == 0);  // every confirmation is a true attacker
        for (NodeId q : r.quarantined) REQUIRE_TRUE(r.attackers.count(q) == 1);
        if (!r.unprobed_attackers.empty()) {
            ++runs_with_unprobed;
            unprobed_total += r.unprobed_attackers.size();
        }
    }

    const double dr = 100.0 * static_cast<double>(tp) / static_cast<double>(tp + fn);
    std::printf("\n         pooled DR=%.2f%% (tp=%llu fn=%llu); unprobed attackers: %llu in %zu runs",
                dr, static_cast<unsigned long long>(tp), static_cast<unsigned long long>(fn),
                static_cast<unsigned long long>(unprobed_total), runs_with_unprobed);
    REQUIRE_TRUE(dr >= 90.0);
    return true;
}

// ---------------------------------------------------------------------------
// Trend: mean DR non-decreasing in the attack interval (Spearman >= 0.7).
double spearman(const std::vector<double>& xs, const std::vector<double>& ys) {
    auto ranks = [](const std::vector<double>& v) {
        std::vector<double> r(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) {
            double less = 0, equal = 0;
            for (double other : v) {
                if (other < v[i]) ++less;
                if (other == v[i]) ++equal;
            }
            r[i] = less + (equal + 1.0) / 2.0;  // average rank for ties
        }
        return r;
    };
    const std::vector<double> rx = ranks(xs), ry = ranks(ys);
    const double n = static_cast<double>(xs.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += rx[i];
        my += ry[i];
    }
    mx /= n;
    my /= n;
    double cov = 0, vx = 0, vy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        cov += (rx[i] - mx) * (ry[i] - my);
        vx += (rx[i] - mx) * (rx[i] - mx);
        vy += (ry[i] - my) * (ry[i] - my);
    }
    if (vx == 0 || vy == 0) return 0.0;
    return cov / std::sqrt(vx * vy);
}

bool trend_reproduction() {
    const std::vector<double> intervals{0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5};
    std::vector<double> mean_dr;

    for (double interval : intervals) {
        double sum = 0;
        int n = 0;
        for (std::uint64_t seed = 1; seed <= 20; ++seed) {
            ScenarioConfig c = desk_config();
            c.sinkhole_rate = 0.3;
            c.attack_interval_s = interval;
            c.seed = 9000 + seed;
            RunOptions opts;
            opts.keep_trace = false;
            RunResult r = run_scenario(c, opts);
            const auto dr = detection_rate(r.confusion);
            if (dr.has_value()) {
                sum += *dr;
                ++n;
            }
        }
        mean_dr.push_back(sum / n);
    }

    std::printf("\n         mean DR by interval:");
    for (std::size_t i = 0; i < intervals.size(); ++i)
        std::printf(" %.1f:%.1f", intervals[i], mean_dr[i]);
    const double rho = spearman(intervals, mean_dr);
    std::printf(" | spearman=%.3f", rho);
    REQUIRE_TRUE(rho >= 0.7);
    return true;
}

// ---------------------------------------------------------------------------
// Defense benefit at 30% attackers.
bool defense_benefit() {
    double pdr_on_sum = 0, pdr_off_sum = 0, dr_on_sum = 0;
    std::uint64_t off_quarantines = 0;
    const int runs = 10;

    for (int i = 0; i < runs; ++i) {
        ScenarioConfig c = desk_config();
        c.sinkhole_rate = 0.3;
        c.seed = 4000 + static_cast<std::uint64_t>(i);

        RunOptions on;
        on.keep_trace = false;
        RunResult ron = run_scenario(c, on);
        pdr_on_sum += *packet_delivery_rate(ron.payloads_sent, ron.payloads_delivered);
        dr_on_sum += detection_rate(ron.confusion).value_or(0.0);

        RunOptions off;
        off.defense = false;
        off.keep_trace = false;
        RunResult roff = run_scenario(c, off);
        pdr_off_sum += *packet_delivery_rate(roff.payloads_sent, roff.payloads_delivered);
        off_quarantines += roff.quarantined.size();
    }

    const double pdr_on = pdr_on_sum / runs;
    const double pdr_off = pdr_off_sum / runs;
    std::printf("\n         mean PDR on=%.2f%% off=%.2f%% | mean DR on=%.2f%%", pdr_on, pdr_off,
                dr_on_sum / runs);
    REQUIRE_TRUE(pdr_on - pdr_off >= 10.0);
    REQUIRE_TRUE(dr_on_sum / runs > 0.0);
    REQUIRE_TRUE(off_quarantines == 0);
    return true;
}

// ---------------------------------------------------------------------------
// Reliability and rank calculus: 10,000 random cases per property.
bool reliability_rank_numerics() {
    Rng rng(0x1234);

    for (int i = 0; i < 10000; ++i) {
        // Eq-style convex combination stays inside [0,1].
        double a = rng.next_double(), b = rng.next_double(), cc = rng.next_double();
        const double s = a + b + cc;
        if (s == 0) continue;
        ReliabilityWeights w;
        w.w_energy = a / s;
        w.w_trust = b / s;
        w.w_veracity = 1.0 - w.w_energy - w.w_trust;
        const double r =
            weighted_reliability(rng.next_double(), rng.next_double(), rng.next_double(), w);
        REQUIRE_TRUE(r >= 0.0 && r <= 1.0);
    }

    for (int i = 0; i < 10000; ++i) {
        // History blending lies between its endpoints.
        const double direct = rng.next_double();
        const double prev = rng.next_double();
        const double alpha = rng.next_double();
        const double out = component_reliability(direct, prev, alpha);
        REQUIRE_TRUE(out >= std::min(direct, prev) - 1e-12);
        REQUIRE_TRUE(out <= std::max(direct, prev) + 1e-12);
    }

    for (int i = 0; i < 10000; ++i) {
        // Mean aggregation agrees with an independent recomputation.
        const std::size_t m = 1 + rng.below(12);
        std::vector<double> values;
        long double manual = 0.0L;
        for (std::size_t k = 0; k < m; ++k) {
            values.push_back(rng.next_double());
            manual += values.back();
        }
        manual /= static_cast<long double>(m);
        REQUIRE_TRUE(std::abs(final_reliability(values) - static_cast<double>(manual)) < 1e-12);
        REQUIRE_TRUE(std::abs(self_reliability(values) - static_cast<double>(manual)) < 1e-12);
    }

    RankParams params;
    for (int i = 0; i < 10000; ++i) {
        // Rank strictly grows along every edge.
        const Rank parent{static_cast<std::uint16_t>(rng.below(60000))};
        const double rel = rng.next_double();
        const Rank child = compute_rank(parent, rel, params);
        REQUIRE_TRUE(child > parent);
        const std::uint32_t expect = parent.value +
                                     static_cast<std::uint32_t>(std::floor(rel * 100.0 + 0.5)) +
                                     params.min_h;
        REQUIRE_TRUE(child.value == expect);
    }
    return true;
}

// ---------------------------------------------------------------------------
// Threshold update vs an independent mean / population-SD recomputation.
bool threshold_oracle() {
    Rng rng(0x999);
    for (int history = 0; history < 1000; ++history) {
        PdrThresholdState state;
        std::vector<double> samples;
        const std::size_t n = 1 + rng.below(40);
        for (std::size_t i = 0; i < n; ++i) {
            const double sample = rng.next_double();
            samples.push_back(sample);
            state = update_threshold(state, sample);
        }

        long double mean = 0.0L;
        for (double s : samples) mean += s;
        mean /= static_cast<long double>(n);
        long double var = 0.0L;
        for (double s : samples) var += (s - mean) * (s - mean);
        var /= static_cast<long double>(n);
        const long double sd = std::sqrt(var);

        REQUIRE_TRUE(std::abs(state.pdr_a - static_cast<double>(mean)) < 1e-12);
        REQUIRE_TRUE(std::abs(state.sd - static_cast<double>(sd)) < 1e-12);
        REQUIRE_TRUE(std::abs(state.pdr_t - static_cast<double>(mean - sd)) < 1e-12);
    }
    return true;
}

// ---------------------------------------------------------------------------
// Homomorphic encryption: exhaustive small-key identity, 64-bit homomorphism.
bool he_correctness() {
    KeyPair fixture = paillier_keygen_from_primes(BigUint{11}, BigUint{13}, 3);
    REQUIRE_TRUE(fixture.pub.n == BigUint{143});
    Rng rng(0x8E11);
    for (std::uint64_t m = 0; m < 143; ++m) {
        Ciphertext ct = paillier_encrypt(fixture.pub, BigUint{m}, rng);
        REQUIRE_TRUE(paillier_decrypt(fixture.pub, fixture.sec, ct) == BigUint{m});
    }

    Ciphertext five = paillier_encrypt(fixture.pub, BigUint{5}, rng);
    Ciphertext seven = paillier_encrypt(fixture.pub, BigUint{7}, rng);
    REQUIRE_TRUE(paillier_decrypt(fixture.pub, fixture.sec,
                                  paillier_eval_add(fixture.pub, five, seven)) == BigUint{12});

    Rng keyrng(0x64B);
    KeyPair wide = paillier_keygen(64, keyrng);
    REQUIRE_TRUE(wide.pub.n.bit_length() >= 127);
    for (int i = 0; i < 1000; ++i) {
        const BigUint a = BigUint::random_below(rng, wide.pub.n);
        const BigUint b = BigUint::random_below(rng, wide.pub.n);
        Ciphertext ca = paillier_encrypt(wide.pub, a, rng);
        Ciphertext cb = paillier_encrypt(wide.pub, b, rng);
        const BigUint sum = (a + b) % wide.pub.n;
        REQUIRE_TRUE(paillier_decrypt(wide.pub, wide.sec,
                                      paillier_eval_add(wide.pub, ca, cb)) == sum);
    }
    return true;
}

// ---------------------------------------------------------------------------
// Determinism: identical config + seed means identical digest and CSV bytes.
bool determinism() {
    ScenarioConfig c = desk_config();
    c.num_nodes = 40;
    c.sinkhole_rate = 0.2;
    c.duration_s = 80;
    c.seed = 777;
    RunResult a = run_scenario(c);
    RunResult b = run_scenario(c);
    REQUIRE_TRUE(a.trace_digest == b.trace_digest);
    REQUIRE_TRUE(a.trace.to_text() == b.trace.to_text());

    MatrixConfig matrix;
    MatrixScenario s;
    s.name = "det";
    s.base = desk_config();
    s.base.num_nodes = 20;
    s.base.duration_s = 60;
    s.base.sinkhole_rate = 0.2;
    s.base.seed = 5;
    s.attack_intervals = {0.0, 2.0};
    matrix.scenarios.push_back(s);

    const std::string scratch = std::filesystem::temp_directory_path().string();
    MatrixOutcome first = run_matrix(matrix, scratch + "/dshrpl_matrix_a", 2, 2);
    MatrixOutcome second = run_matrix(matrix, scratch + "/dshrpl_matrix_b", 2, 2);
    REQUIRE_TRUE(first.all_ok && second.all_ok);
    for (const std::string metric : {"dr", "fpr", "fnr", "pdr"}) {
        REQUIRE_TRUE(rows_to_csv(first.rows, metric) == rows_to_csv(second.rows, metric));
    }
    REQUIRE_TRUE(summarize_rows(first.rows) == summarize_rows(second.rows));
    return true;
}

// ---------------------------------------------------------------------------
// Wire formats: 10,000 fuzzed roundtrips, all single-bit flips detected.
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
            for (std::size_t i = rng.below(10); i > 0; --i)
                b.route.push_back(NodeId{rng.next_u32()});
            return b;
        }
        case 2: {
            AckBody b;
            const auto kind = rng.below(3);
            b.kind = static_cast<AckKind>(kind);
            b.origin = NodeId{rng.next_u32()};
            b.reference = rng.next_u32();
            for (std::size_t i = rng.below(8); i > 0; --i)
                b.route.push_back(NodeId{rng.next_u32()});
            if (b.kind == AckKind::Table)
                for (std::size_t i = rng.below(5); i > 0; --i)
                    b.table.push_back({NodeId{rng.next_u32()}, rng.next_u32(), rng.next_u32(),
                                       rng.next_u32(),
                                       static_cast<std::uint16_t>(rng.below(10001))});
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
            for (std::size_t i = rng.below(8); i > 0; --i)
                opt.route.push_back(NodeId{rng.next_u32()});
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
            for (std::size_t i = rng.below(32); i > 0; --i)
                b.ciphertext.push_back(static_cast<std::uint8_t>(rng.below(256)));
            if (!b.ciphertext.empty() && b.ciphertext.front() == 0) b.ciphertext.front() = 1;
            return b;
        }
    }
}

bool wire_formats() {
    Rng rng(0x77173);
    for (int i = 0; i < 10000; ++i) {
        const Packet p = random_packet(rng);
        auto bytes = encode_packet(p);
        REQUIRE_TRUE(decode_packet(bytes) == p);

        // flip one random bit: decode must reject
        const std::size_t bit = rng.below(bytes.size() * 8);
        bytes[bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
        bool rejected = false;
        try {
            (void)decode_packet(bytes);
        } catch (const Error&) {
            rejected = true;
        }
        REQUIRE_TRUE(rejected);
    }
    return true;
}

} // namespace

int main() {
    std::cout << "=== acceptance criteria ===\n";
    CRITERION(rank_rule_worked_example);
    CRITERION(end_to_end_lifecycle);
    CRITERION(attack_free_soundness);
    CRITERION(detection_property);
    CRITERION(trend_reproduction);
    CRITERION(defense_benefit);
    CRITERION(reliability_rank_numerics);
    CRITERION(threshold_oracle);
    CRITERION(he_correctness);
    CRITERION(determinism);
    CRITERION(wire_formats);
    std::cout << "=== " << g_passed << " passed, " << g_failed << " failed ===\n";
    return g_failed == 0 ? 0 : 1;
}
