#include "dshrpl/sim.hpp"

#include <algorithm>
#include <cstdio>
#include <queue>
#include <sstream>
#include <tuple>

#include "dshrpl/detector.hpp"
#include "dshrpl/dodag_builder.hpp"
#include "dshrpl/errors.hpp"
#include "dshrpl/packet.hpp"
#include "dshrpl/paillier.hpp"
#include "dshrpl/rng.hpp"
#include "dshrpl/trust.hpp"

namespace dshrpl {

namespace {

enum class TimerKind : std::uint8_t {
    ReqpRound,
    ReliabilityTick,
    BuildStart,
    ArmDetection,
    AttackerActivate,
    DioPeriodic,
    DataGenerate,
    DataFlush,
    ProbeSend,
    ProbeDeadline,
    ReattachTry,
    QuarantineAudit,
};

struct Event {
    SimTime at = 0;
    std::uint64_t seq = 0;
    bool is_timer = false;

    // delivery
    NodeId to;
    NodeId from;
    std::vector<std::uint8_t> bytes;

    // timer
    TimerKind timer = TimerKind::ReqpRound;
    NodeId subject;
    std::uint64_t a = 0;
};

struct EventLater {
    bool operator()(const Event& lhs, const Event& rhs) const {
        if (lhs.at != rhs.at) return lhs.at > rhs.at;
        return lhs.seq > rhs.seq;
    }
};

struct CandidateRecord {
    Rank advertised;
    double advertised_rel = 0.0;
    SimTime received_at = 0;
};

struct OutboxEntry {
    DataBody body;
    std::vector<std::uint64_t> constituents;  // payload uids
};

struct Node {
    NodeId id;
    EnergyLevel energy;
    MonitoringTable table;
    std::map<NodeId, std::vector<ClaimedEntry>> peer_claims;
    std::map<NodeId, double> final_rel;  // aggregated assessment per neighbor
    double self_rel = 0.0;

    Rank rank = kInfiniteRank;
    Rank rank_floor = kInfiniteRank;  // lowest rank held since the last attach
    std::optional<NodeId> parent;
    Rank parent_recorded_rank = kInfiniteRank;
    std::map<NodeId, CandidateRecord> candidates;
    std::set<NodeId> quarantined;
    SimTime detach_time = -1;
    bool reattach_pending = false;
    bool periodic_dio_running = false;

    // duplicate suppression
    std::set<std::pair<std::uint32_t, std::uint32_t>> reqp_forwarded;  // (source, seq)
    std::set<std::tuple<std::uint32_t, std::uint32_t, std::uint32_t>> reqp_counted;
    std::set<std::tuple<std::uint8_t, std::uint32_t, std::uint32_t>> acks_relayed;
    std::set<std::pair<std::uint32_t, SimTime>> warnings_seen;
    std::map<NodeId, Rank> reported_rank;  // suspect -> lowest rank reported so far

    bool is_attacker = false;
    bool attacker_active = false;
    double drop_probability = 1.0;

    // Self-protection against a parent that keeps advertising refused forged
    // ranks while no root verdict arrives.
    std::uint32_t parent_forged_streak = 0;
    SimTime parent_forged_since = 0;

    std::vector<OutboxEntry> outbox;
    bool flush_scheduled = false;
    std::uint32_t data_seq = 0;
    std::uint32_t report_seq = 0;

    Rng drop_rng{0};
    Rng nonce_rng{0};
    Rng loss_rng{0};

    Node() : table(kDefaultTrustCap) {}
};

enum class ProbePurpose : std::uint8_t { Clean, Confirm, Localize };

struct ProbeJob {
    std::uint32_t id = 0;
    std::vector<NodeId> route;  // hops after the root; destination last
    NodeId suspect;
    ProbePurpose purpose = ProbePurpose::Clean;
    std::uint32_t investigation = 0;
    std::uint32_t sent = 0;
    std::uint32_t acked = 0;
};

enum class SuspectState : std::uint8_t { Investigating, Cleared, Confirmed };

struct SuspectInfo {
    SuspectState state = SuspectState::Investigating;
    SimTime cleared_at = -1;
    Rank last_flag_rank = kInfiniteRank;
    std::uint32_t attempts = 0;
};

struct Investigation {
    std::uint32_t id = 0;
    NodeId suspect;
    std::vector<NodeId> route;
    std::map<std::uint32_t, double> prefix_pdr;  // prefix length -> measured pdr
    std::set<std::uint32_t> outstanding;         // probe ids still in the air
    bool localizing = false;
};

struct PayloadInfo {
    NodeId source;
    std::uint64_t value = 0;
    enum class State : std::uint8_t { Pending, Delivered, Dropped } state = State::Pending;
};

struct KnownRoute {
    std::uint32_t round = 0;      // REQP_R round it was learned in
    std::vector<NodeId> hops;     // after the root, destination last
};

struct Root {
    KeyPair he;
    std::map<NodeId, KnownRoute> routes;                  // freshest flood path per node
    std::map<NodeId, std::vector<NodeId>> fresh_routes;   // from report accumulation
    PdrThresholdState threshold;
    std::map<NodeId, SuspectInfo> suspects;
    std::map<std::uint32_t, ProbeJob> probes;
    std::map<std::uint32_t, Investigation> investigations;
    std::uint32_t next_probe_id = 1;
    std::uint32_t next_investigation_id = 1;
    std::set<NodeId> quarantined;
    std::set<NodeId> probed;                 // suspects that drew at least one probe
    std::vector<NodeId> waiting_for_seed;    // suspects queued until a clean sample lands
    std::set<NodeId> waiting_for_route;      // suspects parked until routes refresh
};

std::string join_route(const std::vector<NodeId>& route) {
    std::string out;
    for (std::size_t i = 0; i < route.size(); ++i) {
        if (i) out += '>';
        out += std::to_string(route[i].value);
    }
    return out;
}

} // namespace

struct Simulator::Impl {
    ScenarioConfig config;
    RunOptions opts;
    Topology topo;
    std::set<NodeId> attacker_ids;
    std::map<NodeId, AttackerProfile> profiles;

    std::vector<Node> nodes;
    Root root;
    EventTrace trace;

    std::priority_queue<Event, std::vector<Event>, EventLater> queue;
    std::uint64_t next_seq = 0;
    SimTime now = 0;
    SimTime end_time = 0;
    bool detection_armed = false;

    std::array<LinkCounters, 7> link{};

    // data-plane bookkeeping
    std::uint64_t next_payload_uid = 1;
    std::map<std::uint64_t, PayloadInfo> payloads;
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::vector<std::uint64_t>> constituents;
    std::map<NodeId, std::uint64_t> sent_per_node;
    std::map<NodeId, std::uint64_t> delivered_per_node;
    std::uint64_t decrypt_mismatches = 0;

    std::map<std::uint64_t, std::pair<NodeId, std::vector<NodeId>>> audits;
    std::uint64_t next_audit_id = 1;

    Impl(const ScenarioConfig& cfg, const RunOptions& options) : config(cfg), opts(options) {}

    // ---- setup -----------------------------------------------------------

    void init(std::optional<Topology> fixed_topo, std::optional<std::set<NodeId>> fixed_attackers) {
        config.validate();
        end_time = seconds_to_us(config.duration_s);

        if (fixed_topo) {
            topo = std::move(*fixed_topo);
            if (topo.positions.empty()) fail(ErrorKind::Config, "fixture topology is empty");
        } else {
            topo = generate_topology(config);
        }

        const std::uint32_t n = static_cast<std::uint32_t>(topo.positions.size());
        Rng master(config.seed);

        if (fixed_attackers) {
            attacker_ids = *fixed_attackers;
            if (attacker_ids.count(kBorderRouter))
                fail(ErrorKind::Config, "the border router cannot be an attacker");
        } else {
            std::vector<NodeId> pool;
            for (std::uint32_t i = 1; i < n; ++i) pool.push_back(NodeId{i});
            Rng draw = master.fork(0xA77AC);
            for (std::size_t i = pool.size(); i > 1; --i)
                std::swap(pool[i - 1], pool[draw.below(i)]);
            const std::uint32_t count = std::min<std::uint32_t>(config.attacker_count(),
                                                                static_cast<std::uint32_t>(pool.size()));
            attacker_ids.insert(pool.begin(), pool.begin() + count);
        }

        std::uint32_t index = 0;
        for (NodeId a : attacker_ids) {
            AttackerProfile p;
            p.node = a;
            p.drop_probability = config.drop_probability;
            p.activation_time = seconds_to_us(config.attack_start_s) +
                                static_cast<SimTime>(index) * seconds_to_us(config.attack_interval_s);
            profiles[a] = p;
            ++index;
        }

        nodes.resize(n);
        for (std::uint32_t i = 0; i < n; ++i) {
            Node& node = nodes[i];
            node.id = NodeId{i};
            node.energy = EnergyLevel{config.initial_energy, config.initial_energy};
            node.table = MonitoringTable(config.trust_cap);
            node.is_attacker = attacker_ids.count(NodeId{i}) != 0;
            if (node.is_attacker) node.drop_probability = profiles[NodeId{i}].drop_probability;
            node.drop_rng = master.fork(0xD0000 + i);
            node.nonce_rng = master.fork(0xE0000 + i);
            node.loss_rng = master.fork(0xF0000 + i);
        }

        Rng he_rng = master.fork(0x4E);
        root.he = paillier_keygen(config.he_prime_bits, he_rng);

        schedule_initial_timers();
    }

    void schedule_initial_timers() {
        if (opts.defense) {
            // Reliability probing repeats every delta_t for the whole run:
            // the flood keeps trust observations and the root's route
            // knowledge current as the topology heals around quarantines.
            const SimTime dt = config.weights.delta_t;
            for (std::uint32_t k = 0;; ++k) {
                const SimTime at = static_cast<SimTime>(k) * dt;
                if (at > end_time) break;
                timer(at, TimerKind::ReqpRound, kBorderRouter, k + 1);
                timer(at + dt - kMicrosPerSecond, TimerKind::ReliabilityTick, kBorderRouter, k);
            }
        }
        timer(config.build_start(), TimerKind::BuildStart, kBorderRouter, 0);
        if (opts.defense) timer(config.detection_arm(), TimerKind::ArmDetection, kBorderRouter, 0);

        for (const auto& [id, profile] : profiles)
            timer(profile.activation_time, TimerKind::AttackerActivate, id, 0);

        if (config.data_rate_pps > 0) {
            const SimTime period = static_cast<SimTime>(kMicrosPerSecond / config.data_rate_pps);
            for (std::uint32_t i = 1; i < nodes.size(); ++i) {
                const SimTime start = seconds_to_us(config.data_start_s) +
                                      static_cast<SimTime>(i) * (period / nodes.size());
                timer(start, TimerKind::DataGenerate, NodeId{i}, static_cast<std::uint64_t>(period));
            }
        }
    }

    // ---- primitives ------------------------------------------------------

    void timer(SimTime at, TimerKind kind, NodeId subject, std::uint64_t a) {
        if (at > end_time) return;
        Event e;
        e.at = at;
        e.seq = next_seq++;
        e.is_timer = true;
        e.timer = kind;
        e.subject = subject;
        e.a = a;
        queue.push(std::move(e));
    }

    void log(const std::string& kind, NodeId actor, const std::string& detail) {
        if (opts.keep_trace) trace.append(now, kind, to_string(actor), detail);
    }

    Node& node(NodeId id) { return nodes[id.value]; }

    std::size_t type_index(const Packet& p) const {
        return static_cast<std::size_t>(type_of(p));
    }

    void debit_tx(Node& sender, const Packet& p) {
        std::uint32_t cost = config.tx_cost;
        if (std::holds_alternative<DataBody>(p))
            cost = static_cast<std::uint32_t>(
                (static_cast<std::uint64_t>(cost) * config.avg_transaction_bytes + 38) / 77);
        sender.energy.debit(cost);
    }

    void debit_rx(Node& receiver, const Packet& p) {
        std::uint32_t cost = config.rx_cost;
        if (std::holds_alternative<DataBody>(p))
            cost = static_cast<std::uint32_t>(
                (static_cast<std::uint64_t>(cost) * config.avg_transaction_bytes + 38) / 77);
        receiver.energy.debit(cost);
    }

    void put_on_air(Node& sender, NodeId dest, const Packet& p, const std::vector<std::uint8_t>& bytes) {
        auto& counters = link[type_index(p)];
        ++counters.sent;
        if (config.ambient_loss > 0 && sender.loss_rng.chance(config.ambient_loss)) {
            ++counters.dropped;
            return;
        }
        Event e;
        e.at = now + seconds_to_us(config.link_latency_s);
        e.seq = next_seq++;
        e.to = dest;
        e.from = sender.id;
        e.bytes = bytes;
        queue.push(std::move(e));
    }

    void broadcast(Node& sender, const Packet& p) {
        const auto bytes = encode_packet(p);
        debit_tx(sender, p);
        auto adj = topo.adjacency.find(sender.id);
        if (adj == topo.adjacency.end()) return;
        for (NodeId nb : adj->second) put_on_air(sender, nb, p, bytes);
    }

    void unicast(Node& sender, NodeId dest, const Packet& p) {
        const auto bytes = encode_packet(p);
        debit_tx(sender, p);
        if (!topo.linked(sender.id, dest)) return;  // target out of range: lost
        put_on_air(sender, dest, p, bytes);
    }

    // ---- DIO / DODAG ----------------------------------------------------

    double advertised_reliability(const Node& v) const {
        if (v.attacker_active) return 1.0;
        return v.self_rel > 0.0 ? v.self_rel : v.energy.fraction();
    }

    void send_dio(Node& v) {
        DioBody d;
        d.sender = v.id;
        if (v.attacker_active)
            d.rank = profiles.at(v.id).advertise_rank;
        else
            d.rank = v.id == kBorderRouter ? Rank{config.rank_params.root_base} : v.rank;
        d.reliability_fp = reliability_to_wire(std::clamp(advertised_reliability(v), 0.0, 1.0));
        broadcast(v, Packet{d});
    }

    void send_poison_dio(Node& v) {
        DioBody d;
        d.sender = v.id;
        d.rank = kInfiniteRank;
        d.reliability_fp = 0;
        broadcast(v, Packet{d});
    }

    void start_periodic_dio(Node& v) {
        if (v.periodic_dio_running) return;
        v.periodic_dio_running = true;
        timer(now + seconds_to_us(config.dio_period_s), TimerKind::DioPeriodic, v.id, 0);
    }

    void on_periodic_dio(Node& v) {
        if (v.attacker_active || v.rank != kInfiniteRank || v.id == kBorderRouter) send_dio(v);
        timer(now + seconds_to_us(config.dio_period_s), TimerKind::DioPeriodic, v.id, 0);
    }

    void detach(Node& v) {
        if (v.id == kBorderRouter) return;
        v.parent.reset();
        v.rank = kInfiniteRank;
        v.rank_floor = kInfiniteRank;
        v.parent_recorded_rank = kInfiniteRank;
        v.candidates.clear();
        v.detach_time = now;
        log("detach", v.id, "");
        send_poison_dio(v);
        if (!v.reattach_pending) {
            v.reattach_pending = true;
            timer(now + seconds_to_us(config.reattach_delay_s), TimerKind::ReattachTry, v.id, 0);
        }
    }

    void flush_outbox_soon(Node& v) {
        if (v.flush_scheduled || v.outbox.empty()) return;
        v.flush_scheduled = true;
        timer(now + seconds_to_us(config.aggregation_window_s), TimerKind::DataFlush, v.id, 0);
    }

    void re_evaluate(Node& v) {
        if (v.id == kBorderRouter) return;
        if (v.reattach_pending) return;  // wait out the poison wave first

        std::vector<ParentCandidate> list;
        for (const auto& [nb, rec] : v.candidates) {
            if (rec.advertised == kInfiniteRank) continue;
            if (v.quarantined.count(nb)) continue;
            if (rec.advertised >= v.rank) continue;  // upward only
            // Only the root can sit at the base rank; a lower claim is forged.
            if (opts.defense && nb != kBorderRouter &&
                rec.advertised <= Rank{config.rank_params.root_base})
                continue;
            double rel;
            if (opts.defense) {
                auto it = v.final_rel.find(nb);
                if (it == v.final_rel.end()) continue;  // no local evidence yet
                rel = it->second;
            } else {
                rel = 1.0;
            }
            list.push_back({nb, rel, rec.advertised});
        }

        ParentSelection sel = select_parents(list, config.rank_params);
        if (!sel.chosen) {
            if (v.parent.has_value()) detach(v);
            return;
        }

        // Sticky parent: a switch must strictly improve reliability. This
        // keeps simultaneous re-selection waves from leapfrogging into rank
        // cycles over stale advertisements.
        ParentCandidate choice = *sel.chosen;
        if (v.parent.has_value() && choice.neighbor != *v.parent) {
            for (const ParentCandidate& c : sel.parent_set) {
                if (c.neighbor == *v.parent) {
                    if (choice.final_reliability <= c.final_reliability + 1e-9) choice = c;
                    break;
                }
            }
        }

        Rank new_rank;
        try {
            new_rank = compute_rank(choice.advertised_rank, choice.final_reliability,
                                    config.rank_params);
        } catch (const Error&) {
            return;  // overflow: refuse this attachment
        }

        // MAX-H bounds how far a node may drift above the lowest rank it
        // held since attaching; beyond that it restarts cleanly instead of
        // feeding a count-to-infinity spiral.
        if (v.parent.has_value() && v.rank_floor != kInfiniteRank &&
            new_rank.value > static_cast<std::uint32_t>(v.rank_floor.value) +
                                 config.rank_params.max_h) {
            detach(v);
            return;
        }

        if (v.parent == choice.neighbor && v.rank == new_rank) return;

        const bool was_attached = v.parent.has_value();
        v.parent = choice.neighbor;
        v.parent_recorded_rank = choice.advertised_rank;
        v.rank = new_rank;
        if (v.rank_floor == kInfiniteRank || new_rank < v.rank_floor) v.rank_floor = new_rank;
        log(was_attached ? "parent-change" : "attach", v.id,
            to_string(*v.parent) + " rank=" + std::to_string(new_rank.value));
        send_dio(v);
        start_periodic_dio(v);
        flush_outbox_soon(v);
    }

    void on_reattach_try(Node& v) {
        v.reattach_pending = false;
        re_evaluate(v);
        if (v.rank == kInfiniteRank && !v.reattach_pending) {
            v.reattach_pending = true;
            timer(now + 2 * seconds_to_us(config.reattach_delay_s), TimerKind::ReattachTry, v.id, 0);
        }
    }

    void handle_dio(Node& v, const DioBody& d) {
        const NodeId sender = d.sender;
        if (v.quarantined.count(sender)) return;
        if (sender == v.id) return;

        if (v.id == kBorderRouter) {
            // Only the root may hold the minimum rank; anything below it is
            // necessarily forged.
            if (opts.defense && detection_armed && !v.attacker_active &&
                d.rank < Rank{config.rank_params.root_base} && !root.quarantined.count(sender)) {
                log("flag", v.id,
                    to_string(sender) + " rank=" + std::to_string(d.rank.value) + " stage=rank");
                root_consider_suspect(sender, d.rank, {});
            }
            return;
        }

        if (d.rank == kInfiniteRank) {  // poison
            v.candidates.erase(sender);
            if (v.parent == sender) detach(v);
            return;
        }

        const bool armed_observer = opts.defense && detection_armed && !v.attacker_active &&
                                    v.parent.has_value() && sender != kBorderRouter;
        if (armed_observer) {
            RankObservation obs{v.rank, v.parent_recorded_rank, d.rank, sender};
            if (classify_dio(obs) == DioVerdict::Suspicious) {
                log("flag", v.id,
                    to_string(sender) + " rank=" + std::to_string(d.rank.value) +
                        " dsn=" + std::to_string(dsn_ni(d.rank, v.rank)) +
                        " dnr=" + std::to_string(dnr_p(v.rank, v.parent_recorded_rank)) +
                        " stage=rank");
                maybe_report(v, sender, d.rank);
                // A rank increase never makes the sender more attractive, so
                // routing may follow it; flagged decreases stay unapplied
                // until the root delivers a verdict.
                auto rec = v.candidates.find(sender);
                if (rec == v.candidates.end() || d.rank < rec->second.advertised) {
                    // The stale advertisement must not stay selectable either;
                    // only the edge to a current parent survives a refusal.
                    if (v.parent != sender) v.candidates.erase(sender);
                    if (v.parent == sender) {
                        // Waiting on the root is fine for a while, but a parent
                        // that keeps forging gets dropped locally: the verdict
                        // may be unable to reach this part of the graph.
                        if (v.parent_forged_streak == 0) v.parent_forged_since = now;
                        if (++v.parent_forged_streak >= 3 &&
                            now - v.parent_forged_since >=
                                2 * seconds_to_us(config.dio_period_s)) {
                            log("protective-detach", v.id, to_string(sender));
                            detach(v);
                        }
                    }
                    return;
                }
            }
        }
        if (v.parent == sender) v.parent_forged_streak = 0;

        v.candidates[sender] = {d.rank, reliability_from_wire(d.reliability_fp), now};
        re_evaluate(v);
    }

    // ---- suspicion reports ----------------------------------------------

    // Next hop for an accusation: never hand it to the accused, and prefer
    // relays this node has not itself flagged.
    NodeId report_next_hop(Node& v, NodeId subject) {
        const bool parent_clean = v.parent.has_value() && *v.parent != subject &&
                                  !v.reported_rank.count(*v.parent);
        if (parent_clean) return *v.parent;

        NodeId best = v.parent.value_or(subject);
        Rank best_rank = kInfiniteRank;
        for (const auto& [nb, rec] : v.candidates) {
            if (nb == subject || v.quarantined.count(nb)) continue;
            if (v.reported_rank.count(nb)) continue;
            if (rec.advertised == kInfiniteRank || rec.advertised >= v.rank) continue;
            if (rec.advertised < best_rank) {
                best_rank = rec.advertised;
                best = nb;
            }
        }
        if (best_rank == kInfiniteRank && v.parent.has_value() && *v.parent != subject)
            return *v.parent;
        return best;
    }

    void maybe_report(Node& v, NodeId suspect, Rank advertised) {
        if (suspect == kBorderRouter) return;
        auto it = v.reported_rank.find(suspect);
        if (it != v.reported_rank.end() && advertised >= it->second) return;
        v.reported_rank[suspect] = advertised;

        AckBody report;
        report.kind = AckKind::Report;
        report.origin = v.id;
        report.reference = ++v.report_seq;
        report.subject = suspect;
        report.subject_rank = advertised;
        report.route = {v.id};
        const NodeId next = report_next_hop(v, suspect);
        log("report", v.id, to_string(suspect) + " via=" + to_string(next));
        unicast(v, next, Packet{report});
    }

    void relay_report(Node& w, AckBody report) {
        // Stale rank beliefs can bounce a report between two relays; a hop
        // that sees itself in the path drops the copy.
        if (std::find(report.route.begin(), report.route.end(), w.id) != report.route.end())
            return;
        report.route.push_back(w.id);
        const NodeId next = report_next_hop(w, report.subject);
        unicast(w, next, Packet{report});
    }

    static bool has_duplicate_hops(const std::vector<NodeId>& route) {
        std::set<NodeId> seen;
        for (NodeId hop : route)
            if (!seen.insert(hop).second) return true;
        return false;
    }

    // ---- REQP_R warm-up ---------------------------------------------------

    void on_reqp_round(std::uint32_t seq) {
        Node& br = node(kBorderRouter);
        ReqpRBody pkt;
        pkt.transmitter = kBorderRouter;
        pkt.transmitter_energy = br.energy.residual;
        pkt.source_address = address_for(kBorderRouter);
        pkt.source_sequence = seq;
        pkt.route = {kBorderRouter};
        log("reqp-round", kBorderRouter, std::to_string(seq));
        log("reqp-forward", kBorderRouter, std::to_string(seq));
        broadcast(br, Packet{pkt});

        // The root shares its own monitoring table so neighbors can score
        // its veracity like anyone else's.
        AckBody table_ack;
        table_ack.kind = AckKind::Table;
        table_ack.origin = kBorderRouter;
        table_ack.reference = seq;
        table_ack.table = br.table.claims();
        broadcast(br, Packet{table_ack});
    }

    void store_route(NodeId dest, std::uint32_t round, std::vector<NodeId> hops) {
        KnownRoute& known = root.routes[dest];
        if (round < known.round) return;
        known.round = round;
        known.hops = std::move(hops);
    }

    void handle_reqp(Node& v, const ReqpRBody& pkt, NodeId link_sender) {
        if (v.quarantined.count(link_sender)) return;  // no credit for outcasts
        const NodeId source = node_from_address(pkt.source_address);
        const auto counted_key =
            std::make_tuple(link_sender.value, source.value, pkt.source_sequence);
        if (v.reqp_counted.insert(counted_key).second) {
            v.table.record_forward(now, link_sender,
                                   EnergyLevel{pkt.transmitter_energy, config.initial_energy});
        }

        if (v.id == kBorderRouter) {
            // Flood paths double as probe-route knowledge.
            for (std::size_t i = 1; i < pkt.route.size(); ++i) {
                const NodeId hop = pkt.route[i];
                if (!root.routes.count(hop) || root.routes[hop].round < pkt.source_sequence)
                    store_route(hop, pkt.source_sequence,
                                std::vector<NodeId>(pkt.route.begin() + 1,
                                                    pkt.route.begin() + i + 1));
            }
            return;
        }

        if (std::find(pkt.route.begin(), pkt.route.end(), v.id) != pkt.route.end()) return;
        const auto fwd_key = std::make_pair(source.value, pkt.source_sequence);
        if (!v.reqp_forwarded.insert(fwd_key).second) return;

        ReqpRBody fwd = pkt;
        fwd.transmitter = v.id;
        fwd.transmitter_energy = v.energy.residual;
        fwd.route.push_back(v.id);
        log("reqp-forward", v.id, std::to_string(pkt.source_sequence));
        broadcast(v, Packet{fwd});

        AckBody ack;
        ack.kind = AckKind::Table;
        ack.origin = v.id;
        ack.reference = pkt.source_sequence;
        ack.route.assign(pkt.route.rbegin(), pkt.route.rend());  // back toward the root
        ack.table = v.table.claims();
        broadcast(v, Packet{ack});
    }

    void observe_claims(Node& w, const AckBody& ack) {
        if (ack.origin == w.id) return;
        // Only neighbors' assessments ever enter the aggregation, so claims
        // from strangers are not worth keeping.
        if (!w.table.contains(ack.origin)) return;
        w.peer_claims[ack.origin] = ack.table;
        // Score only when the comparison carries evidence: a disjoint table
        // says nothing about the origin's honesty.
        if (overlapping_claims(w.table, ack.table) > 0) {
            std::map<NodeId, std::vector<ClaimedEntry>> others;
            for (const auto& [peer, claims] : w.peer_claims)
                if (peer != ack.origin) others[peer] = claims;
            w.table.record_veracity(now, ack.origin, veracity_score(w.table, ack.table, others));
        }
    }

    void handle_ack(Node& w, const AckBody& ack, NodeId link_sender) {
        if (ack.kind == AckKind::Report) {
            if (w.id == kBorderRouter) {
                root_handle_report(ack);
            } else if (w.attacker_active && w.drop_rng.chance(w.drop_probability)) {
                log("report-drop", w.id, to_string(ack.origin) + " subject=" + to_string(ack.subject));
            } else {
                relay_report(w, ack);
            }
            return;
        }

        if (ack.kind == AckKind::Table) observe_claims(w, ack);

        // Fixed-route relay: w forwards only the copy arriving from its
        // predecessor on the recorded path.
        auto pos = std::find(ack.route.begin(), ack.route.end(), w.id);
        if (pos == ack.route.end()) return;
        const NodeId expected_sender = pos == ack.route.begin() ? ack.origin : *(pos - 1);
        if (expected_sender != link_sender) return;

        if (w.id == ack.route.back()) {  // consume (the root for all our routes)
            if (ack.kind == AckKind::Table && w.id == kBorderRouter) {
                std::vector<NodeId> path{ack.origin};
                path.insert(path.end(), ack.route.begin(), ack.route.end());
                std::vector<NodeId> from_root(path.rbegin() + 1, path.rend());
                store_route(ack.origin, ack.reference, std::move(from_root));
            } else if (ack.kind == AckKind::Probe) {
                auto it = root.probes.find(probe_of_ref(ack.reference));
                if (it != root.probes.end()) ++it->second.acked;
            }
            return;
        }

        const auto relay_key = std::make_tuple(static_cast<std::uint8_t>(ack.kind),
                                               ack.origin.value, ack.reference);
        if (!w.acks_relayed.insert(relay_key).second) return;
        if (w.attacker_active && ack.kind == AckKind::Probe &&
            w.drop_rng.chance(w.drop_probability)) {
            log("probe-ack-drop", w.id, std::to_string(ack.reference));
            return;
        }
        broadcast(w, Packet{ack});
    }

    // ---- reliability ------------------------------------------------------

    double claim_reliability(const ClaimedEntry& e) const {
        const double energy = e.energy_initial == 0
                                  ? 0.0
                                  : std::min(1.0, static_cast<double>(e.energy_residual) /
                                                      static_cast<double>(e.energy_initial));
        const double trust = config.trust_cap == 0
                                 ? 1.0
                                 : std::min(1.0, static_cast<double>(e.trust_count) /
                                                     static_cast<double>(config.trust_cap));
        return weighted_reliability(energy, trust, reliability_from_wire(e.veracity_fp),
                                    config.weights);
    }

    void on_reliability_tick() {
        for (Node& v : nodes) {
            auto own = v.table.update_reliabilities(now, config.weights);

            v.final_rel.clear();
            for (const auto& [j, own_rel] : own) {
                std::vector<double> values{own_rel};
                for (const auto& [k, claims] : v.peer_claims) {
                    if (k == j || !v.table.contains(k)) continue;
                    for (const ClaimedEntry& e : claims) {
                        if (e.neighbor == j) {
                            values.push_back(claim_reliability(e));
                            break;
                        }
                    }
                }
                v.final_rel[j] = final_reliability(values);
            }

            std::vector<double> about_self;
            for (const auto& [k, claims] : v.peer_claims) {
                for (const ClaimedEntry& e : claims) {
                    if (e.neighbor == v.id) {
                        about_self.push_back(claim_reliability(e));
                        break;
                    }
                }
            }
            if (!about_self.empty()) v.self_rel = self_reliability(about_self);
        }
        log("reliability-tick", kBorderRouter, "");

        // Routes refreshed over the last round may unblock parked suspects.
        if (detection_armed && !root.waiting_for_route.empty()) {
            const std::set<NodeId> waiting = root.waiting_for_route;
            for (NodeId s : waiting) {
                if (root.quarantined.count(s)) {
                    root.waiting_for_route.erase(s);
                    continue;
                }
                start_investigation(s, {});
            }
        }
    }

    // ---- probes and investigations ----------------------------------------

    std::uint32_t launch_probe(const std::vector<NodeId>& route, NodeId suspect,
                               ProbePurpose purpose, std::uint32_t investigation) {
        ProbeJob job;
        job.id = root.next_probe_id++;
        job.route = route;
        job.suspect = suspect;
        job.purpose = purpose;
        job.investigation = investigation;
        root.probes[job.id] = job;

        const SimTime spacing = seconds_to_us(config.probe_spacing_s);
        for (std::uint32_t k = 0; k < config.n_probes; ++k)
            timer(now + static_cast<SimTime>(k) * spacing, TimerKind::ProbeSend, kBorderRouter,
                  (static_cast<std::uint64_t>(job.id) << 16) | k);

        const SimTime rtt = 2 * static_cast<SimTime>(route.size()) *
                            seconds_to_us(config.link_latency_s);
        const SimTime deadline =
            now + static_cast<SimTime>(config.n_probes - 1) * spacing + 4 * rtt +
            seconds_to_us(config.link_latency_s);
        timer(deadline, TimerKind::ProbeDeadline, kBorderRouter, job.id);

        log("probe-launch", kBorderRouter,
            "id=" + std::to_string(job.id) + " route=" + join_route(route) +
                " suspect=" + to_string(suspect));
        return job.id;
    }

    // The probe id and per-packet index share the 32-bit reference so every
    // RPL-MC copy (and its ACK) stays distinguishable along the path.
    static std::uint32_t pack_probe_ref(std::uint32_t probe_id, std::uint32_t k) {
        return (probe_id << 12) | (k & 0xFFF);
    }
    static std::uint32_t probe_of_ref(std::uint32_t reference) { return reference >> 12; }

    void on_probe_send(std::uint64_t packed) {
        const std::uint32_t probe_id = static_cast<std::uint32_t>(packed >> 16);
        const std::uint32_t k = static_cast<std::uint32_t>(packed & 0xFFFF);
        auto it = root.probes.find(probe_id);
        if (it == root.probes.end()) return;
        ProbeJob& job = it->second;
        if (job.route.empty()) return;

        RplMcBody mc;
        mc.base = address_for(job.route.back());
        mc.options = pack_probe_options({pack_probe_ref(probe_id, k), job.route});
        ++job.sent;
        unicast(node(kBorderRouter), job.route.front(), Packet{mc});
    }

    void handle_rplmc(Node& w, const RplMcBody& mc, NodeId link_sender) {
        if (w.quarantined.count(link_sender)) return;
        ProbeOptions opt;
        try {
            opt = unpack_probe_options(mc.options);
        } catch (const Error&) {
            return;  // malformed options: not ours to answer
        }
        if (has_duplicate_hops(opt.route)) return;  // refuses to walk a looped route

        if (w.attacker_active && w.drop_rng.chance(w.drop_probability)) {
            log("probe-drop", w.id, "id=" + std::to_string(opt.probe_id));
            return;
        }

        const NodeId dest = node_from_address(mc.base);
        if (w.id == dest) {
            AckBody ack;
            ack.kind = AckKind::Probe;
            ack.origin = w.id;
            ack.reference = opt.probe_id;
            for (auto it = opt.route.rbegin() + 1; it != opt.route.rend(); ++it)
                ack.route.push_back(*it);
            ack.route.push_back(kBorderRouter);
            broadcast(w, Packet{ack});
            return;
        }

        auto pos = std::find(opt.route.begin(), opt.route.end(), w.id);
        if (pos == opt.route.end() || pos + 1 == opt.route.end()) return;
        unicast(w, *(pos + 1), Packet{mc});
    }

    void root_consider_suspect(NodeId suspect, Rank advertised, std::vector<NodeId> reporter_path) {
        if (!opts.defense || suspect == kBorderRouter) return;
        if (root.quarantined.count(suspect)) return;

        auto it = root.suspects.find(suspect);
        if (it != root.suspects.end()) {
            SuspectInfo& info = it->second;
            if (info.state == SuspectState::Confirmed) return;
            if (info.state == SuspectState::Investigating) {
                info.last_flag_rank = std::min(info.last_flag_rank, advertised);
                return;
            }
            // Cleared: re-open only for stronger (lower-rank) evidence or
            // after the cooldown.
            const bool stronger = advertised < info.last_flag_rank;
            const bool cooled =
                now - info.cleared_at >= seconds_to_us(config.recheck_cooldown_s);
            if (!stronger && !cooled) return;
        }

        SuspectInfo& info = root.suspects[suspect];
        info.state = SuspectState::Investigating;
        info.last_flag_rank = std::min(info.last_flag_rank, advertised);
        start_investigation(suspect, std::move(reporter_path));
    }

    void root_handle_report(const AckBody& report) {
        // The accumulated route is reporter-first; remember it as fresh
        // topology knowledge for every prefix. Looped paths teach nothing.
        std::vector<NodeId> from_root(report.route.rbegin(), report.route.rend());
        if (has_duplicate_hops(from_root)) from_root.clear();
        for (std::size_t len = 1; len <= from_root.size(); ++len) {
            const NodeId end = from_root[len - 1];
            root.fresh_routes[end] = std::vector<NodeId>(from_root.begin(), from_root.begin() + len);
        }
        log("report-arrive", kBorderRouter,
            to_string(report.subject) + " reporter=" + to_string(report.origin) +
                " rank=" + std::to_string(report.subject_rank.value));
        root_consider_suspect(report.subject, report.subject_rank, std::move(from_root));
    }

    bool route_usable(const std::vector<NodeId>& route) const {
        for (NodeId hop : route)
            if (root.quarantined.count(hop)) return false;
        return !route.empty();
    }

    // Longest quarantine-free prefix of a stored route.
    std::vector<NodeId> usable_prefix(const std::vector<NodeId>& route) const {
        std::vector<NodeId> out;
        for (NodeId hop : route) {
            if (root.quarantined.count(hop)) break;
            out.push_back(hop);
        }
        return out;
    }

    std::vector<NodeId> pick_probe_route(NodeId suspect, const std::vector<NodeId>& reporter_path) {
        if (std::find(reporter_path.begin(), reporter_path.end(), suspect) != reporter_path.end() &&
            route_usable(reporter_path))
            return reporter_path;

        std::vector<NodeId> best;
        auto consider = [&](const std::vector<NodeId>& route) {
            const std::vector<NodeId> prefix = usable_prefix(route);
            if (has_duplicate_hops(prefix)) return;
            if (std::find(prefix.begin(), prefix.end(), suspect) == prefix.end()) return;
            if (prefix.size() > best.size()) best = prefix;
        };
        for (const auto& [dest, route] : root.fresh_routes) consider(route);
        for (const auto& [dest, known] : root.routes) consider(known.hops);
        return best;
    }

    void start_investigation(NodeId suspect, std::vector<NodeId> reporter_path) {
        SuspectInfo& info = root.suspects[suspect];
        if (info.attempts >= 8) {
            log("probe-exhausted", kBorderRouter, to_string(suspect));
            info.state = SuspectState::Cleared;
            info.cleared_at = now;
            return;
        }
        if (root.threshold.samples.empty()) {
            // No clean baseline yet; probe once the first sample lands.
            root.waiting_for_seed.push_back(suspect);
            return;
        }

        const std::vector<NodeId> route = pick_probe_route(suspect, reporter_path);
        if (route.empty()) {
            // Park the suspect until a future flood round teaches the root a
            // usable route; the periodic retry drains this set.
            log("probe-wait-route", kBorderRouter, to_string(suspect));
            root.waiting_for_route.insert(suspect);
            return;
        }
        root.waiting_for_route.erase(suspect);

        ++info.attempts;
        Investigation inv;
        inv.id = root.next_investigation_id++;
        inv.suspect = suspect;
        inv.route = route;
        const std::uint32_t probe =
            launch_probe(route, suspect, ProbePurpose::Confirm, inv.id);
        inv.outstanding.insert(probe);
        root.investigations[inv.id] = std::move(inv);
        root.probed.insert(suspect);
    }

    void on_probe_deadline(std::uint32_t probe_id) {
        auto it = root.probes.find(probe_id);
        if (it == root.probes.end()) return;
        ProbeJob job = it->second;
        root.probes.erase(it);

        PdrProbeRecord record;
        record.route = job.route;
        record.suspect = job.suspect;
        record.mc_sent = job.sent;
        record.acks_received = job.acked;

        if (job.purpose == ProbePurpose::Clean) {
            root.threshold = update_threshold(root.threshold, record.pdr());
            char buf[64];
            std::snprintf(buf, sizeof(buf), "pdr=%.4f pdr_t=%.4f", record.pdr(),
                          root.threshold.pdr_t);
            log("pdr-sample", kBorderRouter, buf);
            if (record.pdr() < root.threshold.lt_p || record.pdr() > root.threshold.ut_p)
                log("pdr-abnormal", kBorderRouter, buf);
            if (!root.waiting_for_seed.empty()) {
                auto waiting = std::move(root.waiting_for_seed);
                root.waiting_for_seed.clear();
                for (NodeId s : waiting) start_investigation(s, {});
            }
            return;
        }

        auto inv_it = root.investigations.find(job.investigation);
        if (inv_it == root.investigations.end()) return;
        Investigation& inv = inv_it->second;
        inv.outstanding.erase(probe_id);

        if (job.purpose == ProbePurpose::Confirm) {
            ProbeOutcome outcome;
            try {
                outcome = confirm_sinkhole(record, root.threshold);
            } catch (const Error&) {
                outcome = ProbeOutcome::Cleared;  // no probes made it out at all
            }
            char buf[96];
            std::snprintf(buf, sizeof(buf), "%s pdr=%.4f pdr_t=%.4f stage=pdr",
                          to_string(job.suspect).c_str(), record.pdr(), root.threshold.pdr_t);
            if (outcome == ProbeOutcome::Cleared) {
                log("pdr-clear", kBorderRouter, buf);
                finish_investigation(inv, std::nullopt);
                return;
            }
            log("pdr-confirm", kBorderRouter, buf);
            inv.prefix_pdr[static_cast<std::uint32_t>(inv.route.size())] = record.pdr();
            if (inv.route.size() == 1) {
                finish_investigation(inv, inv.route.front());
                return;
            }
            inv.localizing = true;
            for (std::uint32_t len = 1; len < inv.route.size(); ++len) {
                std::vector<NodeId> prefix(inv.route.begin(), inv.route.begin() + len);
                inv.outstanding.insert(
                    launch_probe(prefix, job.suspect, ProbePurpose::Localize, inv.id));
            }
            return;
        }

        // Localize probe: stash the prefix result, decide when all are in.
        inv.prefix_pdr[static_cast<std::uint32_t>(job.route.size())] = record.pdr();
        if (!inv.outstanding.empty()) return;

        NodeId culprit = inv.route.back();
        for (const auto& [len, pdr] : inv.prefix_pdr) {
            if (pdr < root.threshold.pdr_t) {
                culprit = inv.route[len - 1];
                break;
            }
        }
        finish_investigation(inv, culprit);
    }

    void finish_investigation(Investigation& inv, std::optional<NodeId> culprit) {
        const NodeId suspect = inv.suspect;
        const std::uint32_t inv_id = inv.id;

        if (!culprit.has_value()) {
            SuspectInfo& info = root.suspects[suspect];
            info.state = SuspectState::Cleared;
            info.cleared_at = now;
            root.investigations.erase(inv_id);
            return;
        }

        const NodeId bad = *culprit;
        const std::vector<NodeId> route = inv.route;
        root.investigations.erase(inv_id);

        // A hop quarantined while the probes were in flight invalidates the
        // measurement: relays reject its packets, so failures past it say
        // nothing about the culprit. Re-measure over a clean route.
        bool polluted = false;
        for (NodeId hop : route)
            if (root.quarantined.count(hop)) polluted = true;
        if (polluted) {
            if (!root.quarantined.count(suspect)) start_investigation(suspect, {});
            return;
        }

        root.suspects[bad].state = SuspectState::Confirmed;
        quarantine(bad);

        if (bad != suspect && !root.quarantined.count(suspect)) {
            // The route was poisoned by someone else; give the original
            // suspect a fresh look over a clean route.
            start_investigation(suspect, {});
        }
    }

    void quarantine(NodeId malicious) {
        root.quarantined.insert(malicious);
        log("quarantine", kBorderRouter, to_string(malicious));

        // Audit the repair outcome once the orphans had time to re-form.
        std::vector<NodeId> orphans;
        for (const Node& v : nodes)
            if (v.parent == malicious) orphans.push_back(v.id);
        audits[next_audit_id] = {malicious, std::move(orphans)};
        timer(now + 2 * kMicrosPerSecond + 4 * seconds_to_us(config.reattach_delay_s),
              TimerKind::QuarantineAudit, kBorderRouter, next_audit_id);
        ++next_audit_id;

        WarningBody warning;
        warning.malicious = malicious;
        warning.malicious_rank = Rank{0};  // the forged advertisement
        warning.issue_time = now;

        Node& br = node(kBorderRouter);
        apply_warning(br, warning);
        broadcast(br, Packet{warning});
    }

    void on_quarantine_audit(std::uint64_t audit_id) {
        auto it = audits.find(audit_id);
        if (it == audits.end()) return;
        std::size_t reattached = 0, stranded = 0;
        for (NodeId id : it->second.second) {
            if (node(id).rank != kInfiniteRank)
                ++reattached;
            else
                ++stranded;
        }
        log("quarantine-audit", kBorderRouter,
            to_string(it->second.first) + " reattached=" + std::to_string(reattached) +
                " unattached=" + std::to_string(stranded));
        audits.erase(it);
    }

    void apply_warning(Node& v, const WarningBody& w) {
        v.quarantined.insert(w.malicious);
        v.candidates.erase(w.malicious);
        if (v.parent == w.malicious) detach(v);
    }

    void handle_warning(Node& v, const WarningBody& w, NodeId /*link_sender*/) {
        // Warnings carry root authentication, so they are honored no matter
        // who relayed them -- including already-quarantined relays.
        const auto key = std::make_pair(w.malicious.value, w.issue_time);
        if (!v.warnings_seen.insert(key).second) return;
        if (v.id == w.malicious) return;  // the accused ignores its own verdict

        apply_warning(v, w);
        broadcast(v, Packet{w});  // flood on
        if (v.rank != kInfiniteRank && !v.attacker_active)
            send_dio(v);  // help orphans reattach promptly
    }

    // ---- data plane --------------------------------------------------------

    void on_data_generate(Node& v, SimTime period) {
        if (root.quarantined.count(v.id)) return;  // isolated nodes leave the application
        if (now <= config.data_end()) {
            if (v.rank == kInfiniteRank || !v.parent.has_value()) {
                // No route: the application holds off rather than queueing
                // packets that cannot leave the node.
                timer(now + period, TimerKind::DataGenerate, v.id,
                      static_cast<std::uint64_t>(period));
                return;
            }
            const std::uint64_t uid = next_payload_uid++;
            const std::uint64_t value = (static_cast<std::uint64_t>(v.id.value) * 65537 +
                                         v.data_seq) & 0x7FFFFFFF;
            payloads[uid] = {v.id, value, PayloadInfo::State::Pending};
            ++sent_per_node[v.id];

            DataBody body;
            body.source = v.id;
            body.sequence = v.data_seq++;
            body.key_id = root.he.pub.key_id;
            Ciphertext ct = paillier_encrypt(root.he.pub, BigUint{value}, v.nonce_rng);
            body.ciphertext = ciphertext_to_bytes(ct);
            constituents[{body.source.value, body.sequence}] = {uid};

            log("data-origin", v.id,
                "uid=" + std::to_string(uid) + " value=" + std::to_string(value));
            v.outbox.push_back({std::move(body), {uid}});
            flush_outbox_soon(v);

            timer(now + period, TimerKind::DataGenerate, v.id, static_cast<std::uint64_t>(period));
        }
    }

    void mark_dropped(const std::vector<std::uint64_t>& uids) {
        for (std::uint64_t uid : uids) {
            auto it = payloads.find(uid);
            if (it != payloads.end() && it->second.state == PayloadInfo::State::Pending)
                it->second.state = PayloadInfo::State::Dropped;
        }
    }

    void on_data_flush(Node& v) {
        v.flush_scheduled = false;
        if (v.outbox.empty()) return;
        if (v.rank == kInfiniteRank || !v.parent.has_value()) return;  // hold until attached

        OutboxEntry out;
        if (v.outbox.size() == 1) {
            out = std::move(v.outbox.front());
        } else {
            // Fold everything pending into one ciphertext.
            Ciphertext acc = ciphertext_from_bytes(v.outbox.front().body.ciphertext,
                                                   root.he.pub.key_id);
            std::vector<std::uint64_t> uids = v.outbox.front().constituents;
            for (std::size_t i = 1; i < v.outbox.size(); ++i) {
                Ciphertext next = ciphertext_from_bytes(v.outbox[i].body.ciphertext,
                                                        root.he.pub.key_id);
                acc = paillier_eval_add(root.he.pub, acc, next);
                uids.insert(uids.end(), v.outbox[i].constituents.begin(),
                            v.outbox[i].constituents.end());
            }
            out.body.source = v.id;
            out.body.sequence = 0x80000000u | v.data_seq++;
            out.body.key_id = root.he.pub.key_id;
            out.body.ciphertext = ciphertext_to_bytes(acc);
            out.constituents = uids;
            constituents[{out.body.source.value, out.body.sequence}] = uids;
            log("data-aggregate", v.id, "count=" + std::to_string(uids.size()));
        }
        v.outbox.clear();
        unicast(v, *v.parent, Packet{out.body});
    }

    void handle_data(Node& w, const DataBody& body, NodeId link_sender) {
        const auto key = std::make_pair(body.source.value, body.sequence);
        auto uids_it = constituents.find(key);
        const std::vector<std::uint64_t> uids =
            uids_it == constituents.end() ? std::vector<std::uint64_t>{} : uids_it->second;

        if (w.quarantined.count(link_sender)) {
            mark_dropped(uids);
            log("data-reject", w.id, "from=" + to_string(link_sender));
            return;
        }

        if (w.id == kBorderRouter) {
            Ciphertext ct = ciphertext_from_bytes(body.ciphertext, body.key_id);
            BigUint plain;
            try {
                plain = paillier_decrypt(root.he.pub, root.he.sec, ct);
            } catch (const Error&) {
                mark_dropped(uids);
                log("data-reject", w.id, "undecryptable");
                return;
            }
            std::uint64_t expected = 0;
            for (std::uint64_t uid : uids) expected += payloads[uid].value;
            const BigUint expected_mod = BigUint{expected} % root.he.pub.n;
            if (plain != expected_mod) {
                ++decrypt_mismatches;
                log("decrypt-mismatch", w.id, "uids=" + std::to_string(uids.size()));
            }
            for (std::uint64_t uid : uids) {
                PayloadInfo& info = payloads[uid];
                if (info.state == PayloadInfo::State::Pending) {
                    info.state = PayloadInfo::State::Delivered;
                    ++delivered_per_node[info.source];
                }
            }
            log("data-deliver", w.id,
                "value=" + plain.to_decimal() + " count=" + std::to_string(uids.size()));
            return;
        }

        if (w.attacker_active && w.drop_rng.chance(w.drop_probability)) {
            mark_dropped(uids);
            log("data-drop", w.id, "count=" + std::to_string(uids.size()));
            return;
        }

        w.outbox.push_back({body, uids});
        flush_outbox_soon(w);
    }

    // ---- lifecycle ---------------------------------------------------------

    void on_build_start() {
        Node& br = node(kBorderRouter);
        br.rank = Rank{config.rank_params.root_base};
        log("build-start", kBorderRouter, "rank=" + std::to_string(br.rank.value));
        send_dio(br);
        start_periodic_dio(br);
    }

    void on_arm_detection() {
        detection_armed = true;
        log("detection-armed", kBorderRouter, "");

        // Clean-route PDR sampling during the attack-free window seeds the
        // decision threshold.
        std::vector<std::pair<std::size_t, NodeId>> ranked;
        for (const auto& [dest, known] : root.routes)
            ranked.push_back({known.hops.size(), dest});
        std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
            if (a.first != b.first) return a.first > b.first;
            return a.second < b.second;
        });
        std::uint32_t launched = 0;
        for (const auto& [depth, dest] : ranked) {
            if (launched >= config.clean_probe_routes) break;
            const auto& route = root.routes[dest].hops;
            if (!route_usable(route)) continue;
            launch_probe(route, kBorderRouter, ProbePurpose::Clean, 0);
            ++launched;
        }
        if (launched == 0) {
            // Degenerate single-node topologies still need a threshold.
            root.threshold = update_threshold(root.threshold, 1.0);
        }
    }

    void on_attacker_activate(Node& v) {
        v.attacker_active = true;
        log("attacker-activate", v.id, "");
        send_dio(v);
        start_periodic_dio(v);
    }

    void dispatch_timer(const Event& e) {
        switch (e.timer) {
            case TimerKind::ReqpRound: on_reqp_round(static_cast<std::uint32_t>(e.a)); break;
            case TimerKind::ReliabilityTick: on_reliability_tick(); break;
            case TimerKind::BuildStart: on_build_start(); break;
            case TimerKind::ArmDetection: on_arm_detection(); break;
            case TimerKind::AttackerActivate: on_attacker_activate(node(e.subject)); break;
            case TimerKind::DioPeriodic: on_periodic_dio(node(e.subject)); break;
            case TimerKind::DataGenerate:
                on_data_generate(node(e.subject), static_cast<SimTime>(e.a));
                break;
            case TimerKind::DataFlush: on_data_flush(node(e.subject)); break;
            case TimerKind::ProbeSend: on_probe_send(e.a); break;
            case TimerKind::ProbeDeadline:
                on_probe_deadline(static_cast<std::uint32_t>(e.a));
                break;
            case TimerKind::ReattachTry: on_reattach_try(node(e.subject)); break;
            case TimerKind::QuarantineAudit: on_quarantine_audit(e.a); break;
        }
    }

    void dispatch_delivery(const Event& e) {
        Packet p = decode_packet(e.bytes);
        ++link[type_index(p)].delivered;
        Node& receiver = node(e.to);
        debit_rx(receiver, p);

        if (const auto* dio = std::get_if<DioBody>(&p)) {
            handle_dio(receiver, *dio);
        } else if (const auto* reqp = std::get_if<ReqpRBody>(&p)) {
            handle_reqp(receiver, *reqp, e.from);
        } else if (const auto* ack = std::get_if<AckBody>(&p)) {
            handle_ack(receiver, *ack, e.from);
        } else if (const auto* mc = std::get_if<RplMcBody>(&p)) {
            handle_rplmc(receiver, *mc, e.from);
        } else if (const auto* warn = std::get_if<WarningBody>(&p)) {
            handle_warning(receiver, *warn, e.from);
        } else if (const auto* data = std::get_if<DataBody>(&p)) {
            handle_data(receiver, *data, e.from);
        }
    }

    RunResult finish() {
        RunResult result;

        // Anything still queued is in flight.
        while (!queue.empty()) {
            const Event& e = queue.top();
            if (!e.is_timer) {
                const Packet p = decode_packet(e.bytes);
                ++link[type_index(p)].in_flight;
            }
            queue.pop();
        }

        result.attackers = attacker_ids;
        result.quarantined = root.quarantined;
        for (std::uint32_t i = 1; i < nodes.size(); ++i) {
            const NodeId id{i};
            const bool attacker = attacker_ids.count(id) != 0;
            const bool quarantined = root.quarantined.count(id) != 0;
            if (attacker && quarantined) ++result.confusion.tp;
            if (attacker && !quarantined) ++result.confusion.fn;
            if (!attacker && quarantined) ++result.confusion.fp;
            if (!attacker && !quarantined) ++result.confusion.tn;
        }
        for (NodeId a : attacker_ids)
            if (!root.probed.count(a)) result.unprobed_attackers.insert(a);

        result.sent_per_node = sent_per_node;
        result.delivered_per_node = delivered_per_node;
        for (const auto& [uid, info] : payloads) {
            ++result.payloads_sent;
            switch (info.state) {
                case PayloadInfo::State::Delivered: ++result.payloads_delivered; break;
                case PayloadInfo::State::Dropped: ++result.payloads_dropped; break;
                case PayloadInfo::State::Pending: ++result.payloads_pending; break;
            }
        }
        result.decrypt_mismatches = decrypt_mismatches;
        result.link = link;

        DodagGraph graph;
        for (const Node& v : nodes) graph.add_node(v.id);
        for (NodeId q : root.quarantined) graph.quarantine(q);
        graph.set_rank(kBorderRouter, Rank{config.rank_params.root_base});
        for (const Node& v : nodes) {
            if (v.id == kBorderRouter) continue;
            if (root.quarantined.count(v.id)) continue;
            if (!v.parent.has_value() || v.rank == kInfiniteRank) continue;
            if (root.quarantined.count(*v.parent)) continue;
            graph.set_parent(v.id, *v.parent, v.rank);
        }
        result.graph_violation = graph.validate();
        result.final_graph = std::move(graph);

        result.trace = std::move(trace);
        result.trace_digest = result.trace.digest();
        return result;
    }

    RunResult run() {
        while (!queue.empty()) {
            const Event e = queue.top();
            if (e.at > end_time) break;
            queue.pop();
            now = e.at;
            if (e.is_timer)
                dispatch_timer(e);
            else
                dispatch_delivery(e);
        }
        now = end_time;
        return finish();
    }
};

Simulator::Simulator(const ScenarioConfig& config, const RunOptions& opts)
    : impl_(std::make_unique<Impl>(config, opts)) {
    impl_->init(std::nullopt, std::nullopt);
}

Simulator::Simulator(const ScenarioConfig& config, const RunOptions& opts, Topology topology,
                     const std::set<NodeId>& attackers)
    : impl_(std::make_unique<Impl>(config, opts)) {
    impl_->init(std::move(topology), attackers);
}

Simulator::~Simulator() = default;

RunResult Simulator::run() { return impl_->run(); }

const MonitoringTable& Simulator::monitoring_table(NodeId id) const {
    return impl_->nodes.at(id.value).table;
}

EnergyLevel Simulator::node_energy(NodeId id) const {
    return impl_->nodes.at(id.value).energy;
}

RunResult run_scenario(const ScenarioConfig& config, const RunOptions& opts) {
    Simulator sim(config, opts);
    return sim.run();
}

} // namespace dshrpl
