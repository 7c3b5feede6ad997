#include "dshrpl/trust.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dshrpl/errors.hpp"

namespace dshrpl {

namespace {

bool in_unit_range(double v) { return v >= 0.0 && v <= 1.0; }

// Deterministic majority view: the lower median of the sorted values.
template <typename T>
T lower_median(std::vector<T> values) {
    std::sort(values.begin(), values.end());
    return values[(values.size() - 1) / 2];
}

} // namespace

void ReliabilityWeights::validate() const {
    const double sum = w_energy + w_trust + w_veracity;
    if (std::abs(sum - 1.0) > 1e-9)
        fail(ErrorKind::Config, "reliability weights must sum to 1");
    for (double v : {w_energy, w_trust, w_veracity, alpha})
        if (!in_unit_range(v)) fail(ErrorKind::Config, "reliability weight outside [0,1]");
    if (delta_t <= 0) fail(ErrorKind::Config, "delta_t must be positive");
}

void MonitoringTable::record_forward(SimTime at, NodeId neighbor, EnergyLevel energy) {
    MonitoringEntry& e = entries_[neighbor];
    e.neighbor = neighbor;
    ++e.trust_count;
    e.observed_energy = energy;
    e.last_update = at;
    tpm_.append(at, neighbor, "trust", static_cast<double>(e.trust_count));
    tpm_.append(at, neighbor, "energy", static_cast<double>(energy.residual));
}

void MonitoringTable::record_veracity(SimTime at, NodeId neighbor, double score) {
    auto it = entries_.find(neighbor);
    if (it == entries_.end()) return;  // only neighbors we have seen forward
    it->second.veracity = std::clamp(score, 0.0, 1.0);
    it->second.last_update = at;
    tpm_.append(at, neighbor, "veracity", it->second.veracity);
}

const MonitoringEntry* MonitoringTable::find(NodeId neighbor) const {
    auto it = entries_.find(neighbor);
    return it == entries_.end() ? nullptr : &it->second;
}

MonitoringEntry* MonitoringTable::find(NodeId neighbor) {
    auto it = entries_.find(neighbor);
    return it == entries_.end() ? nullptr : &it->second;
}

double MonitoringTable::trust_component(const MonitoringEntry& e) const {
    if (trust_cap_ == 0) return 1.0;
    return std::min(1.0, static_cast<double>(e.trust_count) / static_cast<double>(trust_cap_));
}

std::map<NodeId, double> MonitoringTable::update_reliabilities(SimTime now,
                                                               const ReliabilityWeights& w) {
    w.validate();
    std::map<NodeId, double> out;
    for (auto& [id, e] : entries_) {
        const double energy_direct = energy_component(e);
        const double trust_direct = trust_component(e);
        const double veracity_direct = veracity_component(e);

        // First update has no history: the direct observation stands alone.
        const double energy_rel =
            component_reliability(energy_direct, e.last_energy_rel.value_or(energy_direct), w.alpha);
        const double trust_rel =
            component_reliability(trust_direct, e.last_trust_rel.value_or(trust_direct), w.alpha);
        const double veracity_rel = component_reliability(
            veracity_direct, e.last_veracity_rel.value_or(veracity_direct), w.alpha);

        e.last_energy_rel = energy_rel;
        e.last_trust_rel = trust_rel;
        e.last_veracity_rel = veracity_rel;
        e.last_update = now;

        out[id] = weighted_reliability(energy_rel, trust_rel, veracity_rel, w);
    }
    return out;
}

std::string MonitoringTable::to_text() const {
    std::ostringstream os;
    for (const auto& [id, e] : entries_) {
        os << id.value << ' ' << e.trust_count << ' ' << e.observed_energy.residual << '/'
           << e.observed_energy.initial << ' ' << e.veracity << '\n';
    }
    return os.str();
}

std::vector<ClaimedEntry> MonitoringTable::claims() const {
    std::vector<ClaimedEntry> out;
    out.reserve(entries_.size());
    for (const auto& [id, e] : entries_) {
        ClaimedEntry c;
        c.neighbor = id;
        c.trust_count = e.trust_count;
        c.energy_residual = e.observed_energy.residual;
        c.energy_initial = e.observed_energy.initial;
        c.veracity_fp = reliability_to_wire(e.veracity);
        out.push_back(c);
    }
    return out;
}

double component_reliability(double direct, double previous, double alpha) {
    if (!in_unit_range(direct) || !in_unit_range(previous) || !in_unit_range(alpha))
        fail(ErrorKind::Domain, "component_reliability inputs must lie in [0,1]");
    return alpha * direct + (1.0 - alpha) * previous;
}

double weighted_reliability(double energy, double trust, double veracity,
                            const ReliabilityWeights& w) {
    w.validate();
    if (!in_unit_range(energy) || !in_unit_range(trust) || !in_unit_range(veracity))
        fail(ErrorKind::Domain, "reliability components must lie in [0,1]");
    const double r = w.w_energy * energy + w.w_trust * trust + w.w_veracity * veracity;
    return std::clamp(r, 0.0, 1.0);
}

double final_reliability(const std::vector<double>& received_values) {
    if (received_values.empty())
        fail(ErrorKind::Evidence, "final_reliability needs at least one assessment");
    double sum = 0.0;
    for (double v : received_values) {
        if (!in_unit_range(v)) fail(ErrorKind::Domain, "reliability value outside [0,1]");
        sum += v;
    }
    return sum / static_cast<double>(received_values.size());
}

double self_reliability(const std::vector<double>& received_about_self) {
    if (received_about_self.empty())
        fail(ErrorKind::Evidence, "self_reliability needs at least one report");
    return final_reliability(received_about_self);
}

std::size_t overlapping_claims(const MonitoringTable& own,
                               const std::vector<ClaimedEntry>& peer_claims) {
    std::size_t shared = 0;
    for (const ClaimedEntry& claim : peer_claims)
        if (own.contains(claim.neighbor)) ++shared;
    return shared;
}

double veracity_score(const MonitoringTable& own,
                      const std::vector<ClaimedEntry>& peer_claims,
                      const std::map<NodeId, std::vector<ClaimedEntry>>& other_peers) {
    std::size_t shared = 0;
    std::size_t agreed = 0;

    for (const ClaimedEntry& claim : peer_claims) {
        const MonitoringEntry* mine = own.find(claim.neighbor);
        if (mine == nullptr) continue;  // not a shared neighbor
        ++shared;

        std::vector<std::uint32_t> trust_views{mine->trust_count};
        std::vector<std::uint32_t> energy_views{mine->observed_energy.residual};
        for (const auto& [peer, claims] : other_peers) {
            for (const ClaimedEntry& other : claims) {
                if (other.neighbor == claim.neighbor) {
                    trust_views.push_back(other.trust_count);
                    energy_views.push_back(other.energy_residual);
                }
            }
        }

        const std::uint32_t trust_majority = lower_median(trust_views);
        const std::uint32_t energy_majority = lower_median(energy_views);

        const bool trust_ok =
            claim.trust_count + 1 >= trust_majority && claim.trust_count <= trust_majority + 1;
        const double tol = 0.05 * static_cast<double>(energy_majority);
        const double diff = static_cast<double>(claim.energy_residual) -
                            static_cast<double>(energy_majority);
        const bool energy_ok = std::abs(diff) <= tol;

        if (trust_ok && energy_ok) ++agreed;
    }

    if (shared == 0) return 0.5;
    return static_cast<double>(agreed) / static_cast<double>(shared);
}

} // namespace dshrpl
