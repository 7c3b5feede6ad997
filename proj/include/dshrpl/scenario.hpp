#pragma once

// Scenario configuration: everything a run depends on, loadable from a
// plain-text key=value file. A fixed config and seed fully determine a run.

#include <cstdint>
#include <string>

#include "dshrpl/dodag_builder.hpp"
#include "dshrpl/trust.hpp"
#include "dshrpl/types.hpp"

namespace dshrpl {

struct ScenarioConfig {
    // Topology and schedule. The desk-scale default keeps the node density
    // of the 500-node/300x300 reference deployments in reach of 50 nodes;
    // configs may restore the full-scale geometry.
    std::uint32_t num_nodes = 50;
    double area_width_m = 200.0;
    double area_height_m = 200.0;
    double radio_range_m = 50.0;
    double duration_s = 150.0;

    // Attack model
    double sinkhole_rate = 0.2;       // fraction of non-root nodes
    double attack_interval_s = 0.0;   // activation stagger; 0 = simultaneous
    double attack_start_s = 55.0;
    double drop_probability = 1.0;    // transit drop chance once active

    std::uint64_t seed = 1;

    // Trust calculus
    ReliabilityWeights weights;
    std::uint32_t trust_cap = kDefaultTrustCap;
    std::uint32_t reqp_rounds = 3;

    // DODAG
    RankParams rank_params;
    double dio_period_s = 5.0;

    // Detection
    std::uint32_t n_probes = 10;
    double probe_spacing_s = 0.1;
    std::uint32_t clean_probe_routes = 5;
    double recheck_cooldown_s = 10.0;

    // Data plane
    double data_rate_pps = 0.2;  // payloads per second per node
    double data_start_s = 40.0;
    double drain_margin_s = 5.0;
    double aggregation_window_s = 0.1;
    std::uint32_t he_prime_bits = 32;

    // Link and energy model
    double link_latency_s = 0.002;
    double ambient_loss = 0.0;
    std::uint32_t initial_energy = 1000000;  // milli-units
    std::uint32_t tx_cost = 50;
    std::uint32_t rx_cost = 20;
    std::uint32_t avg_transaction_bytes = 77;  // scales DATA energy debits

    // Repair
    double reattach_delay_s = 0.1;

    void validate() const;  // throws Error(Config) on any inconsistency

    std::uint32_t attacker_count() const;

    // Derived schedule points
    SimTime warmup_end() const;     // after the REQP_R rounds
    SimTime build_start() const;
    SimTime detection_arm() const;
    SimTime data_end() const;
};

// key=value parsing; '#' starts a comment. Unknown keys are rejected.
ScenarioConfig parse_scenario(const std::string& text);
ScenarioConfig load_scenario_file(const std::string& path);
void apply_scenario_key(ScenarioConfig& config, const std::string& key, const std::string& value);

} // namespace dshrpl
