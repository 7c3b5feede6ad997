#include "dshrpl/scenario.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "dshrpl/errors.hpp"

namespace dshrpl {

void ScenarioConfig::validate() const {
    if (num_nodes == 0) fail(ErrorKind::Config, "num_nodes must be positive");
    if (area_width_m <= 0 || area_height_m <= 0) fail(ErrorKind::Config, "area must be positive");
    if (radio_range_m <= 0) fail(ErrorKind::Config, "radio_range must be positive");
    if (duration_s <= 0) fail(ErrorKind::Config, "duration must be positive");
    if (sinkhole_rate < 0 || sinkhole_rate > 1)
        fail(ErrorKind::Config, "sinkhole_rate outside [0,1]");
    if (attack_interval_s < 0) fail(ErrorKind::Config, "attack_interval must be non-negative");
    if (drop_probability < 0 || drop_probability > 1)
        fail(ErrorKind::Config, "drop_probability outside [0,1]");
    weights.validate();
    rank_params.validate();
    if (reqp_rounds == 0) fail(ErrorKind::Config, "at least one REQP_R round is required");
    if (n_probes == 0) fail(ErrorKind::Config, "n_probes must be at least 1");
    if (probe_spacing_s <= 0) fail(ErrorKind::Config, "probe_spacing must be positive");
    if (data_rate_pps < 0) fail(ErrorKind::Config, "data_rate must be non-negative");
    if (he_prime_bits < 16) fail(ErrorKind::Config, "he_prime_bits must be at least 16");
    if (link_latency_s <= 0) fail(ErrorKind::Config, "link_latency must be positive");
    if (ambient_loss < 0 || ambient_loss > 1) fail(ErrorKind::Config, "ambient_loss outside [0,1]");
    if (initial_energy == 0) fail(ErrorKind::Config, "initial_energy must be positive");
    if (avg_transaction_bytes == 0) fail(ErrorKind::Config, "avg_transaction_bytes must be positive");
    if (data_start_s < 0 || data_start_s >= duration_s)
        fail(ErrorKind::Config, "data_start outside the run window");
    if (attack_start_s < 0) fail(ErrorKind::Config, "attack_start must be non-negative");
    if (seconds_to_us(attack_start_s) < detection_arm())
        fail(ErrorKind::Config, "attack_start precedes detection arming");
}

std::uint32_t ScenarioConfig::attacker_count() const {
    if (num_nodes <= 1) return 0;
    const auto honest_pool = num_nodes - 1;  // border router never attacks
    const auto count =
        static_cast<std::uint32_t>(std::llround(sinkhole_rate * static_cast<double>(num_nodes)));
    return count > honest_pool ? honest_pool : count;
}

SimTime ScenarioConfig::warmup_end() const {
    return static_cast<SimTime>(reqp_rounds) * weights.delta_t;
}

SimTime ScenarioConfig::build_start() const { return warmup_end() + kMicrosPerSecond; }

SimTime ScenarioConfig::detection_arm() const {
    return build_start() + 5 * kMicrosPerSecond;
}

SimTime ScenarioConfig::data_end() const {
    return seconds_to_us(duration_s - drain_margin_s);
}

namespace {

double parse_double(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        fail(ErrorKind::Config, "bad numeric value for " + key + ": " + value);
    }
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const std::uint64_t v = std::stoull(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        fail(ErrorKind::Config, "bad integer value for " + key + ": " + value);
    }
}

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return {};
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

} // namespace

void apply_scenario_key(ScenarioConfig& c, const std::string& key, const std::string& value) {
    if (key == "num_nodes") c.num_nodes = static_cast<std::uint32_t>(parse_u64(key, value));
    else if (key == "area_width") c.area_width_m = parse_double(key, value);
    else if (key == "area_height") c.area_height_m = parse_double(key, value);
    else if (key == "radio_range") c.radio_range_m = parse_double(key, value);
    else if (key == "duration") c.duration_s = parse_double(key, value);
    else if (key == "sinkhole_rate") c.sinkhole_rate = parse_double(key, value);
    else if (key == "attack_interval") c.attack_interval_s = parse_double(key, value);
    else if (key == "attack_start") c.attack_start_s = parse_double(key, value);
    else if (key == "drop_probability") c.drop_probability = parse_double(key, value);
    else if (key == "seed") c.seed = parse_u64(key, value);
    else if (key == "w_energy") c.weights.w_energy = parse_double(key, value);
    else if (key == "w_trust") c.weights.w_trust = parse_double(key, value);
    else if (key == "w_veracity") c.weights.w_veracity = parse_double(key, value);
    else if (key == "alpha") c.weights.alpha = parse_double(key, value);
    else if (key == "delta_t") c.weights.delta_t = seconds_to_us(parse_double(key, value));
    else if (key == "trust_cap") c.trust_cap = static_cast<std::uint32_t>(parse_u64(key, value));
    else if (key == "reqp_rounds") c.reqp_rounds = static_cast<std::uint32_t>(parse_u64(key, value));
    else if (key == "min_h") c.rank_params.min_h = static_cast<std::uint16_t>(parse_u64(key, value));
    else if (key == "max_h") c.rank_params.max_h = static_cast<std::uint16_t>(parse_u64(key, value));
    else if (key == "root_base") c.rank_params.root_base = static_cast<std::uint16_t>(parse_u64(key, value));
    else if (key == "reliability_threshold") c.rank_params.reliability_threshold = parse_double(key, value);
    else if (key == "dio_period") c.dio_period_s = parse_double(key, value);
    else if (key == "n_probes") c.n_probes = static_cast<std::uint32_t>(parse_u64(key, value));
    else if (key == "probe_spacing") c.probe_spacing_s = parse_double(key, value);
    else if (key == "clean_probe_routes") c.clean_probe_routes = static_cast<std::uint32_t>(parse_u64(key, value));
    else if (key == "recheck_cooldown") c.recheck_cooldown_s = parse_double(key, value);
    else if (key == "data_rate") c.data_rate_pps = parse_double(key, value);
    else if (key == "data_start") c.data_start_s = parse_double(key, value);
    else if (key == "drain_margin") c.drain_margin_s = parse_double(key, value);
    else if (key == "aggregation_window") c.aggregation_window_s = parse_double(key, value);
    else if (key == "he_prime_bits") c.he_prime_bits = static_cast<std::uint32_t>(parse_u64(key, value));
    else if (key == "link_latency") c.link_latency_s = parse_double(key, value);
    else if (key == "ambient_loss") c.ambient_loss = parse_double(key, value);
    else if (key == "initial_energy") c.initial_energy = static_cast<std::uint32_t>(parse_u64(key, value));
    else if (key == "tx_cost") c.tx_cost = static_cast<std::uint32_t>(parse_u64(key, value));
    else if (key == "rx_cost") c.rx_cost = static_cast<std::uint32_t>(parse_u64(key, value));
    else if (key == "avg_transaction_bytes") c.avg_transaction_bytes = static_cast<std::uint32_t>(parse_u64(key, value));
    else if (key == "reattach_delay") c.reattach_delay_s = parse_double(key, value);
    else fail(ErrorKind::Config, "unknown scenario key: " + key);
}

ScenarioConfig parse_scenario(const std::string& text) {
    ScenarioConfig config;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            fail(ErrorKind::Config, "expected key=value, got: " + line);
        apply_scenario_key(config, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return config;
}

ScenarioConfig load_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::Config, "cannot open scenario file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_scenario(buffer.str());
}

} // namespace dshrpl
