#include "dshrpl/matrix.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <thread>
#include <tuple>

#include "dshrpl/errors.hpp"
#include "dshrpl/sim.hpp"

namespace dshrpl {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return {};
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

std::vector<double> parse_interval_list(const std::string& value) {
    std::vector<double> out;
    std::istringstream in(value);
    std::string item;
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            fail(ErrorKind::Config, "bad attack_interval value: " + item);
        }
    }
    if (out.empty()) fail(ErrorKind::Config, "attack_interval list is empty");
    return out;
}

} // namespace

MatrixConfig parse_matrix(const std::string& text) {
    MatrixConfig matrix;
    ScenarioConfig defaults;
    std::vector<double> default_intervals{defaults.attack_interval_s};
    MatrixScenario* current = nullptr;

    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        if (line.front() == '[') {
            if (line.back() != ']') fail(ErrorKind::Config, "unterminated section header: " + line);
            MatrixScenario scenario;
            scenario.name = trim(line.substr(1, line.size() - 2));
            if (scenario.name.empty()) fail(ErrorKind::Config, "empty scenario name");
            scenario.base = defaults;
            scenario.attack_intervals = default_intervals;
            matrix.scenarios.push_back(std::move(scenario));
            current = &matrix.scenarios.back();
            continue;
        }

        const auto eq = line.find('=');
        if (eq == std::string::npos) fail(ErrorKind::Config, "expected key=value, got: " + line);
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));

        if (key == "attack_interval") {
            auto list = parse_interval_list(value);
            if (current)
                current->attack_intervals = std::move(list);
            else
                default_intervals = std::move(list);
            continue;
        }
        apply_scenario_key(current ? current->base : defaults, key, value);
    }

    if (matrix.scenarios.empty()) fail(ErrorKind::Config, "matrix defines no scenarios");
    return matrix;
}

MatrixConfig load_matrix_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::Config, "cannot open matrix file: " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_matrix(buffer.str());
}

namespace {

struct Cell {
    std::string scenario;
    ScenarioConfig config;
    bool defense = true;
    std::uint64_t seed = 0;
};

MetricsRow run_cell(const Cell& cell) {
    MetricsRow row;
    row.scenario = cell.scenario;
    row.attack_interval = cell.config.attack_interval_s;
    row.defense_mode = cell.defense ? "dsh-rpl" : "off";
    row.seed = cell.seed;

    const auto started = std::chrono::steady_clock::now();
    try {
        ScenarioConfig config = cell.config;
        config.seed = cell.seed;
        RunOptions opts;
        opts.defense = cell.defense;
        opts.keep_trace = false;
        RunResult result = run_scenario(config, opts);
        row.dr = detection_rate(result.confusion);
        row.fpr = false_positive_rate(result.confusion);
        row.fnr = false_negative_rate(result.confusion);
        row.pdr = packet_delivery_rate(result.payloads_sent, result.payloads_delivered);
    } catch (const std::exception& e) {
        row.error = e.what();
    }
    row.runtime_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    return row;
}

std::string csv_value(const MetricsRow& row, const std::string& metric) {
    if (!row.error.empty()) return "ERROR";
    if (metric == "dr") return format_metric(row.dr);
    if (metric == "fpr") return format_metric(row.fpr);
    if (metric == "fnr") return format_metric(row.fnr);
    return format_metric(row.pdr);
}

std::optional<double> metric_value(const MetricsRow& row, const std::string& metric) {
    if (!row.error.empty()) return std::nullopt;
    if (metric == "dr") return row.dr;
    if (metric == "fpr") return row.fpr;
    if (metric == "fnr") return row.fnr;
    return row.pdr;
}

std::string format_interval(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", v);
    return buf;
}

} // namespace

std::string rows_to_csv(const std::vector<MetricsRow>& rows, const std::string& metric) {
    std::ostringstream os;
    os << "scenario,attack_interval,defense_mode,seed,value\n";
    for (const MetricsRow& row : rows) {
        os << row.scenario << ',' << format_interval(row.attack_interval) << ','
           << row.defense_mode << ',' << row.seed << ',' << csv_value(row, metric) << '\n';
    }
    return os.str();
}

std::string summarize_rows(const std::vector<MetricsRow>& rows) {
    // key: scenario, interval, mode, metric -> values
    std::map<std::tuple<std::string, std::string, std::string, std::string>, std::vector<double>>
        groups;
    for (const MetricsRow& row : rows) {
        for (const std::string metric : {"dr", "fpr", "fnr", "pdr"}) {
            const auto v = metric_value(row, metric);
            if (!v.has_value()) continue;
            groups[{row.scenario, format_interval(row.attack_interval), row.defense_mode, metric}]
                .push_back(*v);
        }
    }

    std::ostringstream os;
    os << "scenario,attack_interval,defense_mode,metric,mean,sd,n\n";
    for (const auto& [key, values] : groups) {
        double sum = 0.0;
        for (double v : values) sum += v;
        const double mean = sum / static_cast<double>(values.size());
        double sq = 0.0;
        for (double v : values) sq += (v - mean) * (v - mean);
        const double sd = std::sqrt(sq / static_cast<double>(values.size()));
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.4f,%.4f,%zu", mean, sd, values.size());
        os << std::get<0>(key) << ',' << std::get<1>(key) << ',' << std::get<2>(key) << ','
           << std::get<3>(key) << ',' << buf << '\n';
    }
    return os.str();
}

std::string render_table(const std::string& summary_csv) {
    std::istringstream in(summary_csv);
    std::string line;
    std::ostringstream os;
    bool header = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream cells(line);
        std::string cell;
        while (std::getline(cells, cell, ',')) {
            os << cell;
            os << std::string(cell.size() < 14 ? 14 - cell.size() : 1, ' ');
        }
        os << '\n';
        if (header) {
            os << std::string(14 * 7, '-') << '\n';
            header = false;
        }
    }
    return os.str();
}

MatrixOutcome run_matrix(const MatrixConfig& matrix, const std::string& out_dir,
                         std::uint32_t reps, std::uint32_t jobs) {
    if (reps == 0) fail(ErrorKind::Config, "reps must be at least 1");

    std::vector<Cell> cells;
    for (const MatrixScenario& scenario : matrix.scenarios) {
        for (double interval : scenario.attack_intervals) {
            for (std::uint32_t rep = 0; rep < reps; ++rep) {
                for (bool defense : {true, false}) {
                    Cell cell;
                    cell.scenario = scenario.name;
                    cell.config = scenario.base;
                    cell.config.attack_interval_s = interval;
                    cell.defense = defense;
                    cell.seed = scenario.base.seed + rep;
                    cells.push_back(std::move(cell));
                }
            }
        }
    }

    std::vector<MetricsRow> rows(cells.size());
    if (jobs <= 1) {
        for (std::size_t i = 0; i < cells.size(); ++i) rows[i] = run_cell(cells[i]);
    } else {
        std::atomic<std::size_t> next{0};
        auto worker = [&] {
            while (true) {
                const std::size_t i = next.fetch_add(1);
                if (i >= cells.size()) return;
                rows[i] = run_cell(cells[i]);
            }
        };
        std::vector<std::thread> pool;
        for (std::uint32_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }

    std::filesystem::create_directories(out_dir);
    for (const std::string metric : {"dr", "fpr", "fnr", "pdr"}) {
        std::ofstream out(out_dir + "/" + metric + ".csv", std::ios::binary);
        out << rows_to_csv(rows, metric);
    }
    {
        std::ofstream out(out_dir + "/summary.csv", std::ios::binary);
        out << summarize_rows(rows);
    }

    MatrixOutcome outcome;
    outcome.rows = std::move(rows);
    for (const MetricsRow& row : outcome.rows)
        if (!row.error.empty()) outcome.all_ok = false;
    return outcome;
}

} // namespace dshrpl
