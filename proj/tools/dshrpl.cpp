// Command-line front end: single runs, the scenario matrix, and report
// rendering over previously written CSVs.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "dshrpl/matrix.hpp"
#include "dshrpl/metrics.hpp"
#include "dshrpl/scenario.hpp"
#include "dshrpl/sim.hpp"

namespace {

int cmd_run(const std::string& config_path, std::uint64_t seed, bool seed_set,
            const std::string& out_dir, const std::string& defense, bool write_trace) {
    dshrpl::ScenarioConfig config =
        config_path.empty() ? dshrpl::ScenarioConfig{} : dshrpl::load_scenario_file(config_path);
    if (seed_set) config.seed = seed;

    dshrpl::RunOptions opts;
    opts.defense = defense != "off";

    dshrpl::RunResult result = dshrpl::run_scenario(config, opts);

    std::cout << "scenario seed=" << config.seed << " defense=" << (opts.defense ? "dsh-rpl" : "off")
              << "\n  nodes=" << config.num_nodes << " attackers=" << result.attackers.size()
              << " quarantined=" << result.quarantined.size() << "\n  dr="
              << dshrpl::format_metric(dshrpl::detection_rate(result.confusion))
              << " fpr=" << dshrpl::format_metric(dshrpl::false_positive_rate(result.confusion))
              << " fnr=" << dshrpl::format_metric(dshrpl::false_negative_rate(result.confusion))
              << " pdr="
              << dshrpl::format_metric(dshrpl::packet_delivery_rate(result.payloads_sent,
                                                                    result.payloads_delivered))
              << "\n  payloads sent=" << result.payloads_sent
              << " delivered=" << result.payloads_delivered
              << " dropped=" << result.payloads_dropped << " pending=" << result.payloads_pending
              << "\n  trace_digest=" << result.trace_digest << "\n";
    if (!result.unprobed_attackers.empty()) {
        std::cout << "  attackers never probed:";
        for (dshrpl::NodeId id : result.unprobed_attackers) std::cout << ' ' << id.value;
        std::cout << "\n";
    }
    if (!result.graph_violation.empty())
        std::cout << "  final graph violation: " << result.graph_violation << "\n";

    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        if (write_trace) {
            std::ofstream trace(out_dir + "/trace.log", std::ios::binary);
            trace << result.trace.to_text();
        }
        std::ofstream edges(out_dir + "/edges.txt", std::ios::binary);
        edges << result.final_graph.to_edge_list();
    }
    return result.graph_violation.empty() ? 0 : 1;
}

int cmd_matrix(const std::string& matrix_path, const std::string& out_dir, std::uint32_t reps,
               std::uint32_t jobs) {
    dshrpl::MatrixConfig matrix = dshrpl::load_matrix_file(matrix_path);
    dshrpl::MatrixOutcome outcome = dshrpl::run_matrix(matrix, out_dir, reps, jobs);
    std::size_t failed = 0;
    for (const dshrpl::MetricsRow& row : outcome.rows)
        if (!row.error.empty()) ++failed;
    std::cout << "matrix complete: " << outcome.rows.size() << " cells, " << failed
              << " errored; CSVs in " << out_dir << "\n";
    return outcome.all_ok ? 0 : 1;
}

int cmd_report(const std::string& in_dir, const std::string& format) {
    std::ifstream in(in_dir + "/summary.csv");
    if (!in) {
        std::cerr << "no summary.csv under " << in_dir << "\n";
        return 1;
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (format == "csv")
        std::cout << buffer.str();
    else
        std::cout << dshrpl::render_table(buffer.str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"DSH-RPL sinkhole-defense simulator"};
    app.require_subcommand(1);

    std::string config_path, out_dir, defense = "on", matrix_path, in_dir, format = "table";
    std::uint64_t seed = 0;
    std::uint32_t reps = 1, jobs = std::max(1u, std::thread::hardware_concurrency());
    bool write_trace = false;

    auto* run = app.add_subcommand("run", "run one scenario");
    run->add_option("--config", config_path, "scenario file (defaults used when omitted)");
    auto* seed_opt = run->add_option("--seed", seed, "override the scenario seed");
    run->add_option("--out", out_dir, "directory for trace/edge-list outputs");
    run->add_option("--defense", defense, "on|off")->check(CLI::IsMember({"on", "off"}));
    run->add_flag("--trace", write_trace, "write the full event trace");

    auto* matrix = app.add_subcommand("matrix", "run a scenario matrix");
    matrix->add_option("--matrix", matrix_path, "matrix file")->required();
    matrix->add_option("--out", out_dir, "output directory")->required();
    matrix->add_option("--reps", reps, "repetitions (seeds) per cell");
    matrix->add_option("--jobs", jobs, "parallel workers");

    auto* report = app.add_subcommand("report", "render results from a matrix directory");
    report->add_option("--in", in_dir, "matrix output directory")->required();
    report->add_option("--format", format, "csv|table")->check(CLI::IsMember({"csv", "table"}));

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed())
            return cmd_run(config_path, seed, seed_opt->count() > 0, out_dir, defense, write_trace);
        if (matrix->parsed()) return cmd_matrix(matrix_path, out_dir, reps, jobs);
        if (report->parsed()) return cmd_report(in_dir, format);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
