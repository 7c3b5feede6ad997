#pragma once

// Scenario-matrix execution: parses a sectioned key=value matrix file,
// expands every (scenario, attack interval, defense mode, repetition) cell,
// runs the cells (optionally in parallel) and writes one CSV per metric
// plus an aggregate summary. Output is byte-stable for fixed inputs.

#include <string>
#include <vector>

#include "dshrpl/metrics.hpp"
#include "dshrpl/scenario.hpp"

namespace dshrpl {

struct MatrixScenario {
    std::string name;
    ScenarioConfig base;
    std::vector<double> attack_intervals;  // one cell per value
};

struct MatrixConfig {
    std::vector<MatrixScenario> scenarios;
};

MatrixConfig parse_matrix(const std::string& text);
MatrixConfig load_matrix_file(const std::string& path);

struct MatrixOutcome {
    std::vector<MetricsRow> rows;
    bool all_ok = true;
};

// reps seeds per cell (seed = base seed + rep), both defense modes each.
// Writes dr.csv, fpr.csv, fnr.csv, pdr.csv and summary.csv under out_dir.
MatrixOutcome run_matrix(const MatrixConfig& matrix, const std::string& out_dir,
                         std::uint32_t reps, std::uint32_t jobs);

// CSV helpers shared with the report subcommand.
std::string rows_to_csv(const std::vector<MetricsRow>& rows,
                        const std::string& metric);  // metric in {dr,fpr,fnr,pdr}
std::string summarize_rows(const std::vector<MetricsRow>& rows);
std::string render_table(const std::string& summary_csv);

} // namespace dshrpl
