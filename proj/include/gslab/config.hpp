#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "gslab/problem.hpp"
#include "gslab/shooting.hpp"

namespace gslab {

inline constexpr const char* kToolVersion = "0.1.0";

/// Full run configuration, read from a flat sectioned key = value file.
/// Unknown sections or keys are rejected.
struct RunConfig {
    // [problem]
    int N = 3;
    double p = 2.0;
    bool q_is_pstar = false; // "q = pstar" pins q to the critical exponent
    double q = 4.0;
    double l = 6.0;
    double eps = 1e-2;
    EquationKind kind = EquationKind::FullProblem;

    // [sweep]
    double eps_lo = 0.0; // 0 selects the regime default grid
    double eps_hi = 0.0;
    int points_per_decade = 8;

    // [integrator]
    IntegratorConfig integrator;

    // [fit]
    std::string fit_table;             // path to a sweep CSV
    std::string fit_column = "a";
    std::string fit_log_power = "none"; // none | auto | <number>
    double fit_tolerance = 0.10;
    double fit_window = 0.5;

    // [output]
    std::string out_dir = "out";
    bool emit_plot_data = false;
    int jobs = 0;

    ProblemParams problem() const;
    void apply_override(const std::string& key_value); // "section.key=value"
};

RunConfig parse_config_text(const std::string& text);
RunConfig load_config(const std::string& path);

/// Canonical serialization: every key in a fixed order, 12 significant
/// digits. parse(serialize(c)) reproduces c.
std::string serialize_config(const RunConfig& config);

/// FNV-1a hash of the canonical serialization.
std::uint64_t config_hash(const RunConfig& config);

/// 12-significant-digit scientific formatting used by all CSV output.
std::string fmt12(double value);

/// Minimal CSV table: header row plus string cells.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    int column_index(const std::string& name) const; // -1 when absent
    std::vector<double> numeric_column(const std::string& name,
                                       const std::string& status_filter = "") const;
};

CsvTable read_csv(const std::string& path);
void write_csv(const std::string& path, const CsvTable& table);

} // namespace gslab
