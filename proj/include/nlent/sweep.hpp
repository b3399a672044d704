// sweep.hpp: parameter sweeps over xi and the hierarchy index n, CSV output,
// truncation convergence and plot series

#pragma once

#include "nlent/criteria.hpp"
#include "nlent/dynamics.hpp"

#include <array>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace nlent {

struct SweepConfig {
    int k = 1;
    int l = 2;
    std::vector<int> hierarchy{1, 2, 3};
    double alpha_p = 5.0;
    double kappa = 1.0;
    double xi_max = 1.5;
    double xi_step = 0.02;
    std::vector<double> xi_grid;  // explicit grid; overrides xi_max / xi_step when set
    std::array<int, 3> dims{100, 62, 124};  // pump, A, B
    double thermal_a = 0.0;  // mean thermal occupation of the initial A, B modes
    double thermal_b = 0.0;
    bool with_nz = false;
    std::string output = "sweep.csv";
    int convergence_step = 8;
    // Every convergence_stride-th grid point is rerun by convergence_check.
    int convergence_stride = 10;
    double convergence_threshold = 1e-4;
    double tolerance = 1e-9;
    int krylov_dim = 30;
    double truncation_guard = 1e-6;
    unsigned workers = 0;  // 0: hardware concurrency

    std::vector<double> grid() const;
    ModeLayout layout() const;
    // Throws ConfigError naming the offending key.
    void validate() const;
};

// key = value lines; '#' starts a comment. Keys match the SweepConfig fields;
// dims, hierarchy and xi_grid take comma-separated lists.
SweepConfig parse_config(std::istream& in, SweepConfig base = {});
SweepConfig load_config(const std::string& path, SweepConfig base = {});
void apply_setting(SweepConfig& config, const std::string& key, const std::string& value);
// Provenance lines written at the top of the CSV (without the leading '#').
std::vector<std::string> describe(const SweepConfig& config);

struct SweepRow {
    double xi = 0.0;
    WitnessReport report;
    bool truncation_flag = false;
    bool physical = true;  // uncertainty and inequality7 margins >= -1e-8
    double max_first_moment = 0.0;
    std::vector<double> top_populations;  // pump, A, B
    Eigen::Matrix4d V = Eigen::Matrix4d::Zero();
    double f_kA = 0.0;
    double f_lB = 0.0;

    bool flagged() const { return truncation_flag || !physical; }
};

constexpr double kPhysicalityTolerance = 1e-8;

// Pump coherent state with amplitude alpha_p and A, B in vacuum or thermal states.
QuantumState initial_state(const SweepConfig& config);

// One row per (xi, n), ordered by xi then n. Each state is handed to a bounded
// worker pool that evaluates the requested n values.
std::vector<SweepRow> run_sweep(const SweepConfig& config);

// Writes `config.output` via a temporary file and rename.
void write_csv(const std::vector<SweepRow>& rows, const SweepConfig& config, const std::string& path);
std::vector<std::string> csv_columns();
std::string format_number(double value);

// Parses a CSV produced by write_csv.
std::vector<SweepRow> read_csv(const std::string& path);

// 0 when no row is flagged, 2 otherwise.
int exit_code(const std::vector<SweepRow>& rows);

struct ConvergenceEntry {
    double xi = 0.0;
    int n = 1;
    double nu_base = 0.0;
    double nu_refined = 0.0;
    std::optional<double> nz_base;
    std::optional<double> nz_refined;
};

struct ConvergenceReport {
    std::array<int, 3> base_dims{};
    std::array<int, 3> refined_dims{};
    std::vector<ConvergenceEntry> entries;
    double max_delta = 0.0;  // over nu_minus and, when present, N_Z
    double threshold = 1e-4;
    bool passed = false;
};

ConvergenceReport convergence_check(const SweepConfig& config);
void print_report(const ConvergenceReport& report, std::ostream& out);

// A series is a CSV column restricted to one hierarchy index, e.g. nu_minus at n = 2.
struct SeriesSpec {
    std::string column;
    int n = 1;
};

// "nu_minus:2" -> {nu_minus, 2}; the index defaults to 1.
SeriesSpec parse_series(const std::string& text);

// Writes one block per series: a '# column n=...' line followed by "xi value" lines.
void emit_plot_data(const std::vector<SweepRow>& rows, const std::vector<SeriesSpec>& selection, std::ostream& out);

// Value of a named CSV column for a row; throws ConfigError on unknown names.
double column_value(const SweepRow& row, const std::string& column);

} // namespace nlent
