#pragma once

// Experiment harness: MSE-vs-OF sweeps against the closed-form predictions,
// sliding-DFT vs HoD comparison, M-tilde grids and pure-theory tables. Every
// run is a function of (config, seed); grid points draw independent RNG
// streams derived from the seed and the point index.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "modunfold/signal.hpp"

namespace modunfold {

enum class Experiment { MseSweep, CompareHod, MGrid, TheoryOnly };

std::optional<Experiment> parse_experiment(const std::string& name);
std::string experiment_name(Experiment e);

enum class Preset { Desk, Paper };

struct ExperimentConfig {
    Experiment experiment = Experiment::MseSweep;
    PulseTrainSpec signal;
    std::vector<int> bits{4};
    std::vector<double> oversampling{4, 6, 8, 12, 16, 24, 32, 40, 50};
    std::size_t n = 64;
    double alpha = 0.5;
    std::vector<double> delta_sl;  // rad/sample
    std::size_t trials = 10000;
    int hod_order = 1;
    // m-grid axes; fold-set sizes are N / divisor
    std::vector<std::size_t> grid_n{64, 128, 256};
    std::vector<double> grid_of{4, 8, 12};
    std::vector<std::size_t> grid_s_divisors{32, 16, 8};
    // theory-only: M-tilde is estimated for |S| = N / divisor
    std::size_t theory_s_divisor = 16;
    std::uint64_t seed = 0;
    unsigned threads = 0;  // 0: hardware concurrency
    std::string output;
    bool record_timing = false;

    // Throws ConfigError naming the offending field.
    void validate() const;
};

ExperimentConfig default_config(Experiment e, Preset preset = Preset::Desk);

// Overlays the keys present in a JSON document onto `base`. Angles may be
// given in radians or as strings of the form "pi/32".
ExperimentConfig config_from_json(const std::string& json_text, ExperimentConfig base);

struct ResultRow {
    std::string experiment;
    double of = 0.0;
    int bits = 0;
    double delta_sl = 0.0;
    int k_sl = 0;
    double lambda_prime = 0.0;
    std::optional<double> mse_simulated_db;
    std::optional<double> mse_theory_db;
    std::optional<double> mse_conventional_db;         // simulated conventional ADC
    std::optional<double> mse_conventional_theory_db;  // closed form
    std::optional<double> mse_hod_db;
    std::size_t samples_used = 0;
    double wall_time_ms = 0.0;
    std::uint64_t seed = 0;
    std::string status = "ok";  // ok | skipped
    std::string reason;
    std::size_t residue_errors = 0;  // samples with z_hat != z

    bool ok() const noexcept { return status == "ok"; }
};

struct MGridRow {
    std::size_t n = 0;
    double of = 0.0;
    std::size_t s_size = 0;
    std::optional<double> m_tilde;
    std::optional<double> b_extra;  // log2(1 + 0.75 M)
    std::uint64_t seed = 0;
    std::string status = "ok";
    std::string reason;

    bool ok() const noexcept { return status == "ok"; }
};

struct TheoryRow {
    double of = 0.0;
    int bits = 0;
    double delta_sl = 0.0;
    std::size_t s_size = 0;
    std::string status = "ok";
    std::string reason;
    // populated from theory_report()
    int k_sl = 0;
    double lambda_prime = 0.0, lambda = 0.0, of_required = 0.0;
    bool of_sufficient = false;
    double m_tilde = 0.0, b_required = 0.0;
    bool b_sufficient = false;
    double mse_modulo_db = 0.0, mse_conventional_db = 0.0;

    bool ok() const noexcept { return status == "ok"; }
};

// Shared, seed-derived quantities of a run.
struct SignalContext {
    PulseTrain train;
    double f_inf = 0.0;  // grid peak with safety margin
};

SignalContext make_signal_context(const ExperimentConfig& cfg);

std::vector<ResultRow> run_mse_sweep(const ExperimentConfig& cfg);
std::vector<ResultRow> run_compare_hod(const ExperimentConfig& cfg);
std::vector<MGridRow> run_m_grid(const ExperimentConfig& cfg);
std::vector<TheoryRow> run_theory_only(const ExperimentConfig& cfg);

// splitmix64-style mixing of a base seed with stream indices.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

// CSV documents. Numbers are written with 17 significant digits, missing
// optionals as empty fields, lines terminated by '\n'.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

CsvTable to_csv(const std::vector<ResultRow>& rows, bool include_timing);
CsvTable to_csv(const std::vector<MGridRow>& rows);
CsvTable to_csv(const std::vector<TheoryRow>& rows);

std::string format_csv(const CsvTable& table);
// Throws std::runtime_error with the path on I/O failure.
void emit_csv(const CsvTable& table, const std::string& path);
CsvTable parse_csv(const std::string& text);

std::string format_number(double v);

}  // namespace modunfold
