// modunfold: run the desk-scale experiments and write CSV.
//
//   modunfold mse-sweep|compare-hod|m-grid|theory-only --config <file>
//             [--seed <u64>] [--out <csv>] [--preset desk|paper]
//             [--threads <n>] [--timing]
//
// Exit codes: 0 success, 2 config error, 3 every grid point infeasible.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "modunfold/error.hpp"
#include "modunfold/experiments.hpp"

using namespace modunfold;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitInfeasible = 3;

std::string read_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ConfigError("cannot read config file " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

std::string db(const std::optional<double>& v) {
    if (!v) return "       -";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%8.2f", *v);
    return buf;
}

void print_summary(const std::vector<ResultRow>& rows) {
    std::printf("%6s %3s %9s %4s %10s %8s %8s %8s %8s %8s  %s\n", "OF", "b", "delta_sl", "K", "lambda'", "sim_dB",
                "thy_dB", "conv_dB", "cthy_dB", "hod_dB", "status");
    for (const ResultRow& r : rows)
        std::printf("%6.4g %3d %9.5f %4d %10.4g %s %s %s %s %s  %s%s%s\n", r.of, r.bits, r.delta_sl, r.k_sl,
                    r.lambda_prime, db(r.mse_simulated_db).c_str(), db(r.mse_theory_db).c_str(),
                    db(r.mse_conventional_db).c_str(), db(r.mse_conventional_theory_db).c_str(),
                    db(r.mse_hod_db).c_str(), r.status.c_str(), r.reason.empty() ? "" : ": ", r.reason.c_str());
}

void print_summary(const std::vector<MGridRow>& rows) {
    std::printf("%5s %6s %6s %12s %8s  %s\n", "N", "OF", "|S|", "M~", "b_extra", "status");
    for (const MGridRow& r : rows)
        std::printf("%5zu %6.4g %6zu %12.5g %8.3f  %s%s%s\n", r.n, r.of, r.s_size, r.m_tilde.value_or(NAN),
                    r.b_extra.value_or(NAN), r.status.c_str(), r.reason.empty() ? "" : ": ", r.reason.c_str());
}

void print_summary(const std::vector<TheoryRow>& rows) {
    std::printf("%6s %3s %9s %4s %10s %8s %10s %8s %8s %8s  %s\n", "OF", "b", "delta_sl", "K", "lambda'", "OF_req",
                "M~", "b_req", "mod_dB", "conv_dB", "status");
    for (const TheoryRow& r : rows)
        std::printf("%6.4g %3d %9.5f %4d %10.4g %8.4g %10.5g %8.3f %8.2f %8.2f  %s%s%s\n", r.of, r.bits, r.delta_sl,
                    r.k_sl, r.lambda_prime, r.of_required, r.m_tilde, r.b_required, r.mse_modulo_db,
                    r.mse_conventional_db, r.status.c_str(), r.reason.empty() ? "" : ": ", r.reason.c_str());
}

template <typename Row>
int finish(const std::vector<Row>& rows, const CsvTable& table, const std::string& out) {
    print_summary(rows);
    if (!out.empty()) emit_csv(table, out);
    std::size_t ok = 0;
    for (const Row& r : rows) ok += r.ok() ? 1 : 0;
    std::printf("%zu of %zu grid points evaluated, %zu skipped\n", ok, rows.size(), rows.size() - ok);
    if (!rows.empty() && ok == 0) {
        std::fprintf(stderr, "modunfold: every grid point is infeasible\n");
        return kExitInfeasible;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Modulo-ADC unfolding experiments"};
    std::string command, config_path, out, preset_name = "desk";
    std::uint64_t seed = 0;
    unsigned threads = 0;
    bool timing = false;

    app.add_option("command", command, "mse-sweep | compare-hod | m-grid | theory-only")
        ->required()
        ->check(CLI::IsMember({"mse-sweep", "compare-hod", "m-grid", "theory-only"}));
    app.add_option("--config", config_path, "JSON config file")->required();
    auto* seed_opt = app.add_option("--seed", seed, "base RNG seed");
    auto* out_opt = app.add_option("--out", out, "CSV output path");
    auto* preset_opt =
        app.add_option("--preset", preset_name, "desk | paper")->check(CLI::IsMember({"desk", "paper"}));
    auto* threads_opt = app.add_option("--threads", threads, "worker threads (0: all cores)");
    app.add_flag("--timing", timing, "record per-row wall time in the CSV");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitConfig;
    }

    try {
        const Experiment exp = *parse_experiment(command);
        if (exp != Experiment::TheoryOnly && seed_opt->count() == 0)
            throw ConfigError("--seed is required for " + command);

        const Preset preset = preset_name == "paper" ? Preset::Paper : Preset::Desk;
        ExperimentConfig cfg = config_from_json(read_file(config_path), default_config(exp, preset));
        cfg.experiment = exp;
        if (preset_opt->count() && preset == Preset::Paper) {
            const ExperimentConfig paper = default_config(exp, Preset::Paper);
            cfg.signal.num_pulses = paper.signal.num_pulses;
            cfg.trials = paper.trials;
        }
        if (seed_opt->count()) cfg.seed = seed;
        if (out_opt->count()) cfg.output = out;
        if (threads_opt->count()) cfg.threads = threads;
        if (timing) cfg.record_timing = true;
        cfg.validate();

        switch (exp) {
            case Experiment::MseSweep: {
                const auto rows = run_mse_sweep(cfg);
                return finish(rows, to_csv(rows, cfg.record_timing), cfg.output);
            }
            case Experiment::CompareHod: {
                const auto rows = run_compare_hod(cfg);
                return finish(rows, to_csv(rows, cfg.record_timing), cfg.output);
            }
            case Experiment::MGrid: {
                const auto rows = run_m_grid(cfg);
                return finish(rows, to_csv(rows), cfg.output);
            }
            case Experiment::TheoryOnly: {
                const auto rows = run_theory_only(cfg);
                return finish(rows, to_csv(rows), cfg.output);
            }
        }
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "modunfold: %s\n", e.what());
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "modunfold: %s\n", e.what());
        return kExitConfig;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "modunfold: %s\n", e.what());
        return 1;
    }
    return 0;
}
