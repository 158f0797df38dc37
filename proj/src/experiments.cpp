#include "modunfold/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"
#include "modunfold/adc.hpp"
#include "modunfold/baselines.hpp"
#include "modunfold/error.hpp"
#include "modunfold/theory.hpp"
#include "modunfold/unfold.hpp"

namespace modunfold {

namespace {

constexpr double kPi = std::numbers::pi;

using Json = nlohmann::json;

// Runs body(i) for i in [0, count) on up to `threads` workers.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body) {
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(count, 1)));
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < threads; ++w)
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) body(i);
        });
}

double mean_squared_error(std::span<const double> estimate, std::span<const double> truth) {
    double acc = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const double e = estimate[i] - truth[i];
        acc += e * e;
    }
    return acc / static_cast<double>(truth.size());
}

void require(bool ok, const std::string& msg) {
    if (!ok) throw ConfigError(msg);
}

double parse_angle(const Json& v, const std::string& key) {
    if (v.is_number()) return v.get<double>();
    if (v.is_string()) {
        std::string s = v.get<std::string>();
        s.erase(std::remove(s.begin(), s.end(), ' '), s.end());
        if (s == "0") return 0.0;
        if (s == "pi") return kPi;
        if (s.rfind("pi/", 0) == 0) {
            try {
                std::size_t used = 0;
                const double d = std::stod(s.substr(3), &used);
                if (used == s.size() - 3 && d > 0.0) return kPi / d;
            } catch (const std::exception&) {
            }
        }
    }
    throw ConfigError("config: " + key + " entries must be numbers (rad) or strings like \"pi/32\"");
}

template <typename T>
std::vector<T> get_list(const Json& j, const std::string& key) {
    const Json& v = j.at(key);
    if (!v.is_array()) throw ConfigError("config: " + key + " must be an array");
    std::vector<T> out;
    for (const Json& e : v) {
        if (!e.is_number()) throw ConfigError("config: " + key + " must contain numbers");
        if constexpr (std::is_integral_v<T>) {
            const double d = e.get<double>();
            if (d != std::floor(d) || d < 0) throw ConfigError("config: " + key + " must contain non-negative integers");
        }
        out.push_back(e.get<T>());
    }
    return out;
}

template <typename T>
T get_scalar(const Json& j, const std::string& key) {
    const Json& v = j.at(key);
    if constexpr (std::is_same_v<T, bool>) {
        if (!v.is_boolean()) throw ConfigError("config: " + key + " must be a boolean");
    } else if constexpr (std::is_same_v<T, std::string>) {
        if (!v.is_string()) throw ConfigError("config: " + key + " must be a string");
    } else {
        if (!v.is_number()) throw ConfigError("config: " + key + " must be a number");
        if constexpr (std::is_integral_v<T>) {
            if (!v.is_number_integer() || (std::is_unsigned_v<T> && !v.is_number_unsigned()))
                throw ConfigError("config: " + key + " must be an integer" +
                                  (std::is_unsigned_v<T> ? " >= 0" : ""));
        }
    }
    return v.get<T>();
}

struct Point {
    double of;
    int bits;
    double delta_sl;
};

std::vector<Point> sweep_points(const ExperimentConfig& cfg) {
    std::vector<Point> pts;
    for (double d : cfg.delta_sl)
        for (int b : cfg.bits)
            for (double of : cfg.oversampling) pts.push_back({of, b, d});
    return pts;
}

ResultRow base_row(const ExperimentConfig& cfg, const Point& p, std::uint64_t seed) {
    ResultRow r;
    r.experiment = experiment_name(cfg.experiment);
    r.of = p.of;
    r.bits = p.bits;
    r.delta_sl = p.delta_sl;
    r.k_sl = spectral_leakage_bins(p.delta_sl, cfg.n);
    r.seed = seed;
    return r;
}

void mark_skipped(ResultRow& r, const std::string& why) {
    r.status = "skipped";
    r.reason = why;
    r.mse_simulated_db.reset();
    r.mse_conventional_db.reset();
    r.mse_hod_db.reset();
    r.residue_errors = 0;
    r.samples_used = 0;
}

// One grid point of either simulation experiment.
ResultRow simulate_point(const ExperimentConfig& cfg, const SignalContext& ctx, const Point& p, std::size_t index,
                         bool with_conventional, bool with_hod) {
    const auto t0 = std::chrono::steady_clock::now();
    const std::uint64_t point_seed = derive_seed(cfg.seed, 1, index);
    ResultRow r = base_row(cfg, p, point_seed);
    try {
        r.mse_conventional_theory_db = to_db(mse_conventional(ctx.f_inf, p.of, p.bits));
        r.lambda_prime = lambda_prime_required(ctx.f_inf, p.of, r.k_sl, cfg.n);
        r.mse_theory_db = to_db(mse_guarantee(ctx.f_inf, p.of, p.bits, r.k_sl, p.delta_sl, cfg.n));

        const SampledSignal sig = sample_signal(ctx.train, p.of, static_cast<long>(support_samples(ctx.train, p.of)));
        const AdcConfig adc_cfg{p.bits, r.lambda_prime, derive_seed(point_seed, 0), false};
        const AdcOutput adc = acquire(sig, adc_cfg);

        RecoveryConfig rc;
        rc.n = cfg.n;
        rc.alpha = cfg.alpha;
        rc.delta_sl = p.delta_sl;
        rc.lambda_prime = r.lambda_prime;
        rc.rho = sig.rho;
        const UnfoldResult res = unfold(adc, sig, rc);

        r.samples_used = sig.size();
        r.mse_simulated_db = to_db(mean_squared_error(res.estimate, sig.samples));
        for (std::size_t i = 0; i < sig.size(); ++i)
            if (res.residue[i] != adc.residue_truth[i]) ++r.residue_errors;

        if (with_conventional) {
            const RealVector conv = conventional_adc(sig, p.bits, ctx.f_inf, derive_seed(point_seed, 1));
            r.mse_conventional_db = to_db(mean_squared_error(conv, sig.samples));
        }
        if (with_hod) {
            const RealVector hod = hod_recover(adc.quantized, HodConfig{cfg.hod_order, r.lambda_prime});
            const RealVector smooth = filter_zero_delay(hod, recovery_lowpass(sig.rho, p.delta_sl));
            r.mse_hod_db = to_db(mean_squared_error(smooth, sig.samples));
        }
    } catch (const InfeasibleError& e) {
        mark_skipped(r, e.what());
    } catch (const RecoveryError& e) {
        mark_skipped(r, e.what());
    } catch (const OverloadError& e) {
        mark_skipped(r, e.what());
    } catch (const ConfigError& e) {
        mark_skipped(r, e.what());
    }
    r.wall_time_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

std::vector<ResultRow> run_simulation(const ExperimentConfig& cfg, bool with_conventional, bool with_hod) {
    cfg.validate();
    const SignalContext ctx = make_signal_context(cfg);
    const std::vector<Point> pts = sweep_points(cfg);
    std::vector<ResultRow> rows(pts.size());
    parallel_for(pts.size(), cfg.threads, [&](std::size_t i) {
        rows[i] = simulate_point(cfg, ctx, pts[i], i, with_conventional, with_hod);
    });
    return rows;
}

std::string opt(const std::optional<double>& v) { return v ? format_number(*v) : std::string(); }

std::string quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

}  // namespace

std::optional<Experiment> parse_experiment(const std::string& name) {
    if (name == "mse-sweep") return Experiment::MseSweep;
    if (name == "compare-hod") return Experiment::CompareHod;
    if (name == "m-grid") return Experiment::MGrid;
    if (name == "theory-only") return Experiment::TheoryOnly;
    return std::nullopt;
}

std::string experiment_name(Experiment e) {
    switch (e) {
        case Experiment::MseSweep: return "mse-sweep";
        case Experiment::CompareHod: return "compare-hod";
        case Experiment::MGrid: return "m-grid";
        case Experiment::TheoryOnly: return "theory-only";
    }
    return "unknown";
}

void ExperimentConfig::validate() const {
    try {
        signal.validate();
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config: signal: ") + e.what());
    }
    require(!bits.empty(), "config: bits must be nonempty");
    require(!oversampling.empty(), "config: of must be nonempty");
    require(!delta_sl.empty(), "config: delta_sl must be nonempty");
    for (int b : bits) require(b >= 2 && b <= 30, "config: bits entries must lie in [2, 30]");
    for (double of : oversampling)
        require(std::isfinite(of) && of > 1.0, "config: of entries must be finite and > 1");
    for (double d : delta_sl)
        require(std::isfinite(d) && d >= 0.0 && d < kPi, "config: delta_sl entries must lie in [0, pi)");
    require(n >= 4, "config: n must be >= 4");
    require(alpha >= 0.0 && alpha <= 1.0, "config: alpha must lie in [0, 1]");
    const double taper = alpha * static_cast<double>(n);
    require(std::abs(taper - std::round(taper)) < 1e-9 && static_cast<long>(std::round(taper)) % 2 == 0,
            "config: alpha * n must be an even integer");
    require(hod_order >= 1, "config: hod_order must be >= 1");
    require(!grid_n.empty() && !grid_of.empty() && !grid_s_divisors.empty(), "config: m_grid axes must be nonempty");
    for (std::size_t v : grid_n) require(v >= 4, "config: m_grid.n entries must be >= 4");
    for (double v : grid_of) require(std::isfinite(v) && v > 1.0, "config: m_grid.of entries must be > 1");
    for (std::size_t v : grid_s_divisors) require(v >= 1, "config: m_grid.s_divisors entries must be >= 1");
    require(theory_s_divisor >= 1, "config: theory_s_divisor must be >= 1");
}

ExperimentConfig default_config(Experiment e, Preset preset) {
    ExperimentConfig c;
    c.experiment = e;
    c.delta_sl = {kPi / 32.0, kPi / 16.0};
    if (e == Experiment::CompareHod) {
        c.bits = {3, 4, 5};
        c.oversampling = {4, 6, 8, 10, 12, 15, 20};
        c.delta_sl = {kPi / 32.0};
    }
    if (preset == Preset::Paper) {
        c.signal.num_pulses = 50000;
        c.trials = 100000;
    }
    return c;
}

ExperimentConfig config_from_json(const std::string& json_text, ExperimentConfig c) {
    Json j;
    try {
        j = Json::parse(json_text);
    } catch (const Json::parse_error& e) {
        throw ConfigError(std::string("config: invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config: top level must be an object");
    static const std::vector<std::string> known{"experiment", "signal", "bits", "of", "n", "alpha", "delta_sl",
                                                "trials", "hod_order", "m_grid", "theory_s_divisor", "seed",
                                                "threads", "output", "timing"};
    for (const auto& [key, _] : j.items())
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw ConfigError("config: unknown key \"" + key + "\"");

    try {
        if (j.contains("experiment")) {
            const auto e = parse_experiment(get_scalar<std::string>(j, "experiment"));
            if (!e) throw ConfigError("config: unknown experiment \"" + j["experiment"].get<std::string>() + "\"");
            c.experiment = *e;
        }
        if (j.contains("signal")) {
            const Json& s = j["signal"];
            if (!s.is_object()) throw ConfigError("config: signal must be an object");
            for (const auto& [key, _] : s.items()) {
                if (key == "num_pulses") c.signal.num_pulses = get_scalar<std::size_t>(s, key);
                else if (key == "beta") c.signal.beta = get_scalar<double>(s, key);
                else if (key == "span") c.signal.span = get_scalar<std::size_t>(s, key);
                else if (key == "symbol_period") c.signal.symbol_period_t = get_scalar<double>(s, key);
                else if (key == "amp_low") c.signal.amp_low = get_scalar<double>(s, key);
                else if (key == "amp_high") c.signal.amp_high = get_scalar<double>(s, key);
                else throw ConfigError("config: unknown key \"signal." + key + "\"");
            }
        }
        if (j.contains("bits")) c.bits = get_list<int>(j, "bits");
        if (j.contains("of")) c.oversampling = get_list<double>(j, "of");
        if (j.contains("n")) c.n = get_scalar<std::size_t>(j, "n");
        if (j.contains("alpha")) c.alpha = get_scalar<double>(j, "alpha");
        if (j.contains("delta_sl")) {
            const Json& v = j["delta_sl"];
            if (!v.is_array()) throw ConfigError("config: delta_sl must be an array");
            c.delta_sl.clear();
            for (const Json& e : v) c.delta_sl.push_back(parse_angle(e, "delta_sl"));
        }
        if (j.contains("trials")) c.trials = get_scalar<std::size_t>(j, "trials");
        if (j.contains("hod_order")) c.hod_order = get_scalar<int>(j, "hod_order");
        if (j.contains("theory_s_divisor")) c.theory_s_divisor = get_scalar<std::size_t>(j, "theory_s_divisor");
        if (j.contains("m_grid")) {
            const Json& g = j["m_grid"];
            if (!g.is_object()) throw ConfigError("config: m_grid must be an object");
            for (const auto& [key, _] : g.items()) {
                if (key == "n") c.grid_n = get_list<std::size_t>(g, key);
                else if (key == "of") c.grid_of = get_list<double>(g, key);
                else if (key == "s_divisors") c.grid_s_divisors = get_list<std::size_t>(g, key);
                else throw ConfigError("config: unknown key \"m_grid." + key + "\"");
            }
        }
        if (j.contains("seed")) c.seed = get_scalar<std::uint64_t>(j, "seed");
        if (j.contains("threads")) c.threads = get_scalar<unsigned>(j, "threads");
        if (j.contains("output")) c.output = get_scalar<std::string>(j, "output");
        if (j.contains("timing")) c.record_timing = get_scalar<bool>(j, "timing");
    } catch (const Json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return c;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    auto mix = [](std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    };
    return mix(mix(mix(seed) ^ a) ^ (b * 0xd1b54a32d192ed03ULL + 1));
}

SignalContext make_signal_context(const ExperimentConfig& cfg) {
    PulseTrainSpec spec = cfg.signal;
    spec.seed = derive_seed(cfg.seed, 0);
    PulseTrain train = generate_pulse_train(spec);
    const double peak = estimate_inf_norm(train);
    if (!(peak > 0.0)) throw ConfigError("config: signal is identically zero");
    return SignalContext{std::move(train), peak * (1.0 + kInfNormSafetyMargin)};
}

std::vector<ResultRow> run_mse_sweep(const ExperimentConfig& cfg) { return run_simulation(cfg, true, false); }

std::vector<ResultRow> run_compare_hod(const ExperimentConfig& cfg) { return run_simulation(cfg, false, true); }

std::vector<MGridRow> run_m_grid(const ExperimentConfig& cfg) {
    cfg.validate();
    std::vector<MGridRow> rows;
    for (std::size_t n : cfg.grid_n)
        for (double of : cfg.grid_of)
            for (std::size_t div : cfg.grid_s_divisors) {
                MGridRow r;
                r.n = n;
                r.of = of;
                r.s_size = n / div;
                rows.push_back(r);
            }
    // delta_sl for the grid: first configured value
    const double delta = cfg.delta_sl.front();
    parallel_for(rows.size(), cfg.threads, [&](std::size_t i) {
        MGridRow& r = rows[i];
        r.seed = derive_seed(cfg.seed, 2, i);
        try {
            const double m = estimate_m(r.n, r.of, delta, r.s_size, cfg.trials, r.seed, 1);
            if (!std::isfinite(m)) throw InfeasibleError("estimate_m: rank-deficient fold set drawn");
            r.m_tilde = m;
            r.b_extra = std::log2(1.0 + 0.75 * m);
        } catch (const InfeasibleError& e) {
            r.status = "skipped";
            r.reason = e.what();
        } catch (const ConfigError& e) {
            r.status = "skipped";
            r.reason = e.what();
        }
    });
    return rows;
}

std::vector<TheoryRow> run_theory_only(const ExperimentConfig& cfg) {
    cfg.validate();
    const SignalContext ctx = make_signal_context(cfg);
    const std::vector<Point> pts = sweep_points(cfg);
    std::vector<TheoryRow> rows(pts.size());
    parallel_for(pts.size(), cfg.threads, [&](std::size_t i) {
        const Point& p = pts[i];
        TheoryRow& r = rows[i];
        r.of = p.of;
        r.bits = p.bits;
        r.delta_sl = p.delta_sl;
        r.s_size = cfg.n / cfg.theory_s_divisor;
        try {
            const double m = estimate_m(cfg.n, p.of, p.delta_sl, r.s_size, cfg.trials, derive_seed(cfg.seed, 3, i), 1);
            const TheoryReport t = theory_report(ctx.f_inf, p.of, p.bits, p.delta_sl, cfg.n, m);
            if (!t.of_sufficient)
                throw InfeasibleError("OF = " + format_number(p.of) + " is below the full-rank bound " +
                                      format_number(t.of_required));
            r.k_sl = t.k_sl;
            r.lambda_prime = t.lambda_prime;
            r.lambda = t.lambda;
            r.of_required = t.of_required;
            r.of_sufficient = t.of_sufficient;
            r.m_tilde = t.m_tilde;
            r.b_required = t.b_required;
            r.b_sufficient = t.b_sufficient;
            r.mse_modulo_db = t.mse_modulo_db;
            r.mse_conventional_db = t.mse_conventional_db;
        } catch (const InfeasibleError& e) {
            r.status = "skipped";
            r.reason = e.what();
        } catch (const ConfigError& e) {
            r.status = "skipped";
            r.reason = e.what();
        }
    });
    return rows;
}

std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

CsvTable to_csv(const std::vector<ResultRow>& rows, bool include_timing) {
    CsvTable t;
    t.header = {"experiment", "of", "b", "delta_sl", "k_sl", "lambda_prime", "mse_simulated_db", "mse_theory_db",
                "mse_conventional_db", "mse_conventional_theory_db", "mse_hod_db", "samples_used", "residue_errors",
                "wall_time_ms", "seed", "status", "reason"};
    for (const ResultRow& r : rows) {
        t.rows.push_back({r.experiment, format_number(r.of), std::to_string(r.bits), format_number(r.delta_sl),
                          std::to_string(r.k_sl), format_number(r.lambda_prime), opt(r.mse_simulated_db),
                          opt(r.mse_theory_db), opt(r.mse_conventional_db), opt(r.mse_conventional_theory_db),
                          opt(r.mse_hod_db), std::to_string(r.samples_used), std::to_string(r.residue_errors),
                          include_timing ? format_number(r.wall_time_ms) : std::string(), std::to_string(r.seed),
                          r.status, r.reason});
    }
    return t;
}

CsvTable to_csv(const std::vector<MGridRow>& rows) {
    CsvTable t;
    t.header = {"n", "of", "s_size", "m_tilde", "b_extra", "seed", "status", "reason"};
    for (const MGridRow& r : rows)
        t.rows.push_back({std::to_string(r.n), format_number(r.of), std::to_string(r.s_size), opt(r.m_tilde),
                          opt(r.b_extra), std::to_string(r.seed), r.status, r.reason});
    return t;
}

CsvTable to_csv(const std::vector<TheoryRow>& rows) {
    CsvTable t;
    t.header = {"of", "b", "delta_sl", "k_sl", "s_size", "lambda_prime", "lambda", "of_required", "m_tilde",
                "b_required", "b_sufficient", "mse_modulo_db", "mse_conventional_db", "status", "reason"};
    for (const TheoryRow& r : rows) {
        const bool ok = r.ok();
        auto num = [&](double v) { return ok ? format_number(v) : std::string(); };
        t.rows.push_back({format_number(r.of), std::to_string(r.bits), format_number(r.delta_sl),
                          ok ? std::to_string(r.k_sl) : std::string(), std::to_string(r.s_size), num(r.lambda_prime),
                          num(r.lambda), num(r.of_required), num(r.m_tilde), num(r.b_required),
                          ok ? (r.b_sufficient ? "1" : "0") : std::string(), num(r.mse_modulo_db),
                          num(r.mse_conventional_db), r.status, r.reason});
    }
    return t;
}

std::string format_csv(const CsvTable& table) {
    std::string out;
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out += ',';
            out += quote(cells[i]);
        }
        out += '\n';
    };
    line(table.header);
    for (const auto& r : table.rows) line(r);
    return out;
}

void emit_csv(const CsvTable& table, const std::string& path) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("emit_csv: cannot open " + path + " for writing");
    const std::string text = format_csv(table);
    f.write(text.data(), static_cast<std::streamsize>(text.size()));
    f.close();
    if (!f) throw std::runtime_error("emit_csv: write to " + path + " failed");
}

CsvTable parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> lines;
    std::vector<std::string> cur;
    std::string cell;
    bool quoted = false, any = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        any = true;
        if (quoted) {
            if (c == '"' && i + 1 < text.size() && text[i + 1] == '"') {
                cell += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cell += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            cur.push_back(std::move(cell));
            cell.clear();
        } else if (c == '\n') {
            cur.push_back(std::move(cell));
            cell.clear();
            lines.push_back(std::move(cur));
            cur.clear();
            any = false;
        } else {
            cell += c;
        }
    }
    if (any) {
        cur.push_back(std::move(cell));
        lines.push_back(std::move(cur));
    }
    CsvTable t;
    if (lines.empty()) return t;
    t.header = std::move(lines.front());
    t.rows.assign(std::make_move_iterator(lines.begin() + 1), std::make_move_iterator(lines.end()));
    return t;
}

}  // namespace modunfold
