#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "modunfold/adc.hpp"
#include "modunfold/baselines.hpp"
#include "modunfold/dsp.hpp"
#include "modunfold/error.hpp"
#include "modunfold/experiments.hpp"
#include "modunfold/signal.hpp"
#include "modunfold/theory.hpp"
#include "modunfold/unfold.hpp"

namespace py = pybind11;
using namespace modunfold;

namespace {

py::array_t<double> to_array(const std::vector<double>& v) {
    py::array_t<double> out(static_cast<py::ssize_t>(v.size()));
    std::copy(v.begin(), v.end(), out.mutable_data());
    return out;
}

std::vector<double> to_vector(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
    if (a.ndim() != 1) throw InvalidArgument("expected a 1-D array");
    return {a.data(), a.data() + a.size()};
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Modulo ADC with 1-bit folding information and sliding-DFT unfolding";

    py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_RuntimeError);
    py::register_exception<InfeasibleError>(m, "InfeasibleError", PyExc_RuntimeError);
    py::register_exception<OverloadError>(m, "OverloadError", PyExc_RuntimeError);
    py::register_exception<RecoveryError>(m, "RecoveryError", PyExc_RuntimeError);

    // dsp
    m.def("dft_normalized", [](const py::array_t<double, py::array::c_style | py::array::forcecast>& x) {
        const auto v = to_vector(x);
        const ComplexSpectrum s = dft_normalized(v);
        py::array_t<std::complex<double>> out(static_cast<py::ssize_t>(s.bins.size()));
        std::copy(s.bins.begin(), s.bins.end(), out.mutable_data());
        return out;
    }, py::arg("x"), "Unitary DFT X[k] = sum x[n] exp(-j 2 pi n k / N) / sqrt(N).");
    m.def("tukey_window", [](std::size_t n, double alpha) { return to_array(tukey_window(n, alpha).coefficients); },
          py::arg("n"), py::arg("alpha"));
    m.def("oob_bins", [](std::size_t n, double rho, double delta_sl) {
        return build_oob_system(n, rho, delta_sl).oob_bins;
    }, py::arg("n"), py::arg("rho"), py::arg("delta_sl"), "Out-of-band DFT bin indices.");

    // signal
    m.def("pulse_train_samples", [](std::size_t num_pulses, double of, std::uint64_t seed, double beta,
                                    std::size_t span) {
        PulseTrainSpec spec;
        spec.num_pulses = num_pulses;
        spec.beta = beta;
        spec.span = span;
        spec.seed = seed;
        const PulseTrain train = generate_pulse_train(spec);
        const SampledSignal s = sample_signal(train, of, static_cast<long>(support_samples(train, of)));
        return py::make_tuple(to_array(s.samples), estimate_inf_norm(train));
    }, py::arg("num_pulses"), py::arg("of"), py::arg("seed"), py::arg("beta") = 1.0, py::arg("span") = 20,
       "Sampled raised-cosine pulse train and its grid peak estimate.");

    // adc
    m.def("fold", &fold, py::arg("x"), py::arg("lambda_prime"));
    m.def("quantizer_range", &quantizer_range, py::arg("bits"), py::arg("lambda_prime"));
    m.def("triangle_dither", [](std::size_t count, int bits, double lambda, std::uint64_t seed) {
        return to_array(triangle_dither(count, bits, lambda, seed));
    }, py::arg("count"), py::arg("bits"), py::arg("lambda_"), py::arg("seed"));
    m.def("quantize_uniform", &quantize_uniform, py::arg("x"), py::arg("bits"), py::arg("lambda_"));

    m.def("acquire", [](const py::array_t<double, py::array::c_style | py::array::forcecast>& x, double of, int bits,
                        double lambda_prime, std::uint64_t seed, bool ideal) {
        SampledSignal s;
        s.samples = to_vector(x);
        s.rho = 1.0 / of;
        const AdcOutput a = acquire(s, AdcConfig{bits, lambda_prime, seed, ideal});
        std::vector<bool> c = a.folding_bits;
        py::dict d;
        d["quantized"] = to_array(a.quantized);
        d["folding_bits"] = py::array_t<bool>(py::cast(c));
        d["residue"] = to_array(a.residue_truth);
        return d;
    }, py::arg("samples"), py::arg("of"), py::arg("bits"), py::arg("lambda_prime"), py::arg("seed"),
       py::arg("ideal") = false, "Fold, dither and quantize; returns quantized samples, c[n] and the true residue.");

    // unfold
    m.def("unfold", [](const py::array_t<double, py::array::c_style | py::array::forcecast>& x, double of, int bits,
                       double lambda_prime, std::uint64_t seed, std::size_t n, double alpha, double delta_sl,
                       bool ideal) {
        SampledSignal s;
        s.samples = to_vector(x);
        s.rho = 1.0 / of;
        const AdcOutput a = acquire(s, AdcConfig{bits, lambda_prime, seed, ideal});
        RecoveryConfig rc;
        rc.n = n;
        rc.alpha = alpha;
        rc.delta_sl = delta_sl;
        rc.lambda_prime = lambda_prime;
        rc.rho = s.rho;
        const UnfoldResult r = unfold(a, s, rc);
        py::dict d;
        d["estimate"] = to_array(r.estimate);
        d["residue"] = to_array(r.residue);
        d["residue_truth"] = to_array(a.residue_truth);
        d["quantized"] = to_array(a.quantized);
        d["segments"] = r.segments;
        d["segments_skipped"] = r.segments_skipped;
        return d;
    }, py::arg("samples"), py::arg("of"), py::arg("bits"), py::arg("lambda_prime"), py::arg("seed"),
       py::arg("n") = 64, py::arg("alpha") = 0.5, py::arg("delta_sl") = 0.0, py::arg("ideal") = false,
       "Acquire with the modulo ADC and run the sliding-DFT recovery.");

    // baselines
    m.def("hod_recover", [](const py::array_t<double, py::array::c_style | py::array::forcecast>& q,
                            double lambda_prime, int order) {
        return to_array(hod_recover(to_vector(q), HodConfig{order, lambda_prime}));
    }, py::arg("quantized"), py::arg("lambda_prime"), py::arg("order") = 1);
    m.def("conventional_adc", [](const py::array_t<double, py::array::c_style | py::array::forcecast>& x, double of,
                                 int bits, double f_inf, std::uint64_t seed) {
        SampledSignal s;
        s.samples = to_vector(x);
        s.rho = 1.0 / of;
        return to_array(conventional_adc(s, bits, f_inf, seed));
    }, py::arg("samples"), py::arg("of"), py::arg("bits"), py::arg("f_inf"), py::arg("seed"));

    // theory
    m.def("spectral_leakage_bins", &spectral_leakage_bins, py::arg("delta_sl"), py::arg("n"));
    m.def("of_sufficient", &of_sufficient, py::arg("n"), py::arg("k_sl"));
    m.def("of_sufficient_general", &of_sufficient_general, py::arg("n"), py::arg("max_s"), py::arg("k_sl"));
    m.def("lambda_prime_required", &lambda_prime_required, py::arg("f_inf"), py::arg("of"), py::arg("k_sl"),
          py::arg("n"));
    m.def("b_sufficient", &b_sufficient, py::arg("m"));
    m.def("mse_guarantee", &mse_guarantee, py::arg("f_inf"), py::arg("of"), py::arg("bits"), py::arg("k_sl"),
          py::arg("delta_sl"), py::arg("n"));
    m.def("mse_conventional", &mse_conventional, py::arg("f_inf"), py::arg("of"), py::arg("bits"));
    m.def("estimate_m", &estimate_m, py::arg("n"), py::arg("of"), py::arg("delta_sl"), py::arg("s_size"),
          py::arg("trials"), py::arg("seed"), py::arg("threads") = 1,
          py::call_guard<py::gil_scoped_release>());
    m.def("complexity_estimate", [](std::size_t n0, std::size_t n, double alpha, double rho) {
        const ComplexityEstimate e = complexity_estimate(n0, n, alpha, rho);
        py::dict d;
        d["segments"] = e.segments;
        d["per_segment_flops"] = e.per_segment_flops;
        d["total_order"] = e.total_order;
        d["whole_signal_order"] = e.whole_signal_order;
        d["time_fraction"] = e.time_fraction;
        d["speedup"] = e.speedup;
        return d;
    }, py::arg("n0"), py::arg("n"), py::arg("alpha"), py::arg("rho"));
    m.def("to_db", &to_db);

    // experiments
    m.def("run_experiment", [](const std::string& command, const std::string& config_json, std::uint64_t seed) {
        const auto exp = parse_experiment(command);
        if (!exp) throw ConfigError("unknown experiment " + command);
        ExperimentConfig cfg = config_from_json(config_json, default_config(*exp));
        cfg.experiment = *exp;
        cfg.seed = seed;
        cfg.validate();
        py::gil_scoped_release release;
        switch (*exp) {
            case Experiment::MseSweep: return format_csv(to_csv(run_mse_sweep(cfg), false));
            case Experiment::CompareHod: return format_csv(to_csv(run_compare_hod(cfg), false));
            case Experiment::MGrid: return format_csv(to_csv(run_m_grid(cfg)));
            case Experiment::TheoryOnly: return format_csv(to_csv(run_theory_only(cfg)));
        }
        return std::string();
    }, py::arg("command"), py::arg("config_json") = "{}", py::arg("seed") = 0,
       "Run one experiment and return its CSV text.");
}
