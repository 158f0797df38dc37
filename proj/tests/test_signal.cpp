#include "doctest.h"

#include <cmath>
#include <numbers>

#include "modunfold/dsp.hpp"
#include "modunfold/error.hpp"
#include "modunfold/signal.hpp"

using namespace modunfold;
using std::numbers::pi;

TEST_SUITE("raised_cosine") {
    TEST_CASE("unit peak and zero crossings") {
        CHECK(raised_cosine_value(0.0, 1.0, 1.0) == 1.0);
        for (int k : {-5, -3, -1, 1, 2, 4, 7}) {
            CHECK(std::abs(raised_cosine_value(k, 1.0, 1.0)) < 1e-15);
            CHECK(std::abs(raised_cosine_value(k * 2.0, 0.35, 2.0)) < 1e-15);
        }
    }

    TEST_CASE("removable singularity matches the two-sided numeric limit") {
        for (double beta : {1.0, 0.5, 0.25}) {
            const double t = 1.0 / (2.0 * beta);
            const double lim = 0.5 * (raised_cosine_value(t - 1e-6, beta, 1.0) + raised_cosine_value(t + 1e-6, beta, 1.0));
            CHECK(std::abs(raised_cosine_value(t, beta, 1.0) - lim) < 1e-6);
            CHECK(std::abs(raised_cosine_value(-t, beta, 1.0) - lim) < 1e-6);
        }
        CHECK(std::abs(raised_cosine_value(0.5, 1.0, 1.0) - pi / 4 * std::sin(pi / 2) / (pi / 2)) < 1e-15);
    }
}

TEST_SUITE("pulse_train") {
    TEST_CASE("single pinned pulse") {
        PulseTrainSpec spec;
        spec.num_pulses = 1;
        const PulseTrain train(spec, {1.0});
        CHECK(train(1.0) == 1.0);
        CHECK(std::abs(train(2.0)) < 1e-15);
        CHECK(train(1.0 + 10.5) == 0.0);  // outside the span window

        const auto s = sample_signal(train, 4.0, 40);
        CHECK(s.sample_period_ts == doctest::Approx(1.0 / 8.0));
        CHECK(s.samples[8] == 1.0);
        CHECK(std::abs(estimate_inf_norm(train) - 1.0) < 1e-4);
    }

    TEST_CASE("two separated pulses") {
        PulseTrainSpec spec;
        const PulseTrain train(spec, {0.7, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 0, -0.5});
        CHECK(std::abs(estimate_inf_norm(train) - 0.7) < 1e-4);
    }

    TEST_CASE("defaults and determinism") {
        PulseTrainSpec spec;
        spec.seed = 17;
        const auto a = generate_pulse_train(spec);
        const auto b = generate_pulse_train(spec);
        CHECK(a.amplitudes().size() == 2000);
        CHECK(std::equal(a.amplitudes().begin(), a.amplitudes().end(), b.amplitudes().begin()));
        for (double v : a.amplitudes()) CHECK((v >= -0.5 && v <= 1.0));
        CHECK(a.omega_m() == doctest::Approx(4 * pi));
        spec.seed = 18;
        CHECK(generate_pulse_train(spec).amplitudes()[0] != a.amplitudes()[0]);

        const auto sa = sample_signal(a, 6.0, 5000);
        const auto sb = sample_signal(b, 6.0, 5000);
        CHECK(sa.samples == sb.samples);
    }

    TEST_CASE("sampling geometry") {
        PulseTrainSpec spec;
        spec.num_pulses = 10;
        const auto t = generate_pulse_train(spec);
        const auto s = sample_signal(t, 1.0, 10);
        CHECK(s.rho == 1.0);
        CHECK(s.sample_period_ts == doctest::Approx(0.5));
        CHECK(sample_signal(t, 8.0, 10).sample_period_ts == doctest::Approx(1.0 / 16.0));
        CHECK_THROWS_AS(sample_signal(t, 8.0, 0), InvalidArgument);
        CHECK_THROWS_AS(sample_signal(t, 0.5, 10), InvalidArgument);
        // support covers (M + span) T
        const std::size_t n0 = support_samples(t, 4.0);
        CHECK(static_cast<double>(n0 - 1) * 0.125 <= t.support_end());
        CHECK(static_cast<double>(n0) * 0.125 > t.support_end());
    }

    TEST_CASE("grid peak is monotone under grid refinement") {
        PulseTrainSpec spec;
        spec.num_pulses = 300;
        spec.seed = 4;
        const auto t = generate_pulse_train(spec);
        CHECK(estimate_inf_norm(t, 64) >= estimate_inf_norm(t, 8));
        CHECK(estimate_inf_norm(t, 128) >= estimate_inf_norm(t, 64));
        CHECK_THROWS_AS(estimate_inf_norm(t, 4), InvalidArgument);
    }

    TEST_CASE("spec validation") {
        PulseTrainSpec s;
        s.beta = 1.5;
        CHECK_THROWS_AS(s.validate(), InvalidArgument);
        s = PulseTrainSpec{};
        s.span = 7;
        CHECK_THROWS_AS(s.validate(), InvalidArgument);
        s = PulseTrainSpec{};
        s.amp_low = 2.0;
        CHECK_THROWS_AS(s.validate(), InvalidArgument);
    }

    TEST_CASE("sampled train is bandlimited") {
        PulseTrainSpec spec;
        spec.num_pulses = 400;
        spec.seed = 2;
        const auto train = generate_pulse_train(spec);
        const double of = 8.0;
        const auto s = sample_signal(train, of, static_cast<long>(support_samples(train, of)));
        const std::size_t n = 256;
        const auto w = tukey_window(n, 0.5);
        const double edge = pi / of + pi / 16;
        double in_band = 0.0, out_band = 0.0;
        for (std::size_t start = 0; start + n <= s.size(); start += w.hop()) {
            std::vector<double> seg(n);
            for (std::size_t i = 0; i < n; ++i) seg[i] = w.coefficients[i] * s.samples[start + i];
            const auto spec_seg = dft_normalized(seg);
            for (std::size_t k = 0; k < n; ++k) {
                const double om = 2 * pi * static_cast<double>(std::min(k, n - k)) / static_cast<double>(n);
                (om > edge ? out_band : in_band) += std::norm(spec_seg.bins[k]);
            }
        }
        CHECK(10 * std::log10(out_band / in_band) <= -60.0);
    }
}
