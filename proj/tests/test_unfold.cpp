#include "doctest.h"

#include <cmath>
#include <numbers>
#include <algorithm>
#include <numeric>
#include <random>

#include "modunfold/adc.hpp"
#include "modunfold/error.hpp"
#include "modunfold/signal.hpp"
#include "modunfold/theory.hpp"
#include "modunfold/unfold.hpp"

using namespace modunfold;
using std::numbers::pi;

namespace {

struct Setup {
    SampledSignal signal;
    double f_inf;
    double lambda_prime;
    int k_sl;
};

Setup pulse_signal(std::size_t pulses, double of, double delta, std::uint64_t seed) {
    PulseTrainSpec spec;
    spec.num_pulses = pulses;
    spec.seed = seed;
    const auto train = generate_pulse_train(spec);
    Setup s{sample_signal(train, of, static_cast<long>(support_samples(train, of))), 0, 0, 0};
    s.f_inf = estimate_inf_norm(train) * (1 + kInfNormSafetyMargin);
    s.k_sl = spectral_leakage_bins(delta, 64);
    s.lambda_prime = lambda_prime_required(s.f_inf, of, s.k_sl, 64);
    return s;
}

RecoveryConfig recovery_for(const Setup& s, double delta) {
    RecoveryConfig rc;
    rc.delta_sl = delta;
    rc.lambda_prime = s.lambda_prime;
    rc.rho = s.signal.rho;
    return rc;
}

}  // namespace

TEST_SUITE("segmentation") {
    TEST_CASE("segment starts") {
        const auto s = segment_starts(160, 64, 0.5);
        REQUIRE(s.size() == 4);
        CHECK(s[0].start == 0);
        CHECK(s[1].start == 48);
        CHECK(s[2].start == 96);
        CHECK(s[3].start == 144);
        CHECK_FALSE(s[2].padded(64));
        CHECK(s[3].padded(64));
        CHECK(s[3].valid == 16);
        // the committed regions [start, start + hop) cover the record
        const auto t = segment_starts(64, 64, 0.5);
        CHECK(t.back().start + 48 >= 64);
        CHECK_THROWS_AS(segment_starts(32, 64, 0.5), InvalidArgument);
    }

    TEST_CASE("windowed first difference") {
        const auto w = tukey_window(64, 0.5);
        const std::vector<double> flat(64, 0.7);
        for (double v : windowed_first_difference(flat, 0.7, w)) CHECK(v == 0.0);

        std::vector<double> step(64, 0.0);
        for (std::size_t i = 20; i < 64; ++i) step[i] = 1.0;
        const auto d = windowed_first_difference(step, 0.0, w);
        for (std::size_t i = 0; i < 64; ++i) CHECK(d[i] == (i == 20 ? 1.0 : 0.0));

        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> u(-1, 1);
        std::vector<double> x(64);
        for (double& v : x) v = u(rng);
        const auto y = windowed_first_difference(x, 0.25, w);
        for (std::size_t i = 0; i < 64; ++i)
            CHECK(y[i] == w.coefficients[i] * (x[i] - (i == 0 ? 0.25 : x[i - 1])));
    }

    TEST_CASE("scaling correction") {
        const auto w = tukey_window(64, 0.5);
        SegmentCarry carry(16);
        // first segment, fold in the flat part: passthrough
        std::vector<double> cur(64, 0.0);
        cur[30] = 2.0;
        auto out = scaling_correction(cur, carry, 0.5);
        REQUIRE(out.size() == 48);
        CHECK(out[30] == 2.0);

        // fold inside the overlap at position p of the current segment
        const double jump = -1.4;
        for (std::size_t p = 0; p < 16; ++p) {
            SegmentCarry c(16);
            std::vector<double> prev(64, 0.0), now(64, 0.0);
            prev[p + 48] = w.coefficients[p + 48] * jump;
            now[p] = w.coefficients[p] * jump;
            scaling_correction(prev, c, 0.5);
            const auto r = scaling_correction(now, c, 0.5);
            CHECK(std::abs(r[p] - jump) < 1e-12);
        }

        // piecewise formula on random data
        std::mt19937_64 rng(5);
        std::uniform_real_distribution<double> u(-1, 1);
        std::vector<double> a(64), b(64);
        for (std::size_t i = 0; i < 64; ++i) {
            a[i] = u(rng);
            b[i] = u(rng);
        }
        SegmentCarry c(16);
        scaling_correction(a, c, 0.5);
        const auto r = scaling_correction(b, c, 0.5);
        for (std::size_t i = 0; i < 48; ++i) CHECK(r[i] == (i < 16 ? b[i] + a[i + 48] : b[i]));
        for (std::size_t i = 0; i < 16; ++i) CHECK(c.prev_windowed_tail[i] == b[48 + i]);

        SegmentCarry bad(3);
        CHECK_THROWS_AS(scaling_correction(a, bad, 0.5), InvalidArgument);
    }

    TEST_CASE("lattice rounding") {
        const double lp = 0.3;
        const auto r = round_to_lattice(std::vector<double>{0.9 * 2 * lp, 0.0, -2.4 * 2 * lp, 0.5 * 2 * lp, -0.5 * 2 * lp}, lp);
        CHECK(r[0] == doctest::Approx(2 * lp));
        CHECK(r[1] == 0.0);
        CHECK(r[2] == doctest::Approx(-4 * lp));
        CHECK(r[3] == doctest::Approx(2 * lp));
        CHECK(r[4] == doctest::Approx(-2 * lp));
    }
}

TEST_SUITE("pre_estimate") {
    TEST_CASE("empty fold set skips the solve") {
        const auto sys = build_oob_system(64, 0.25, pi / 32);
        const auto r = residue_pre_estimate(std::vector<double>(64, 1.0), {}, sys);
        for (double v : r.windowed) CHECK(v == 0.0);
    }

    TEST_CASE("recovers windowed jumps with an in-band component present") {
        const auto sys = build_oob_system(64, 0.25, pi / 32);
        const auto w = tukey_window(64, 0.5);
        const double lp = 0.57;
        std::mt19937_64 rng(8);
        for (int trial = 0; trial < 30; ++trial) {
            IndexList s;
            std::vector<double> dz(64, 0.0);
            std::uniform_int_distribution<std::size_t> pos(0, 63);
            std::uniform_int_distribution<int> k(-2, 2);
            while (s.size() < 4) {
                const std::size_t p = pos(rng);
                if (std::find(s.begin(), s.end(), p) != s.end()) continue;
                int m = k(rng);
                if (m == 0) m = 1;
                s.push_back(p);
                dz[p] = 2 * lp * m;
            }
            std::sort(s.begin(), s.end());
            // in-band part with no energy in the OOB bins
            std::vector<double> diffed(64);
            for (std::size_t i = 0; i < 64; ++i) {
                double g = 0.0;
                for (int b = 0; b <= 8; ++b) g += 0.1 * (b + 1) * std::cos(2 * pi * b * static_cast<double>(i) / 64.0 + b);
                diffed[i] = w.coefficients[i] * dz[i] + g;
            }
            const auto r = residue_pre_estimate(diffed, s, sys);
            for (std::size_t i = 0; i < 64; ++i) CHECK(std::abs(r.windowed[i] - w.coefficients[i] * dz[i]) < 1e-6 * lp);
            CHECK(r.max_imag < 1e-8 * lp);
        }
    }

    TEST_CASE("too many folds") {
        const auto sys = build_oob_system(16, 0.5, 0.0);
        IndexList s(sys.k() + 1);
        std::iota(s.begin(), s.end(), 0);
        CHECK_THROWS_AS(residue_pre_estimate(std::vector<double>(16, 0.0), s, sys), RecoveryError);
    }
}

TEST_SUITE("unfold") {
    TEST_CASE("noiseless recovery is exact and stays on the lattice") {
        const double delta = pi / 32;
        for (std::uint64_t seed = 1; seed <= 10; ++seed) {
            const auto s = pulse_signal(300, 4.0, delta, seed);
            const auto adc = acquire(s.signal, AdcConfig{4, s.lambda_prime, seed, true});
            const auto res = unfold(adc, s.signal, recovery_for(s, delta));
            CHECK(res.residue == adc.residue_truth);
            for (double z : res.residue) {
                const double k = z / (2 * s.lambda_prime);
                CHECK(std::abs(k - std::round(k)) < 1e-9);
            }
        }
    }

    TEST_CASE("no folds at b = 16 reaches the quantization floor") {
        PulseTrainSpec spec;
        spec.num_pulses = 300;
        spec.seed = 3;
        const auto train = generate_pulse_train(spec);
        const double of = 8.0;
        auto sig = sample_signal(train, of, static_cast<long>(support_samples(train, of)));
        // A tiny signal keeps the pulse truncation error far below the floor.
        for (double& v : sig.samples) v *= 1e-3;
        const double lp = 2.0;  // well above the peak: no folds
        const double delta = pi / 32;
        const auto adc = acquire(sig, AdcConfig{16, lp, 4});
        RecoveryConfig rc;
        rc.delta_sl = delta;
        rc.lambda_prime = lp;
        rc.rho = sig.rho;
        const auto res = unfold(adc, sig, rc);
        double mse = 0.0;
        for (std::size_t i = 0; i < sig.size(); ++i) mse += std::pow(res.estimate[i] - sig.samples[i], 2);
        mse /= static_cast<double>(sig.size());
        CHECK(to_db(mse) < -80.0);
        const double floor = quantization_noise_power(16, quantizer_range(16, lp)) * (sig.rho + delta / pi);
        CHECK(std::abs(mse / floor - 1.0) < 0.10);
    }

    TEST_CASE("MSE equals the in-band noise power when every residue is right") {
        const double delta = pi / 32;
        const auto s = pulse_signal(600, 16.0, delta, 12);
        const auto adc = acquire(s.signal, AdcConfig{6, s.lambda_prime, 5});
        const auto res = unfold(adc, s.signal, recovery_for(s, delta));
        REQUIRE(res.residue == adc.residue_truth);
        double mse = 0.0;
        for (std::size_t i = 0; i < s.signal.size(); ++i) mse += std::pow(res.estimate[i] - s.signal.samples[i], 2);
        mse /= static_cast<double>(s.signal.size());
        const double floor = quantization_noise_power(6, quantizer_range(6, s.lambda_prime)) * (s.signal.rho + delta / pi);
        CHECK(std::abs(mse / floor - 1.0) < 0.10);
    }

    TEST_CASE("quiet stretches do not disturb the recovered residue") {
        const double delta = pi / 32;
        const auto s = pulse_signal(100, 4.0, delta, 21);
        for (std::size_t gap : {0u, 200u, 517u}) {
            SampledSignal g = s.signal;
            std::vector<double> x(s.signal.samples.begin(), s.signal.samples.end());
            x.insert(x.begin() + 400, gap, x[400]);
            g.samples = x;
            const auto adc = acquire(g, AdcConfig{4, s.lambda_prime, 1, true});
            const auto res = unfold(adc, g, recovery_for(s, delta));
            CHECK(res.residue == adc.residue_truth);
            if (gap > 0) CHECK(res.segments_skipped >= gap / 48 - 2);
        }
    }

    TEST_CASE("configuration mismatches") {
        const double delta = pi / 32;
        const auto s = pulse_signal(50, 4.0, delta, 1);
        const auto adc = acquire(s.signal, AdcConfig{4, s.lambda_prime, 1});
        RecoveryConfig rc = recovery_for(s, delta);
        rc.lambda_prime *= 1.1;
        CHECK_THROWS_AS(unfold(adc, s.signal, rc), InvalidArgument);
        rc = recovery_for(s, delta);
        rc.rho = 0.2;
        CHECK_THROWS_AS(unfold(adc, s.signal, rc), InvalidArgument);
        rc = recovery_for(s, delta);
        rc.alpha = 0.3;
        CHECK_THROWS_AS(unfold(adc, s.signal, rc), InvalidArgument);
    }

    TEST_CASE("recovery lowpass passes the signal band") {
        const auto f = recovery_lowpass(0.25, pi / 32);
        CHECK(f.length() >= 257);
        CHECK(f.cutoff + f.transition <= 0.25 * pi + pi / 32 + pi / 64 + 1e-12);
        CHECK(f.cutoff >= 0.25 * pi);
        const auto g = recovery_lowpass(0.25, 0.0);
        CHECK(g.cutoff >= 0.25 * pi);
    }
}
