#include "doctest.h"

#include <cmath>
#include <numbers>
#include <algorithm>
#include <numeric>
#include <random>

#include "modunfold/dsp.hpp"
#include "modunfold/error.hpp"
#include "modunfold/theory.hpp"

using namespace modunfold;
using std::numbers::pi;

TEST_SUITE("calculators") {
    TEST_CASE("spectral leakage bins") {
        CHECK(spectral_leakage_bins(pi / 32, 64) == 4);
        CHECK(spectral_leakage_bins(pi / 16, 64) == 8);
        CHECK(spectral_leakage_bins(0.0, 64) == 0);
        CHECK(spectral_leakage_bins(0.0, 1000) == 0);
        CHECK(spectral_leakage_bins(0.1, 64) == 2 * static_cast<int>(std::ceil(0.1 * 64 / pi)));
    }

    TEST_CASE("oversampling bounds") {
        CHECK(of_sufficient_general(64, 0, 0) == 1.0);
        CHECK(of_sufficient_general(64, 8, 4) == doctest::Approx(64.0 / 52.0));
        CHECK_THROWS_AS(of_sufficient_general(64, 60, 4), InfeasibleError);
        CHECK(of_sufficient(64, 0) == 3.0);
        CHECK(of_sufficient(64, 4) == doctest::Approx(3.2));
        CHECK(of_sufficient(64, 8) == doctest::Approx(3.0 / 0.875));
        CHECK(of_sufficient(1 << 20, 4) == doctest::Approx(3.0).epsilon(1e-5));
        CHECK_THROWS_AS(of_sufficient(64, 64), InfeasibleError);
    }

    TEST_CASE("general bound is tighter when fold counts respect the implied limit") {
        for (std::size_t n : {64u, 128u, 256u})
            for (int k : {0, 4, 8})
                for (double of : {3.5, 4.0, 8.0, 12.0}) {
                    if (of < of_sufficient(n, k)) continue;
                    const auto limit = static_cast<std::size_t>(
                        std::floor(static_cast<double>(n) - k - static_cast<double>(n) / of_sufficient(n, k)));
                    for (std::size_t s = 0; s <= limit; s += 3) CHECK(of_sufficient_general(n, s, k) <= of_sufficient(n, k) + 1e-12);
                }
    }

    TEST_CASE("threshold") {
        CHECK(lambda_prime_required(1.25, 4, 0, 64) == doctest::Approx(0.625));
        CHECK(lambda_prime_required(1.0, 4, 4, 64) == doctest::Approx(1.0 / 1.75));
        CHECK_THROWS_AS(lambda_prime_required(1.0, 2, 0, 64), InfeasibleError);
    }

    TEST_CASE("bit depth") {
        CHECK(b_sufficient(0) == 3.0);
        CHECK(b_sufficient(4) == doctest::Approx(5.0));
        CHECK(b_sufficient(20) == doctest::Approx(7.0));
        CHECK_THROWS_AS(b_sufficient(-1), InvalidArgument);
    }

    TEST_CASE("mse predictions") {
        CHECK(mse_guarantee(1, 4, 4, 0, 0, 64) == doctest::Approx(1.0 / (4 * 196 * 4)));
        CHECK(to_db(mse_guarantee(1, 4, 4, 0, 0, 64)) == doctest::Approx(-34.96).epsilon(1e-3));
        CHECK(mse_conventional(1, 4, 4) == doctest::Approx(1.0 / 784));
        CHECK(mse_conventional(1, 8, 4) == doctest::Approx(0.5 / 784));
        CHECK(mse_conventional(2, 4, 4) == doctest::Approx(4.0 / 784));
        const double gap = to_db(mse_conventional(1, 40, 4)) - to_db(mse_guarantee(1, 40, 4, 8, pi / 16, 64));
        CHECK(gap > 20.0);
        CHECK(gap < 26.0);
        CHECK_THROWS_AS(mse_guarantee(1, 3.0, 4, 4, pi / 32, 64), InfeasibleError);
        CHECK(quantization_noise_power(4, 1.0) == doctest::Approx(1.0 / 256));
        CHECK(quantization_noise_power(4, 2.0) == doctest::Approx(4.0 / 256));
    }

    TEST_CASE("monotonicity and the reduced identity") {
        for (int b = 3; b <= 12; ++b) {
            double prev = INFINITY;
            for (double of = 4.0; of <= 200.0; of += 0.5) {
                const double m = mse_guarantee(1, of, b, 4, pi / 32, 64);
                CHECK(m < prev);
                prev = m;
                CHECK(mse_guarantee(1, of, b + 1, 4, pi / 32, 64) < m);
            }
        }
        const double c0 = mse_guarantee(1, 4, 5, 0, 0, 64) * 4 * 4;
        for (double of = 4; of < 500; of *= 1.37) {
            const double c = mse_guarantee(1, of, 5, 0, 0, 64) * of * (of - 2) * (of - 2);
            CHECK(std::abs(c / c0 - 1) < 1e-12);
        }
    }

    TEST_CASE("asymptotic slopes") {
        const double r0 = mse_guarantee(1, 1000, 4, 0, 0, 64) / mse_guarantee(1, 100, 4, 0, 0, 64);
        CHECK(std::abs(r0 / 1e-3 - 1) < 0.05);
        // With leakage the (1 + delta OF / pi) factor keeps the ratio off
        // 1e-2 until OF is far above 100.
        auto ratio = [](double lo, double hi) {
            const double d = pi / 32, g = 1.0 - 4.0 / 64.0;
            return (lo / hi) * (1 + d * hi / pi) / (1 + d * lo / pi) * std::pow((lo * g - 2) / (hi * g - 2), 2);
        };
        const double r1 = mse_guarantee(1, 1000, 4, 4, pi / 32, 64) / mse_guarantee(1, 100, 4, 4, pi / 32, 64);
        CHECK(r1 == doctest::Approx(ratio(100, 1000)).epsilon(1e-12));
        CHECK(r1 == doctest::Approx(0.00752).epsilon(0.002));
        const double r2 = mse_guarantee(1, 1e6, 4, 4, pi / 32, 64) / mse_guarantee(1, 1e5, 4, 4, pi / 32, 64);
        CHECK(std::abs(r2 / 1e-2 - 1) < 0.01);
    }

    TEST_CASE("report") {
        const auto r = theory_report(1.0, 40, 4, pi / 16, 64, 3.0);
        CHECK(r.k_sl == 8);
        CHECK(r.of_sufficient);
        CHECK(r.lambda_prime == doctest::Approx(1.0 / (40 * 0.875 - 2)));
        CHECK(r.lambda == doctest::Approx(16.0 / 14.0 * r.lambda_prime));
        CHECK(r.b_sufficient == (4 > b_sufficient(3.0)));
        CHECK(r.mse_modulo_db == doctest::Approx(10 * std::log10(r.mse_modulo)));
        const auto bad = theory_report(1.0, 3, 4, pi / 16, 64, 0.0);
        CHECK_FALSE(bad.of_sufficient);
        CHECK(std::isnan(bad.mse_modulo));
    }
}

TEST_SUITE("complexity") {
    TEST_CASE("worked example and limits") {
        const auto e = complexity_estimate(100000, 256, 0.25, 0.25);
        CHECK(e.time_fraction == doctest::Approx(7.48e-6).epsilon(0.002));
        CHECK(e.speedup == doctest::Approx(1 / e.time_fraction));
        const auto whole = complexity_estimate(1000, 1000, 0.0, 0.25);
        CHECK(whole.segments == doctest::Approx(1.0));
        CHECK(whole.total_order == doctest::Approx(whole.whole_signal_order));
        CHECK(complexity_estimate(2000, 64, 0.5, 0.25).segments == doctest::Approx(2 * complexity_estimate(1000, 64, 0.5, 0.25).segments));
        CHECK(e.total_order == doctest::Approx(100000.0 * std::pow(0.75, 3) * 256 * 256 / 0.875));
    }
}

TEST_SUITE("estimate_m") {
    // direct route: least-squares map of V_S applied to V_{S^c}
    double direct_m(std::size_t n, double of, double delta, const IndexList& s) {
        const auto sys = build_oob_system(n, 1.0 / of, delta);
        IndexList rest;
        for (std::size_t i = 0; i < n; ++i)
            if (std::find(s.begin(), s.end(), i) == s.end()) rest.push_back(i);
        const auto vs = select_columns(sys, s);
        const auto vc = select_columns(sys, rest);
        const Eigen::MatrixXcd map = vs.completeOrthogonalDecomposition().pseudoInverse() * vc;
        return matrix_inf_norm(map);
    }

    TEST_CASE("Gram route agrees with the direct pseudo-inverse") {
        std::mt19937_64 rng(4);
        for (int t = 0; t < 20; ++t) {
            IndexList all(64);
            std::iota(all.begin(), all.end(), 0);
            std::shuffle(all.begin(), all.end(), rng);
            all.resize(6);
            const auto sys = build_oob_system(64, 0.25, pi / 32);
            const auto g = oob_gram_kernel(sys);
            Eigen::MatrixXd pss(6, 6), psc(6, 58);
            IndexList rest;
            for (std::size_t i = 0; i < 64; ++i)
                if (std::find(all.begin(), all.end(), i) == all.end()) rest.push_back(i);
            for (int i = 0; i < 6; ++i) {
                for (int j = 0; j < 6; ++j) pss(i, j) = g[(all[i] + 64 - all[j]) % 64];
                for (int j = 0; j < 58; ++j) psc(i, j) = g[(all[i] + 64 - rest[j]) % 64];
            }
            const Eigen::MatrixXd gram_route = pss.completeOrthogonalDecomposition().solve(psc);
            CHECK(std::abs(matrix_inf_norm(gram_route) - direct_m(64, 4.0, pi / 32, all)) < 1e-8);
        }
    }

    TEST_CASE("edge cases, determinism and thread independence") {
        CHECK(estimate_m(64, 4.0, pi / 32, 0, 100, 1) == 0.0);
        CHECK_THROWS_AS(estimate_m(64, 4.0, pi / 32, 46, 10, 1), InfeasibleError);
        const double a = estimate_m(64, 8.0, pi / 32, 4, 500, 7, 1);
        CHECK(a == estimate_m(64, 8.0, pi / 32, 4, 500, 7, 1));
        CHECK(a == estimate_m(64, 8.0, pi / 32, 4, 500, 7, 3));
        CHECK(estimate_m(64, 8.0, pi / 32, 4, 1000, 7, 1) >= a);  // nested trial streams
    }

    TEST_CASE("coarse trends") {
        CHECK(estimate_m(64, 12.0, pi / 32, 4, 2000, 3) <= estimate_m(64, 4.0, pi / 32, 4, 2000, 3));
        CHECK(estimate_m(64, 8.0, pi / 32, 8, 2000, 3) >= estimate_m(64, 8.0, pi / 32, 2, 2000, 3));
    }
}
