#include "modunfold/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include <Eigen/Dense>

#include "modunfold/dsp.hpp"
#include "modunfold/error.hpp"

namespace modunfold {

namespace {

constexpr double kPi = std::numbers::pi;

// Largest |V_S^+ V_{S^c}|_inf over trials [first, last).
//
// With V^H V = P (the out-of-band projector, real circulant with kernel g),
// V_S^+ V_{S^c} = (V_S^H V_S)^{-1} V_S^H V_{S^c} = P[S,S]^{-1} P[S,S^c],
// which turns each trial into a small real solve.
double max_norm_over_trials(const RealVector& g, std::size_t n, std::size_t s_size, std::uint64_t seed,
                            std::size_t first, std::size_t last) {
    std::vector<std::size_t> perm(n);
    std::vector<bool> in_s(n);
    Eigen::MatrixXd gram(static_cast<Eigen::Index>(s_size), static_cast<Eigen::Index>(s_size));
    Eigen::MatrixXd cross(static_cast<Eigen::Index>(s_size), static_cast<Eigen::Index>(n - s_size));
    auto kernel = [&](std::size_t a, std::size_t b) { return g[(a + n - b) % n]; };

    double best = 0.0;
    for (std::size_t t = first; t < last; ++t) {
        std::seed_seq ss{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                         static_cast<std::uint32_t>(t), static_cast<std::uint32_t>(t >> 32)};
        std::mt19937_64 rng(ss);
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        for (std::size_t i = 0; i < s_size; ++i) {
            std::uniform_int_distribution<std::size_t> pick(i, n - 1);
            std::swap(perm[i], perm[pick(rng)]);
        }
        std::fill(in_s.begin(), in_s.end(), false);
        for (std::size_t i = 0; i < s_size; ++i) in_s[perm[i]] = true;

        for (std::size_t i = 0; i < s_size; ++i) {
            for (std::size_t j = 0; j < s_size; ++j)
                gram(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = kernel(perm[i], perm[j]);
            Eigen::Index col = 0;
            for (std::size_t c = 0; c < n; ++c)
                if (!in_s[c]) cross(static_cast<Eigen::Index>(i), col++) = kernel(perm[i], c);
        }
        Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(gram);
        if (cod.rank() < static_cast<Eigen::Index>(s_size)) return std::numeric_limits<double>::infinity();
        const Eigen::MatrixXd map = cod.solve(cross);
        best = std::max(best, matrix_inf_norm(map));
    }
    return best;
}

}  // namespace

int spectral_leakage_bins(double delta_sl, std::size_t n) {
    if (!(delta_sl >= 0.0)) throw InvalidArgument("spectral_leakage_bins: delta_sl must be >= 0");
    const double x = delta_sl * static_cast<double>(n) / kPi;
    // delta_sl is usually pi/2^k, where x is an integer up to rounding
    return 2 * static_cast<int>(std::ceil(x - 1e-9));
}

double of_sufficient_general(std::size_t n, std::size_t max_s, int k_sl) {
    const double denom = static_cast<double>(n) - static_cast<double>(max_s) - static_cast<double>(k_sl);
    if (denom <= 0.0)
        throw InfeasibleError("of_sufficient_general: N - max|S| - K_SL = " + std::to_string(denom) +
                              " <= 0; no oversampling factor gives full column rank");
    return static_cast<double>(n) / denom;
}

double of_sufficient(std::size_t n, int k_sl) {
    if (k_sl < 0 || static_cast<std::size_t>(k_sl) >= n)
        throw InfeasibleError("of_sufficient: K_SL must lie in [0, N)");
    return 3.0 / (1.0 - static_cast<double>(k_sl) / static_cast<double>(n));
}

double lambda_prime_required(double f_inf, double of, int k_sl, std::size_t n) {
    if (!(f_inf > 0.0)) throw InvalidArgument("lambda_prime_required: |f|_inf must be positive");
    const double denom = of * (1.0 - static_cast<double>(k_sl) / static_cast<double>(n)) - 2.0;
    if (denom <= 0.0)
        throw InfeasibleError("lambda_prime_required: OF (1 - K_SL/N) - 2 = " + std::to_string(denom) + " <= 0");
    return f_inf / denom;
}

double b_sufficient(double m) {
    if (!(m >= 0.0)) throw InvalidArgument("b_sufficient: M must be >= 0");
    return 3.0 + std::log2(1.0 + 0.75 * m);
}

double estimate_m(std::size_t n, double of, double delta_sl, std::size_t s_size, std::size_t trials,
                  std::uint64_t seed, unsigned threads) {
    const OobSystem sys = build_oob_system(n, 1.0 / of, delta_sl);
    if (s_size > sys.k())
        throw InfeasibleError("estimate_m: |S| = " + std::to_string(s_size) + " exceeds K = " +
                              std::to_string(sys.k()) + "; V_S cannot have full column rank");
    if (s_size == 0 || trials == 0) return 0.0;

    const RealVector g = oob_gram_kernel(sys);
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(trials)));
    if (threads == 1) return max_norm_over_trials(g, n, s_size, seed, 0, trials);

    std::vector<double> partial(threads, 0.0);
    {
        std::vector<std::jthread> pool;
        const std::size_t chunk = (trials + threads - 1) / threads;
        for (unsigned w = 0; w < threads; ++w) {
            const std::size_t first = std::min(trials, w * chunk);
            const std::size_t last = std::min(trials, first + chunk);
            pool.emplace_back([&, w, first, last] {
                partial[w] = max_norm_over_trials(g, n, s_size, seed, first, last);
            });
        }
    }
    return *std::max_element(partial.begin(), partial.end());
}

double mse_guarantee(double f_inf, double of, int bits, int k_sl, double delta_sl, std::size_t n) {
    const double of_min = of_sufficient(n, k_sl);
    if (of < of_min * (1.0 - 1e-12))
        throw InfeasibleError("mse_guarantee: OF = " + std::to_string(of) + " is below the full-rank bound " +
                              std::to_string(of_min));
    if (bits < 2) throw InfeasibleError("mse_guarantee: need b >= 2");
    const double levels = std::ldexp(1.0, bits) - 2.0;
    const double margin = of * (1.0 - static_cast<double>(k_sl) / static_cast<double>(n)) - 2.0;
    return f_inf * f_inf * (1.0 + delta_sl / kPi * of) / (of * levels * levels * margin * margin);
}

double mse_conventional(double f_inf, double of, int bits) {
    if (bits < 2) throw InvalidArgument("mse_conventional: need b >= 2");
    if (!(of >= 1.0)) throw InvalidArgument("mse_conventional: need OF >= 1");
    const double levels = std::ldexp(1.0, bits) - 2.0;
    return f_inf * f_inf / (of * levels * levels);
}

double quantization_noise_power(int bits, double lambda) {
    if (bits < 1) throw InvalidArgument("quantization_noise_power: need b >= 1");
    return lambda * lambda / std::ldexp(1.0, 2 * bits);
}

ComplexityEstimate complexity_estimate(std::size_t n0, std::size_t n, double alpha, double rho) {
    if (n == 0 || n0 == 0) throw InvalidArgument("complexity_estimate: lengths must be positive");
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw InvalidArgument("complexity_estimate: alpha must lie in [0, 1]");
    if (!(rho > 0.0 && rho <= 1.0)) throw InvalidArgument("complexity_estimate: rho must lie in (0, 1]");
    const double n0d = static_cast<double>(n0);
    const double nd = static_cast<double>(n);
    const double shrink = std::pow(1.0 - rho, 3);
    ComplexityEstimate e;
    e.segments = n0d / (nd * (1.0 - alpha / 2.0));
    e.per_segment_flops = shrink * nd * nd * nd;
    e.total_order = e.segments * e.per_segment_flops;
    e.whole_signal_order = shrink * n0d * n0d * n0d;
    e.time_fraction = (nd * nd) / (n0d * n0d * (1.0 - alpha / 2.0));
    e.speedup = 1.0 / e.time_fraction;
    return e;
}

double to_db(double linear) { return 10.0 * std::log10(linear); }

TheoryReport theory_report(double f_inf, double of, int bits, double delta_sl, std::size_t n, double m_tilde) {
    TheoryReport r;
    r.oversampling_factor = of;
    r.bits = bits;
    r.n = n;
    r.delta_sl = delta_sl;
    r.f_inf = f_inf;
    r.k_sl = spectral_leakage_bins(delta_sl, n);
    r.m_tilde = m_tilde;
    r.b_required = b_sufficient(m_tilde);
    r.b_sufficient = static_cast<double>(bits) > r.b_required;
    r.mse_conventional = mse_conventional(f_inf, of, bits);
    r.mse_conventional_db = to_db(r.mse_conventional);

    const double nan = std::numeric_limits<double>::quiet_NaN();
    r.mse_modulo = r.mse_modulo_db = r.lambda_prime = r.lambda = nan;
    r.of_required = nan;
    if (static_cast<std::size_t>(r.k_sl) >= n) return r;
    r.of_required = of_sufficient(n, r.k_sl);
    r.of_sufficient = of >= r.of_required * (1.0 - 1e-12);
    if (!r.of_sufficient) return r;
    r.lambda_prime = lambda_prime_required(f_inf, of, r.k_sl, n);
    const double levels = std::ldexp(1.0, bits);
    r.lambda = levels * r.lambda_prime / (levels - 2.0);
    r.mse_modulo = mse_guarantee(f_inf, of, bits, r.k_sl, delta_sl, n);
    r.mse_modulo_db = to_db(r.mse_modulo);
    return r;
}

}  // namespace modunfold
