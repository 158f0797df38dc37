#pragma once

// Closed-form side: threshold and oversampling calculators, full-rank and
// bit-depth sufficiency checks, predicted MSE for the modulo and conventional
// ADCs, the Monte-Carlo estimate of the noise amplification M, and the
// operation-count model of the segmented recovery.

#include <cstddef>
#include <cstdint>

namespace modunfold {

// K_SL = 2 ceil(delta_sl N / pi)
int spectral_leakage_bins(double delta_sl, std::size_t n);

// Smallest OF for which every V_S has full column rank, given the largest
// fold set per segment: N / (N - max_s - K_SL).
double of_sufficient_general(std::size_t n, std::size_t max_s, int k_sl);

// Same bound using only |f|_inf (threshold chosen by lambda_prime_required):
// 3 / (1 - K_SL / N).
double of_sufficient(std::size_t n, int k_sl);

// lambda' = |f|_inf / (OF (1 - K_SL/N) - 2)
double lambda_prime_required(double f_inf, double of, int k_sl, std::size_t n);

// 3 + log2(1 + 3M/4); the guarantee needs b strictly above this.
double b_sufficient(double m);

// max over `trials` random fold sets S of size s_size of |V_S^+ V_{S^c}|_inf.
// Trial t draws its set from an RNG seeded with (seed, t), so results do not
// depend on the thread count and grow monotonically with `trials`.
double estimate_m(std::size_t n, double of, double delta_sl, std::size_t s_size, std::size_t trials,
                  std::uint64_t seed, unsigned threads = 1);

// Predicted MSE of the sliding-DFT recovery (linear power):
// |f|^2 (1 + delta_sl OF / pi) / (OF (2^b - 2)^2 (OF (1 - K_SL/N) - 2)^2).
double mse_guarantee(double f_inf, double of, int bits, int k_sl, double delta_sl, std::size_t n);

// |f|^2 / (OF (2^b - 2)^2)
double mse_conventional(double f_inf, double of, int bits);

// lambda^2 / 2^(2b)
double quantization_noise_power(int bits, double lambda);

struct ComplexityEstimate {
    double segments = 0.0;           // N0 / (N (1 - alpha/2))
    double per_segment_flops = 0.0;  // (1 - rho)^3 N^3
    double total_order = 0.0;        // N0 (1 - rho)^3 N^2 / (1 - alpha/2)
    double whole_signal_order = 0.0; // (1 - rho)^3 N0^3
    double time_fraction = 0.0;      // total_order / whole_signal_order
    double speedup = 0.0;            // 1 / time_fraction
};

ComplexityEstimate complexity_estimate(std::size_t n0, std::size_t n, double alpha, double rho);

struct TheoryReport {
    double oversampling_factor = 0.0;
    int bits = 0;
    std::size_t n = 0;
    int k_sl = 0;
    double delta_sl = 0.0;
    double f_inf = 0.0;
    double lambda_prime = 0.0;
    double lambda = 0.0;
    double of_required = 0.0;
    bool of_sufficient = false;
    double m_tilde = 0.0;      // Monte-Carlo surrogate for M
    double b_required = 0.0;
    bool b_sufficient = false; // advisory: based on m_tilde
    double mse_modulo = 0.0;
    double mse_modulo_db = 0.0;
    double mse_conventional = 0.0;
    double mse_conventional_db = 0.0;
};

// Fills a report; mse_modulo is NaN (and of_sufficient false) when OF is
// below the full-rank bound.
TheoryReport theory_report(double f_inf, double of, int bits, double delta_sl, std::size_t n, double m_tilde);

double to_db(double linear);

}  // namespace modunfold
