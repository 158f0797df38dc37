#pragma once

// Modulo ADC with 1-bit folding information: ideal centred modulo, triangle
// dither, b-bit mid-rise quantizer sized so the dithered folded signal never
// overloads it, and a flag marking each sample where the fold count changes.

#include <cstdint>
#include <span>
#include <vector>

#include "modunfold/signal.hpp"

namespace modunfold {

// [(x + lambda') mod 2 lambda'] - lambda', with the periodic (non-negative) mod.
double fold(double x, double lambda_prime);

// lambda = 2^b lambda' / (2^b - 2); requires b >= 2.
double quantizer_range(int bits, double lambda_prime);

// Bin width 2 lambda / 2^b.
double quantizer_step(int bits, double lambda);

// i.i.d. triangular samples on (-D, D], D = 2 lambda / 2^b, as the sum of two
// independent uniforms on (-D/2, D/2].
std::vector<double> triangle_dither(std::size_t count, int bits, double lambda, std::uint64_t seed);

// Centre of the bin [-lambda + m D, -lambda + (m+1) D) containing x; the top
// bin is closed on the right. Throws OverloadError (index -1) when |x| > lambda.
double quantize_uniform(double x, int bits, double lambda);

struct AdcConfig {
    int bits = 4;
    double lambda_prime = 1.0;
    std::uint64_t seed = 0;
    // Skip dither and quantizer: quantized == folded exactly.
    bool ideal = false;

    double lambda() const { return quantizer_range(bits, lambda_prime); }
    void validate() const;
};

struct AdcOutput {
    std::vector<double> quantized;    // Q_b(fold(f[n]) + d[n])
    std::vector<bool> folding_bits;   // c[n] = (z[n] != z[n-1]), z[-1] = 0
    std::vector<double> residue_truth;  // z[n] = fold(f[n]) - f[n]
    AdcConfig config;

    std::size_t size() const noexcept { return quantized.size(); }
};

AdcOutput acquire(const SampledSignal& signal, const AdcConfig& config);

}  // namespace modunfold
