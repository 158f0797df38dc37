#pragma once

// Reference recoveries: a conventional dithered b-bit ADC without folding, and
// higher-order-difference (HoD) unfolding that ignores the folding bits.

#include <cstdint>
#include <span>

#include "modunfold/dsp.hpp"
#include "modunfold/signal.hpp"

namespace modunfold {

// Quantizer range for a conventional ADC whose dithered input never
// overloads: lambda = 2^b |f|_inf / (2^b - 2).
double conventional_range(int bits, double f_inf);

// Lowpass for the conventional pipeline: passband edge rho*pi, transition rho*pi/8.
FirLowpass conventional_lowpass(double rho, std::size_t min_length = kDefaultLowpassLength);

// Dither, quantize on [-lambda, lambda], lowpass.
RealVector conventional_adc(const SampledSignal& signal, int bits, double f_inf, std::uint64_t seed);

struct HodConfig {
    int order = 1;
    double lambda_prime = 1.0;
};

// Difference `order` times, fold each difference into [-lambda', lambda') to
// read off the lattice part, then anti-difference `order` times rounding to
// the 2 lambda' lattice after each stage. The first `order` samples are taken
// as unfolded, which anchors the additive 2 lambda' p ambiguity.
// Returns the unfolded samples without lowpass filtering.
RealVector hod_recover(std::span<const double> quantized_modulo, const HodConfig& cfg);

}  // namespace modunfold
