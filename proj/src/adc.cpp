#include "modunfold/adc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "modunfold/error.hpp"

namespace modunfold {

double fold(double x, double lambda_prime) {
    const double period = 2.0 * lambda_prime;
    double r = std::fmod(x + lambda_prime, period);
    if (r < 0.0) r += period;
    // fmod of a tiny negative can round up to exactly one period
    if (r >= period) r -= period;
    return r - lambda_prime;
}

double quantizer_range(int bits, double lambda_prime) {
    if (bits < 2) throw InvalidArgument("quantizer_range: need b >= 2 for a positive margin");
    if (!(lambda_prime > 0.0)) throw InvalidArgument("quantizer_range: lambda' must be positive");
    const double levels = std::ldexp(1.0, bits);
    return levels * lambda_prime / (levels - 2.0);
}

double quantizer_step(int bits, double lambda) { return 2.0 * lambda / std::ldexp(1.0, bits); }

std::vector<double> triangle_dither(std::size_t count, int bits, double lambda, std::uint64_t seed) {
    if (bits < 1) throw InvalidArgument("triangle_dither: b must be >= 1");
    if (!(lambda > 0.0)) throw InvalidArgument("triangle_dither: lambda must be positive");
    const double half = quantizer_step(bits, lambda) / 2.0;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 2.0 * half);
    std::vector<double> d(count);
    for (auto& v : d) {
        // half - U[0, 2 half) lies in (-half, half]
        const double a = half - u(rng);
        const double b = half - u(rng);
        v = a + b;
    }
    return d;
}

double quantize_uniform(double x, int bits, double lambda) {
    // a couple of ulps of slack: the no-overload bound is met with equality
    const double slack = 4.0 * std::numeric_limits<double>::epsilon() * lambda;
    if (!(std::abs(x) <= lambda + slack))
        throw OverloadError("quantizer overload: |" + std::to_string(x) + "| > " + std::to_string(lambda), -1);
    const double step = quantizer_step(bits, lambda);
    const long top = (1L << bits) - 1;
    long m = static_cast<long>(std::floor((x + lambda) / step));
    m = std::clamp(m, 0L, top);
    return -lambda + (static_cast<double>(m) + 0.5) * step;
}

void AdcConfig::validate() const {
    if (bits < 2 || bits > 30) throw InvalidArgument("adc: b must lie in [2, 30]");
    if (!(lambda_prime > 0.0)) throw InvalidArgument("adc: lambda' must be positive");
}

AdcOutput acquire(const SampledSignal& signal, const AdcConfig& config) {
    config.validate();
    const auto& f = signal.samples;
    const double lp = config.lambda_prime;
    if (!f.empty() && std::abs(f[0]) > lp)
        throw InvalidArgument("acquire: |f[0]| = " + std::to_string(std::abs(f[0])) +
                              " exceeds the modulo threshold " + std::to_string(lp));

    AdcOutput out;
    out.config = config;
    out.quantized.resize(f.size());
    out.folding_bits.resize(f.size());
    out.residue_truth.resize(f.size());

    const double lambda = config.lambda();
    const std::vector<double> dither =
        config.ideal ? std::vector<double>() : triangle_dither(f.size(), config.bits, lambda, config.seed);

    double prev_z = 0.0;
    for (std::size_t n = 0; n < f.size(); ++n) {
        const double folded = fold(f[n], lp);
        // snap to the lattice: fold() - f carries rounding of order ulp(f)
        const double z = 2.0 * lp * std::round((folded - f[n]) / (2.0 * lp));
        out.residue_truth[n] = z;
        out.folding_bits[n] = (z != prev_z);
        prev_z = z;

        if (config.ideal) {
            out.quantized[n] = folded;
            continue;
        }
        try {
            out.quantized[n] = quantize_uniform(folded + dither[n], config.bits, lambda);
        } catch (const OverloadError& e) {
            throw OverloadError(std::string(e.what()) + " at sample " + std::to_string(n),
                                static_cast<long>(n));
        }
    }
    return out;
}

}  // namespace modunfold
