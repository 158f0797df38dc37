#include "modunfold/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "modunfold/adc.hpp"
#include "modunfold/error.hpp"

namespace modunfold {

double conventional_range(int bits, double f_inf) {
    if (bits < 2) throw InvalidArgument("conventional_range: need b >= 2");
    if (!(f_inf > 0.0)) throw InvalidArgument("conventional_range: |f|_inf must be positive");
    const double levels = std::ldexp(1.0, bits);
    return levels * f_inf / (levels - 2.0);
}

FirLowpass conventional_lowpass(double rho, std::size_t min_length) {
    const double band = rho * std::numbers::pi;
    const double transition = band / 8.0;
    const std::size_t len = std::max(min_length | 1, required_lowpass_length(transition));
    return design_lowpass(band, transition, len);
}

RealVector conventional_adc(const SampledSignal& signal, int bits, double f_inf, std::uint64_t seed) {
    const double lambda = conventional_range(bits, f_inf);
    const std::vector<double> d = triangle_dither(signal.size(), bits, lambda, seed);
    RealVector q(signal.size());
    for (std::size_t n = 0; n < q.size(); ++n) {
        try {
            q[n] = quantize_uniform(signal.samples[n] + d[n], bits, lambda);
        } catch (const OverloadError& e) {
            throw OverloadError(std::string(e.what()) + " at sample " + std::to_string(n) +
                                    " (|f|_inf underestimated?)",
                                static_cast<long>(n));
        }
    }
    return filter_zero_delay(q, conventional_lowpass(signal.rho));
}

RealVector hod_recover(std::span<const double> quantized_modulo, const HodConfig& cfg) {
    if (cfg.order < 1) throw InvalidArgument("hod_recover: order must be >= 1");
    if (!(cfg.lambda_prime > 0.0)) throw InvalidArgument("hod_recover: lambda' must be positive");
    const std::size_t n0 = quantized_modulo.size();
    const auto k = static_cast<std::size_t>(cfg.order);
    if (n0 <= k) return RealVector(quantized_modulo.begin(), quantized_modulo.end());

    const double lp = cfg.lambda_prime;
    const double period = 2.0 * lp;

    // order-th backward difference, valid from index k on
    RealVector diff(quantized_modulo.begin(), quantized_modulo.end());
    for (std::size_t stage = 1; stage <= k; ++stage)
        for (std::size_t i = n0 - 1; i >= stage; --i) diff[i] -= diff[i - 1];

    // Lattice part of the order-th difference of the residue.
    RealVector level(n0, 0.0);
    for (std::size_t i = k; i < n0; ++i) level[i] = diff[i] - fold(diff[i], lp);

    // Anti-difference; residue differences of every order vanish on the
    // anchored head.
    for (std::size_t stage = 0; stage < k; ++stage) {
        double acc = 0.0;
        for (std::size_t i = k; i < n0; ++i) {
            acc += level[i];
            acc = period * std::round(acc / period);
            level[i] = acc;
        }
    }

    RealVector out(n0);
    for (std::size_t i = 0; i < n0; ++i) out[i] = quantized_modulo[i] - level[i];
    return out;
}

}  // namespace modunfold
