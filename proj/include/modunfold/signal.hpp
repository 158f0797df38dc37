#pragma once

// Bandlimited test input: a train of raised-cosine pulses with random
// amplitudes, its uniform sampling, and a grid estimate of its peak.

#include <cstdint>
#include <span>
#include <vector>

#include "modunfold/dsp.hpp"

namespace modunfold {

struct PulseTrainSpec {
    std::size_t num_pulses = 2000;
    double beta = 1.0;             // raised-cosine roll-off
    std::size_t span = 20;         // pulse length in symbols, centred on the pulse
    double symbol_period_t = 1.0;  // seconds
    double amp_low = -0.5;
    double amp_high = 1.0;
    std::uint64_t seed = 0;

    void validate() const;
};

// Unit-peak raised-cosine pulse evaluated at t (seconds).
double raised_cosine_value(double t, double beta, double symbol_period);

// f(t) = sum_{m=1}^{M} A_m p(t - mT), each pulse truncated to |t - mT| <= span*T/2.
class PulseTrain {
public:
    PulseTrain(PulseTrainSpec spec, std::vector<double> amplitudes);

    double operator()(double t) const;

    const PulseTrainSpec& spec() const noexcept { return spec_; }
    std::span<const double> amplitudes() const noexcept { return amplitudes_; }

    // Pulses contribute only inside [0, support_end()].
    double support_end() const noexcept;
    // omega_m = 2 pi (1 + beta) / T, the two-sided bandwidth in rad/s.
    double omega_m() const noexcept;

private:
    PulseTrainSpec spec_;
    std::vector<double> amplitudes_;
};

// Draws A_m i.i.d. uniform on [amp_low, amp_high] from spec.seed.
PulseTrain generate_pulse_train(const PulseTrainSpec& spec);

struct SampledSignal {
    std::vector<double> samples;
    double sample_period_ts = 0.0;
    double rho = 1.0;  // 1 / OF = omega_m T_s / (2 pi)
    double omega_m = 0.0;

    double oversampling_factor() const noexcept { return 1.0 / rho; }
    std::size_t size() const noexcept { return samples.size(); }
};

// Number of samples t = n T_s covering the train's support at the given OF.
std::size_t support_samples(const PulseTrain& train, double oversampling_factor);

// samples[n] = f(n T_s) with T_s = 2 pi / (OF omega_m).
SampledSignal sample_signal(const PulseTrain& train, double oversampling_factor, long n0);

// max |f(t)| over a grid of spacing T_nyq / grid_oversample across the support,
// where T_nyq = 2 pi / omega_m is the Nyquist-rate sample period.
double estimate_inf_norm(const PulseTrain& train, std::size_t grid_oversample = 64);

// Relative margin applied to the grid peak before it is used to size the
// modulo threshold.
inline constexpr double kInfNormSafetyMargin = 1e-3;

}  // namespace modunfold
