#include "modunfold/signal.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

#include "modunfold/error.hpp"

namespace modunfold {

namespace {
constexpr double kPi = std::numbers::pi;
}

void PulseTrainSpec::validate() const {
    if (!(beta >= 0.0 && beta <= 1.0)) throw InvalidArgument("pulse train: beta must lie in [0, 1]");
    if (span == 0 || span % 2 != 0) throw InvalidArgument("pulse train: span must be even and positive");
    if (!(amp_low < amp_high)) throw InvalidArgument("pulse train: need amp_low < amp_high");
    if (!(symbol_period_t > 0.0)) throw InvalidArgument("pulse train: symbol period must be positive");
}

double raised_cosine_value(double t, double beta, double symbol_period) {
    const double x = t / symbol_period;
    if (x == 0.0) return 1.0;
    const double sinc = std::sin(kPi * x) / (kPi * x);
    if (beta == 0.0) return sinc;

    const double u = 2.0 * beta * x;
    const double denom = 1.0 - u * u;
    // Removable singularity at t = +-T/(2 beta): the limit is (pi/4) sinc(1/(2 beta)).
    if (std::abs(denom) < 1e-10) {
        const double y = 1.0 / (2.0 * beta);
        return kPi / 4.0 * std::sin(kPi * y) / (kPi * y);
    }
    return sinc * std::cos(kPi * beta * x) / denom;
}

PulseTrain::PulseTrain(PulseTrainSpec spec, std::vector<double> amplitudes)
    : spec_(spec), amplitudes_(std::move(amplitudes)) {
    spec_.validate();
    spec_.num_pulses = amplitudes_.size();
}

double PulseTrain::operator()(double t) const {
    const double T = spec_.symbol_period_t;
    const double half = static_cast<double>(spec_.span) / 2.0;
    const double pos = t / T;
    const long m_lo = std::max(1L, static_cast<long>(std::ceil(pos - half)));
    const long m_hi = std::min(static_cast<long>(amplitudes_.size()),
                               static_cast<long>(std::floor(pos + half)));
    double acc = 0.0;
    for (long m = m_lo; m <= m_hi; ++m)
        acc += amplitudes_[static_cast<std::size_t>(m - 1)] *
               raised_cosine_value(t - static_cast<double>(m) * T, spec_.beta, T);
    return acc;
}

double PulseTrain::support_end() const noexcept {
    return static_cast<double>(amplitudes_.size() + spec_.span) * spec_.symbol_period_t;
}

double PulseTrain::omega_m() const noexcept {
    return 2.0 * kPi * (1.0 + spec_.beta) / spec_.symbol_period_t;
}

PulseTrain generate_pulse_train(const PulseTrainSpec& spec) {
    spec.validate();
    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> amp(spec.amp_low, spec.amp_high);
    std::vector<double> a(spec.num_pulses);
    for (auto& v : a) v = amp(rng);
    return PulseTrain(spec, std::move(a));
}

std::size_t support_samples(const PulseTrain& train, double oversampling_factor) {
    const double ts = 2.0 * kPi / (oversampling_factor * train.omega_m());
    return static_cast<std::size_t>(std::floor(train.support_end() / ts + 1e-9)) + 1;
}

SampledSignal sample_signal(const PulseTrain& train, double oversampling_factor, long n0) {
    if (!(oversampling_factor >= 1.0)) throw InvalidArgument("sample_signal: OF must be >= 1");
    if (n0 <= 0) throw InvalidArgument("sample_signal: sample count must be positive");

    SampledSignal s;
    s.omega_m = train.omega_m();
    s.sample_period_ts = 2.0 * kPi / (oversampling_factor * s.omega_m);
    s.rho = 1.0 / oversampling_factor;
    s.samples.resize(static_cast<std::size_t>(n0));
    for (long n = 0; n < n0; ++n)
        s.samples[static_cast<std::size_t>(n)] = train(static_cast<double>(n) * s.sample_period_ts);
    return s;
}

double estimate_inf_norm(const PulseTrain& train, std::size_t grid_oversample) {
    if (grid_oversample < 8) throw InvalidArgument("estimate_inf_norm: grid oversampling must be >= 8");
    const double t_nyq = 2.0 * kPi / train.omega_m();
    const double g = static_cast<double>(grid_oversample);
    const auto points = static_cast<std::size_t>(std::ceil(train.support_end() * g / t_nyq)) + 1;
    double peak = 0.0;
    // (i * T) / g rather than i * (T / g): grids whose factors differ by a
    // power of two then share their common points bit-for-bit.
    for (std::size_t i = 0; i < points; ++i)
        peak = std::max(peak, std::abs(train(static_cast<double>(i) * t_nyq / g)));
    return peak;
}

}  // namespace modunfold
