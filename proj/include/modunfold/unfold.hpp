#pragma once

// Sliding-DFT unfolding: per overlapping segment, window the first
// difference of the modulo samples, read its out-of-band DFT bins, solve for
// the residue jumps at the flagged sample positions, undo the window taper
// with the previous segment's tail, round to the 2 lambda' lattice and
// integrate. The unfolded samples are then lowpass filtered.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "modunfold/adc.hpp"
#include "modunfold/dsp.hpp"
#include "modunfold/signal.hpp"

namespace modunfold {

struct RecoveryConfig {
    std::size_t n = 64;        // segment length == window length == DFT size
    double alpha = 0.5;        // Tukey roll-off
    double delta_sl = 0.0;     // spectral-leakage guard, rad/sample
    double lambda_prime = 1.0;
    double rho = 0.25;         // 1 / OF
    std::size_t lpf_min_length = kDefaultLowpassLength;

    void validate() const;
};

// Lowpass used on the unfolded samples: white-noise edge at rho*pi + delta_sl,
// transition delta_sl/2 centred on it (rho*pi/8 when delta_sl == 0), so the
// band (0, rho*pi) is inside the passband.
FirLowpass recovery_lowpass(double rho, double delta_sl, std::size_t min_length = kDefaultLowpassLength);

struct Segment {
    long start = 0;
    std::size_t valid = 0;  // samples of the segment that lie inside the record

    bool padded(std::size_t n) const noexcept { return valid < n; }
};

// Segments at 0, hop, 2 hop, ... (hop = N(1 - alpha/2)) until their committed
// regions [start, start + hop) cover all n0 samples; the last one may run past
// the record and is then padded.
std::vector<Segment> segment_starts(std::size_t n0, std::size_t n, double alpha);

// out[i] = w[i] (segment[i] - segment[i-1]) with segment[-1] = prev_last.
RealVector windowed_first_difference(std::span<const double> segment, double prev_last,
                                     const TukeyWindow& window);

struct PreEstimate {
    RealVector windowed;  // length N, zero off the fold set
    double max_imag = 0.0;
    double condition = 1.0;
};

// Least-squares fit of the out-of-band DFT bins of `diffed` using only the
// columns in `folds`. Throws RecoveryError if |folds| > K or the selected
// columns are numerically dependent.
PreEstimate residue_pre_estimate(std::span<const double> diffed, std::span<const std::size_t> folds,
                                 const OobSystem& sys);

struct SegmentCarry {
    double prev_last_quantized = 0.0;
    std::vector<double> prev_windowed_tail;  // alpha N / 2 samples
    std::int64_t running_folds = 0;          // running residue / (2 lambda')

    explicit SegmentCarry(std::size_t taper = 0) : prev_windowed_tail(taper, 0.0) {}
    double running_residue(double lambda_prime) const noexcept {
        return 2.0 * lambda_prime * static_cast<double>(running_folds);
    }
};

// First N(1 - alpha/2) samples of `current` with the previous segment's
// windowed tail added onto the first alpha N/2. Stores the new tail in `carry`.
RealVector scaling_correction(std::span<const double> current, SegmentCarry& carry, double alpha);

// 2 lambda' round(x / 2 lambda'), halves away from zero.
RealVector round_to_lattice(std::span<const double> x, double lambda_prime);

struct UnfoldResult {
    RealVector estimate;  // lowpassed unfolded samples
    RealVector residue;   // integrated residue estimate z_hat[n]
    std::size_t segments = 0;
    std::size_t segments_skipped = 0;
    double worst_condition = 1.0;
};

UnfoldResult unfold(const AdcOutput& adc, const SampledSignal& signal_meta, const RecoveryConfig& cfg);

}  // namespace modunfold
