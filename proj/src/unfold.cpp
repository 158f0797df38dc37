#include "modunfold/unfold.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "modunfold/error.hpp"

namespace modunfold {

namespace {
constexpr double kPi = std::numbers::pi;
}

void RecoveryConfig::validate() const {
    if (n < 2) throw InvalidArgument("recovery: segment length must be >= 2");
    if (!(lambda_prime > 0.0)) throw InvalidArgument("recovery: lambda' must be positive");
    if (!(rho > 0.0 && rho < 1.0)) throw InvalidArgument("recovery: rho must lie in (0, 1)");
    if (!(delta_sl >= 0.0) || rho * kPi + delta_sl >= kPi)
        throw ConfigError("recovery: out-of-band interval (rho pi + delta_sl, 2pi - rho pi - delta_sl) is empty");
    const TukeyWindow w = tukey_window(n, alpha);  // validates alpha N
    if (w.hop() == 0) throw ConfigError("recovery: hop N(1 - alpha/2) must be positive");
}

FirLowpass recovery_lowpass(double rho, double delta_sl, std::size_t min_length) {
    const double band = rho * kPi;
    const double transition = delta_sl > 0.0 ? delta_sl / 2.0 : band / 8.0;
    const double edge = delta_sl > 0.0 ? band + delta_sl : band + transition / 2.0;
    const std::size_t len = std::max(min_length | 1, required_lowpass_length(transition));
    return design_lowpass(edge - transition / 2.0, transition, len);
}

std::vector<Segment> segment_starts(std::size_t n0, std::size_t n, double alpha) {
    if (n0 < n) throw InvalidArgument("segment_starts: record shorter than one segment");
    const TukeyWindow w = tukey_window(n, alpha);
    const std::size_t hop = w.hop();
    std::vector<Segment> out;
    for (std::size_t s = 0; s < n0; s += hop) out.push_back({static_cast<long>(s), std::min(n, n0 - s)});
    return out;
}

RealVector windowed_first_difference(std::span<const double> segment, double prev_last,
                                     const TukeyWindow& window) {
    if (segment.size() != window.n)
        throw InvalidArgument("windowed_first_difference: segment and window lengths differ");
    RealVector out(segment.size());
    double prev = prev_last;
    for (std::size_t i = 0; i < segment.size(); ++i) {
        out[i] = window.coefficients[i] * (segment[i] - prev);
        prev = segment[i];
    }
    return out;
}

PreEstimate residue_pre_estimate(std::span<const double> diffed, std::span<const std::size_t> folds,
                                 const OobSystem& sys) {
    if (diffed.size() != sys.n)
        throw InvalidArgument("residue_pre_estimate: segment length does not match the OOB system");
    PreEstimate out;
    out.windowed.assign(sys.n, 0.0);
    if (folds.empty()) return out;
    if (folds.size() > sys.k())
        throw RecoveryError("residue_pre_estimate: " + std::to_string(folds.size()) +
                                " fold locations but only " + std::to_string(sys.k()) +
                                " out-of-band equations; oversampling is insufficient for full column rank",
                            -1);

    const ComplexSpectrum spec = dft_normalized(diffed);
    Eigen::VectorXcd rhs(static_cast<Eigen::Index>(sys.k()));
    for (std::size_t r = 0; r < sys.k(); ++r) rhs(static_cast<Eigen::Index>(r)) = spec.bins[sys.oob_bins[r]];

    const Eigen::MatrixXcd vs = select_columns(sys, folds);
    const LeastSquaresResult ls = least_squares_apply(vs, rhs);
    if (!ls.full_column_rank())
        throw RecoveryError("residue_pre_estimate: selected columns are rank deficient (sigma_min = " +
                                std::to_string(ls.sigma_min) + ", tol = " + std::to_string(ls.rank_tol) + ")",
                            -1);
    out.condition = ls.condition();
    for (std::size_t j = 0; j < folds.size(); ++j) {
        const Complex v = ls.solution(static_cast<Eigen::Index>(j));
        out.windowed[folds[j]] = v.real();
        out.max_imag = std::max(out.max_imag, std::abs(v.imag()));
    }
    return out;
}

RealVector scaling_correction(std::span<const double> current, SegmentCarry& carry, double alpha) {
    const std::size_t n = current.size();
    const auto an = static_cast<std::size_t>(std::llround(alpha * static_cast<double>(n)));
    const std::size_t taper = an / 2;
    const std::size_t hop = n - taper;
    if (carry.prev_windowed_tail.size() != taper)
        throw InvalidArgument("scaling_correction: carried tail must hold alpha N / 2 samples");

    RealVector out(current.begin(), current.begin() + static_cast<std::ptrdiff_t>(hop));
    for (std::size_t i = 0; i < taper; ++i) out[i] += carry.prev_windowed_tail[i];
    std::copy(current.begin() + static_cast<std::ptrdiff_t>(hop), current.end(), carry.prev_windowed_tail.begin());
    return out;
}

RealVector round_to_lattice(std::span<const double> x, double lambda_prime) {
    if (!(lambda_prime > 0.0)) throw InvalidArgument("round_to_lattice: lambda' must be positive");
    const double period = 2.0 * lambda_prime;
    RealVector out(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = period * std::round(x[i] / period);
    return out;
}

UnfoldResult unfold(const AdcOutput& adc, const SampledSignal& signal_meta, const RecoveryConfig& cfg) {
    cfg.validate();
    const double lp = cfg.lambda_prime;
    if (std::abs(adc.config.lambda_prime - lp) > 1e-12 * lp)
        throw InvalidArgument("unfold: recovery lambda' differs from the ADC's");
    if (std::abs(signal_meta.rho - cfg.rho) > 1e-12)
        throw InvalidArgument("unfold: recovery rho differs from the signal's");

    const std::size_t n0 = adc.size();
    const std::size_t n = cfg.n;
    const TukeyWindow window = tukey_window(n, cfg.alpha);
    const std::size_t hop = window.hop();
    const OobSystem sys = build_oob_system(n, cfg.rho, cfg.delta_sl);
    const auto& q = adc.quantized;
    const auto& c = adc.folding_bits;

    // Outside the record the samples are held at the end values, so the first
    // difference is zero there.
    auto sample = [&](long i) {
        if (i < 0) return q.front();
        if (i >= static_cast<long>(n0)) return q.back();
        return q[static_cast<std::size_t>(i)];
    };

    // A lead-in segment one hop before the record gives the first real
    // segment a predecessor, so its tapered head is corrected like any other.
    std::vector<Segment> segments = segment_starts(n0, n, cfg.alpha);
    segments.insert(segments.begin(), Segment{-static_cast<long>(hop), n - hop});

    UnfoldResult result;
    std::vector<std::int64_t> jumps(n0, 0);
    SegmentCarry carry(window.taper());
    RealVector seg(n);
    IndexList folds;
    PreEstimate pre;

    for (std::size_t si = 0; si < segments.size(); ++si) {
        const long start = segments[si].start;
        for (std::size_t j = 0; j < n; ++j) seg[j] = sample(start + static_cast<long>(j));
        carry.prev_last_quantized = sample(start - 1);

        folds.clear();
        for (std::size_t j = 0; j < n; ++j) {
            const long idx = start + static_cast<long>(j);
            if (idx >= 0 && idx < static_cast<long>(n0) && c[static_cast<std::size_t>(idx)]) folds.push_back(j);
        }

        if (folds.empty()) {
            pre.windowed.assign(n, 0.0);
            ++result.segments_skipped;
        } else {
            const RealVector diffed = windowed_first_difference(seg, carry.prev_last_quantized, window);
            try {
                pre = residue_pre_estimate(diffed, folds, sys);
            } catch (const RecoveryError& e) {
                throw RecoveryError(std::string(e.what()) + " (segment starting at sample " +
                                        std::to_string(start) + ")",
                                    static_cast<long>(si));
            }
            result.worst_condition = std::max(result.worst_condition, pre.condition);
        }
        ++result.segments;

        const RealVector corrected = scaling_correction(pre.windowed, carry, cfg.alpha);
        const double period = 2.0 * lp;
        for (std::size_t j = 0; j < hop; ++j) {
            const long idx = start + static_cast<long>(j);
            if (idx < 0 || idx >= static_cast<long>(n0)) continue;
            jumps[static_cast<std::size_t>(idx)] = std::llround(corrected[j] / period);
        }
        if (si + 1 == segments.size()) {
            // No successor: the tail keeps its own (uncorrected) estimate.
            for (std::size_t j = hop; j < n; ++j) {
                const long idx = start + static_cast<long>(j);
                if (idx < static_cast<long>(n0))
                    jumps[static_cast<std::size_t>(idx)] = std::llround(pre.windowed[j] / period);
            }
        }
    }

    result.residue.resize(n0);
    RealVector unfolded(n0);
    std::int64_t running = 0;
    for (std::size_t i = 0; i < n0; ++i) {
        running += jumps[i];
        result.residue[i] = 2.0 * lp * static_cast<double>(running);
        unfolded[i] = q[i] - result.residue[i];
    }
    carry.running_folds = running;

    result.estimate = filter_zero_delay(unfolded, recovery_lowpass(cfg.rho, cfg.delta_sl, cfg.lpf_min_length));
    return result;
}

}  // namespace modunfold
