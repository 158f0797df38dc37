#pragma once

// Numeric primitives shared by the acquisition, recovery and theory code:
// the unitary DFT, the out-of-band partial DFT system, rank-revealing least
// squares, the Tukey window and a linear-phase FIR lowpass.

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace modunfold {

using Complex = std::complex<double>;
using RealVector = std::vector<double>;
using IndexList = std::vector<std::size_t>;

struct ComplexSpectrum {
    std::vector<Complex> bins;

    std::size_t n() const noexcept { return bins.size(); }
};

// bins[k] = N^{-1/2} sum_n x[n] exp(-j 2 pi k n / N)
ComplexSpectrum dft_normalized(std::span<const double> x);

struct TukeyWindow {
    std::size_t n = 0;
    double alpha = 0.0;
    std::vector<double> coefficients;

    // alpha*N/2: length of each tapered edge, and of the segment overlap.
    std::size_t taper() const noexcept;
    // N(1 - alpha/2): distance between consecutive segment starts.
    std::size_t hop() const noexcept;
};

// Tapered cosine window of length n. alpha*n must be an even integer and
// 0 < alpha <= 1. The two edges are complementary:
//   w[i] + w[i + hop()] == 1 for i < taper().
TukeyWindow tukey_window(std::size_t n, double alpha);

// Rows of the unitary DFT matrix restricted to the bins strictly inside
// (rho*pi + delta_sl, 2*pi - rho*pi - delta_sl).
struct OobSystem {
    std::size_t n = 0;
    double rho = 0.0;
    double delta_sl = 0.0;
    IndexList oob_bins;
    Eigen::MatrixXcd v;  // K x N, v(r, c) = exp(-j 2 pi c oob_bins[r] / N) / sqrt(N)

    std::size_t k() const noexcept { return oob_bins.size(); }
};

OobSystem build_oob_system(std::size_t n, double rho, double delta_sl);

// Columns of sys.v listed in `columns`, in that order.
Eigen::MatrixXcd select_columns(const OobSystem& sys, std::span<const std::size_t> columns);

// Real kernel g[d], d = 0..N-1, with (V^H V)(m, n) = g[(m - n) mod N].
// V^H V is the projector onto the out-of-band subspace; it is circulant and,
// because the band is conjugate symmetric, real.
RealVector oob_gram_kernel(const OobSystem& sys);

struct LeastSquaresResult {
    Eigen::VectorXcd solution;  // minimum-norm minimizer of |a x - rhs|_2
    Eigen::Index rank = 0;
    double sigma_min = 0.0;
    double sigma_max = 0.0;
    double rank_tol = 0.0;  // rows * eps * sigma_max

    bool full_column_rank() const noexcept { return rank == solution.size(); }
    double condition() const noexcept;
};

LeastSquaresResult least_squares_apply(const Eigen::MatrixXcd& a, const Eigen::VectorXcd& rhs);

double min_singular_value(const Eigen::MatrixXcd& a);

// Induced infinity norm: max_i sum_j |a(i, j)|.
double matrix_inf_norm(const Eigen::MatrixXcd& a);
double matrix_inf_norm(const Eigen::MatrixXd& a);

struct FirLowpass {
    std::vector<double> taps;
    double cutoff = 0.0;      // passband edge, rad/sample
    double transition = 0.0;  // stopband starts at cutoff + transition

    std::size_t length() const noexcept { return taps.size(); }
    // Gain of the filter for unit-variance white noise, sum_i taps[i]^2,
    // i.e. the noise-equivalent bandwidth as a fraction of pi.
    double noise_gain() const;
};

// Stopband the designer aims for; the guaranteed figures are weaker.
inline constexpr double kLowpassDesignAttenuationDb = 90.0;
inline constexpr double kLowpassMinStopbandDb = 60.0;
inline constexpr double kLowpassMaxRippleDb = 0.01;
inline constexpr std::size_t kDefaultLowpassLength = 257;

// Shortest odd length whose Kaiser-windowed sinc reaches the design
// attenuation over a transition band of the given width.
std::size_t required_lowpass_length(double transition);

// Kaiser-windowed sinc with its ideal edge at cutoff + transition/2.
// Throws ConfigError when the validated response misses the ripple or
// stopband limits at the given length.
FirLowpass design_lowpass(double cutoff, double transition,
                          std::size_t length = kDefaultLowpassLength);

// Amplitude response at omega (taps are symmetric, so it is real).
double lowpass_response(const FirLowpass& f, double omega);

// Linear convolution aligned so that out[n] corresponds to x[n]; both ends
// are reflect-padded by (length - 1)/2 samples.
RealVector filter_zero_delay(std::span<const double> x, const FirLowpass& f);

}  // namespace modunfold
