#include "modunfold/dsp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <unsupported/Eigen/FFT>

#include "modunfold/error.hpp"

namespace modunfold {

namespace {

constexpr double kPi = std::numbers::pi;

// Tolerance used when a real-valued boundary lands on an integer.
constexpr double kBoundaryTol = 1e-9;

Eigen::FFT<double>& thread_fft() {
    thread_local Eigen::FFT<double> fft;
    return fft;
}

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

double sinc(double x) {
    if (x == 0.0) return 1.0;
    return std::sin(kPi * x) / (kPi * x);
}

double kaiser_beta(double attenuation_db) {
    if (attenuation_db > 50.0) return 0.1102 * (attenuation_db - 8.7);
    if (attenuation_db >= 21.0)
        return 0.5842 * std::pow(attenuation_db - 21.0, 0.4) + 0.07886 * (attenuation_db - 21.0);
    return 0.0;
}

}  // namespace

ComplexSpectrum dft_normalized(std::span<const double> x) {
    if (x.empty()) throw InvalidArgument("dft_normalized: empty input");
    if (x.size() == 1) return {{Complex(x[0], 0.0)}};  // kissfft faults on a single point

    // The real-input fast path of kissfft assumes an even length.
    std::vector<Complex> in(x.begin(), x.end());
    std::vector<Complex> out;
    thread_fft().fwd(out, in);

    const double scale = 1.0 / std::sqrt(static_cast<double>(x.size()));
    for (auto& c : out) c *= scale;
    return {std::move(out)};
}

std::size_t TukeyWindow::taper() const noexcept {
    return static_cast<std::size_t>(std::llround(alpha * static_cast<double>(n))) / 2;
}

std::size_t TukeyWindow::hop() const noexcept { return n - taper(); }

TukeyWindow tukey_window(std::size_t n, double alpha) {
    if (n == 0) throw InvalidArgument("tukey_window: length must be positive");
    if (!(alpha > 0.0 && alpha <= 1.0))
        throw InvalidArgument("tukey_window: alpha must lie in (0, 1]");
    const double an = alpha * static_cast<double>(n);
    const long an_int = std::lround(an);
    if (std::abs(an - static_cast<double>(an_int)) > kBoundaryTol || an_int % 2 != 0)
        throw InvalidArgument("tukey_window: alpha*N = " + std::to_string(an) +
                              " is not an even integer");

    TukeyWindow w{n, alpha, std::vector<double>(n, 1.0)};
    const std::size_t edge = static_cast<std::size_t>(an_int) / 2;
    const std::size_t hop = n - edge;
    const double nd = static_cast<double>(n);
    for (std::size_t i = 0; i < edge; ++i) {
        const double t = static_cast<double>(i) / nd;
        w.coefficients[i] = 0.5 * (1.0 + std::cos(2.0 * kPi / alpha * (t - alpha / 2.0)));
    }
    // Right edge written as the complement of the left one so the overlap
    // sums to one up to a single rounding.
    for (std::size_t i = 0; i < edge; ++i) w.coefficients[hop + i] = 1.0 - w.coefficients[i];
    return w;
}

OobSystem build_oob_system(std::size_t n, double rho, double delta_sl) {
    if (n == 0) throw InvalidArgument("build_oob_system: N must be positive");
    if (!(rho > 0.0 && rho < 1.0))
        throw InvalidArgument("build_oob_system: rho must lie in (0, 1)");
    if (!(delta_sl >= 0.0 && delta_sl < kPi * (1.0 - rho)))
        throw InvalidArgument("build_oob_system: delta_sl must lie in [0, pi(1 - rho))");

    // 2 pi k / N in (rho pi + d, 2 pi - rho pi - d)  <=>  k in (lo, hi)
    const double nd = static_cast<double>(n);
    const double lo = nd * (rho + delta_sl / kPi) / 2.0;
    const double hi = nd * (2.0 - rho - delta_sl / kPi) / 2.0;
    const long kmin = static_cast<long>(std::floor(lo + kBoundaryTol)) + 1;
    const long kmax = static_cast<long>(std::ceil(hi - kBoundaryTol)) - 1;

    OobSystem sys;
    sys.n = n;
    sys.rho = rho;
    sys.delta_sl = delta_sl;
    for (long k = std::max(kmin, 0L); k <= kmax && k < static_cast<long>(n); ++k)
        sys.oob_bins.push_back(static_cast<std::size_t>(k));
    if (sys.oob_bins.empty())
        throw ConfigError("build_oob_system: no DFT bins in the out-of-band interval (N=" +
                          std::to_string(n) + ", rho=" + std::to_string(rho) + ")");

    const double scale = 1.0 / std::sqrt(nd);
    sys.v.resize(static_cast<Eigen::Index>(sys.k()), static_cast<Eigen::Index>(n));
    for (std::size_t r = 0; r < sys.k(); ++r) {
        const std::size_t k = sys.oob_bins[r];
        for (std::size_t c = 0; c < n; ++c) {
            // reduce k*c mod N first so the phase stays accurate for large N
            const double phase = -2.0 * kPi * static_cast<double>((k * c) % n) / nd;
            sys.v(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
                std::polar(scale, phase);
        }
    }
    return sys;
}

Eigen::MatrixXcd select_columns(const OobSystem& sys, std::span<const std::size_t> columns) {
    Eigen::MatrixXcd out(sys.v.rows(), static_cast<Eigen::Index>(columns.size()));
    std::vector<bool> seen(sys.n, false);
    for (std::size_t j = 0; j < columns.size(); ++j) {
        const std::size_t c = columns[j];
        if (c >= sys.n)
            throw InvalidArgument("select_columns: index " + std::to_string(c) +
                                  " out of range for N=" + std::to_string(sys.n));
        if (seen[c]) throw InvalidArgument("select_columns: duplicate index " + std::to_string(c));
        seen[c] = true;
        out.col(static_cast<Eigen::Index>(j)) = sys.v.col(static_cast<Eigen::Index>(c));
    }
    return out;
}

RealVector oob_gram_kernel(const OobSystem& sys) {
    const double nd = static_cast<double>(sys.n);
    RealVector g(sys.n, 0.0);
    for (std::size_t d = 0; d < sys.n; ++d) {
        double acc = 0.0;
        for (std::size_t k : sys.oob_bins)
            acc += std::cos(2.0 * kPi * static_cast<double>((k * d) % sys.n) / nd);
        g[d] = acc / nd;
    }
    return g;
}

double LeastSquaresResult::condition() const noexcept {
    if (sigma_min <= 0.0) return std::numeric_limits<double>::infinity();
    return sigma_max / sigma_min;
}

LeastSquaresResult least_squares_apply(const Eigen::MatrixXcd& a, const Eigen::VectorXcd& rhs) {
    if (a.rows() != rhs.size())
        throw InvalidArgument("least_squares_apply: rhs length does not match row count");
    if (a.cols() > a.rows())
        throw InvalidArgument("least_squares_apply: more unknowns than equations");

    LeastSquaresResult res;
    if (a.cols() == 0) {
        res.solution = Eigen::VectorXcd(0);
        return res;
    }

    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& s = svd.singularValues();
    res.sigma_max = s(0);
    res.sigma_min = s(s.size() - 1);
    const double rel = static_cast<double>(a.rows()) * std::numeric_limits<double>::epsilon();
    res.rank_tol = rel * res.sigma_max;
    svd.setThreshold(rel);
    res.rank = svd.rank();
    res.solution = svd.solve(rhs);
    return res;
}

double min_singular_value(const Eigen::MatrixXcd& a) {
    if (a.size() == 0) throw InvalidArgument("min_singular_value: empty matrix");
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(a);
    const auto& s = svd.singularValues();
    // A wide matrix has min(rows, cols) singular values; the columns cannot
    // all be independent, which the rank test must see as zero.
    if (a.cols() > a.rows()) return 0.0;
    return s(s.size() - 1);
}

double matrix_inf_norm(const Eigen::MatrixXcd& a) {
    if (a.size() == 0) return 0.0;
    return a.cwiseAbs().rowwise().sum().maxCoeff();
}

double matrix_inf_norm(const Eigen::MatrixXd& a) {
    if (a.size() == 0) return 0.0;
    return a.cwiseAbs().rowwise().sum().maxCoeff();
}

double FirLowpass::noise_gain() const {
    double acc = 0.0;
    for (double t : taps) acc += t * t;
    return acc;
}

std::size_t required_lowpass_length(double transition) {
    if (!(transition > 0.0)) throw InvalidArgument("required_lowpass_length: transition must be > 0");
    const double order = (kLowpassDesignAttenuationDb - 7.95) / (2.285 * transition);
    auto len = static_cast<std::size_t>(std::ceil(order)) + 1;
    if (len % 2 == 0) ++len;
    return len;
}

double lowpass_response(const FirLowpass& f, double omega) {
    const std::size_t mid = (f.length() - 1) / 2;
    double acc = f.taps[mid];
    // cos(i*omega) by rotation keeps this O(L) without per-term trig
    const Complex step = std::polar(1.0, omega);
    Complex rot = step;
    for (std::size_t i = 1; i <= mid; ++i) {
        acc += 2.0 * f.taps[mid + i] * rot.real();
        rot *= step;
        if (i % 64 == 0) rot /= std::abs(rot);
    }
    return acc;
}

FirLowpass design_lowpass(double cutoff, double transition, std::size_t length) {
    if (!(cutoff > 0.0 && cutoff < kPi))
        throw InvalidArgument("design_lowpass: cutoff must lie in (0, pi)");
    if (!(transition > 0.0) || cutoff + transition > kPi + kBoundaryTol)
        throw InvalidArgument("design_lowpass: need transition > 0 and cutoff + transition <= pi");
    if (length < 3 || length % 2 == 0)
        throw InvalidArgument("design_lowpass: length must be odd and >= 3");

    const std::size_t needed = required_lowpass_length(transition);
    if (length < needed)
        throw ConfigError("design_lowpass: length " + std::to_string(length) +
                          " too short for transition " + std::to_string(transition) +
                          " rad/sample; need at least " + std::to_string(needed) + " taps");

    FirLowpass f;
    f.cutoff = cutoff;
    f.transition = transition;
    f.taps.assign(length, 0.0);

    const double wc = cutoff + transition / 2.0;
    const double beta = kaiser_beta(kLowpassDesignAttenuationDb);
    const double i0_beta = std::cyl_bessel_i(0.0, beta);
    const std::size_t mid = (length - 1) / 2;
    for (std::size_t i = 0; i <= mid; ++i) {
        const double m = static_cast<double>(i) - static_cast<double>(mid);
        const double r = m / static_cast<double>(mid);
        const double win = std::cyl_bessel_i(0.0, beta * std::sqrt(std::max(0.0, 1.0 - r * r))) / i0_beta;
        const double h = (wc / kPi) * sinc(wc * m / kPi) * win;
        f.taps[i] = h;
        f.taps[length - 1 - i] = h;
    }
    double dc = 0.0;
    for (double t : f.taps) dc += t;
    for (double& t : f.taps) t /= dc;

    // Validate on a grid fine enough to resolve the ripple period 2 pi / L.
    const double step = kPi / (4.0 * static_cast<double>(length));
    const double max_pass_dev = std::pow(10.0, kLowpassMaxRippleDb / 20.0) - 1.0;
    const double max_stop = std::pow(10.0, -kLowpassMinStopbandDb / 20.0);
    auto fail = [&](const std::string& what) {
        throw ConfigError("design_lowpass: " + what + " at length " + std::to_string(length) +
                          "; try at least " + std::to_string(needed + 2 * (needed / 4) + 1) + " taps");
    };
    for (double w = 0.0; w <= cutoff; w += step)
        if (std::abs(lowpass_response(f, w) - 1.0) > max_pass_dev) fail("passband ripple exceeded");
    for (double w = cutoff + transition; w <= kPi; w += step)
        if (std::abs(lowpass_response(f, w)) > max_stop) fail("stopband attenuation not met");
    return f;
}

RealVector filter_zero_delay(std::span<const double> x, const FirLowpass& f) {
    const std::size_t len = f.length();
    if (len == 0 || len % 2 == 0) throw InvalidArgument("filter_zero_delay: filter length must be odd");
    if (x.size() < len)
        throw InvalidArgument("filter_zero_delay: signal (" + std::to_string(x.size()) +
                              " samples) shorter than filter (" + std::to_string(len) + " taps)");

    const std::size_t n0 = x.size();
    const std::size_t half = (len - 1) / 2;

    std::vector<double> padded(n0 + 2 * half);
    for (std::size_t k = 0; k < half; ++k) {
        padded[half - 1 - k] = x[k + 1];
        padded[half + n0 + k] = x[n0 - 2 - k];
    }
    std::copy(x.begin(), x.end(), padded.begin() + static_cast<std::ptrdiff_t>(half));

    const std::size_t full = padded.size() + len - 1;
    const std::size_t nfft = next_pow2(full);
    padded.resize(nfft, 0.0);
    std::vector<double> taps(f.taps);
    taps.resize(nfft, 0.0);

    auto& fft = thread_fft();
    std::vector<Complex> xs, hs;
    fft.fwd(xs, padded);
    fft.fwd(hs, taps);
    for (std::size_t k = 0; k < nfft; ++k) xs[k] *= hs[k];
    std::vector<double> y;
    fft.inv(y, xs);

    RealVector out(n0);
    for (std::size_t n = 0; n < n0; ++n) out[n] = y[n + 2 * half];
    return out;
}

}  // namespace modunfold
