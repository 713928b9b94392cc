#ifndef CWRU_DSP_HPP
#define CWRU_DSP_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

namespace cwru::dsp {

using cdouble = std::complex<double>;

namespace detail {

inline bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

// In-place iterative radix-2 Cooley-Tukey. n must be a power of two.
inline void fft_pow2(std::vector<cdouble>& a, bool inverse) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = (inverse ? 2.0 : -2.0) * std::numbers::pi / static_cast<double>(len);
        const cdouble wlen(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            cdouble w(1.0, 0.0);
            for (std::size_t k = 0; k < len / 2; ++k) {
                const cdouble u = a[i + k];
                const cdouble v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
    if (inverse) {
        for (auto& x : a) x /= static_cast<double>(n);
    }
}

// Bluestein's algorithm for arbitrary n (needed for the 452-point STFT).
inline void fft_bluestein(std::vector<cdouble>& a, bool inverse) {
    const std::size_t n = a.size();
    std::size_t m = 1;
    while (m < 2 * n + 1) m <<= 1;

    std::vector<cdouble> w(n);
    for (std::size_t k = 0; k < n; ++k) {
        // exp(-i*pi*k^2/n); k^2 mod 2n keeps the argument small.
        const std::uint64_t k2 = (static_cast<std::uint64_t>(k) * k) % (2 * n);
        const double ang = (inverse ? 1.0 : -1.0) * std::numbers::pi *
                           static_cast<double>(k2) / static_cast<double>(n);
        w[k] = cdouble(std::cos(ang), std::sin(ang));
    }

    std::vector<cdouble> x(m, cdouble(0, 0)), y(m, cdouble(0, 0));
    for (std::size_t k = 0; k < n; ++k) x[k] = a[k] * w[k];
    y[0] = std::conj(w[0]);
    for (std::size_t k = 1; k < n; ++k) y[k] = y[m - k] = std::conj(w[k]);

    fft_pow2(x, false);
    fft_pow2(y, false);
    for (std::size_t k = 0; k < m; ++k) x[k] *= y[k];
    fft_pow2(x, true);

    for (std::size_t k = 0; k < n; ++k) a[k] = x[k] * w[k];
    if (inverse) {
        for (auto& v : a) v /= static_cast<double>(n);
    }
}

}  // namespace detail

// Discrete Fourier transform of arbitrary length, unscaled forward,
// 1/N-scaled inverse.
inline std::vector<cdouble> fft(std::vector<cdouble> a, bool inverse = false) {
    if (a.empty()) return a;
    if (detail::is_pow2(a.size()))
        detail::fft_pow2(a, inverse);
    else
        detail::fft_bluestein(a, inverse);
    return a;
}

inline std::vector<cdouble> fft_real(const std::vector<double>& x) {
    std::vector<cdouble> a(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) a[i] = cdouble(x[i], 0.0);
    return fft(std::move(a));
}

// ---------------------------------------------------------------------------
// Resampling 48 kHz -> 12 kHz.
// Linear-phase windowed-sinc low-pass (Kaiser), cutoff 0.8x the new Nyquist,
// then every 4th sample. Stop-band attenuation design target 90 dB, well past
// the 60 dB contract.

namespace detail {

inline double bessel_i0(double x) {
    // Series expansion; converges fast for the beta values used here.
    double sum = 1.0, term = 1.0;
    for (int k = 1; k < 64; ++k) {
        term *= (x / (2.0 * k)) * (x / (2.0 * k));
        sum += term;
        if (term < 1e-18 * sum) break;
    }
    return sum;
}

inline std::vector<double> kaiser_lowpass(std::size_t taps, double cutoff, double beta) {
    std::vector<double> h(taps);
    const double mid = static_cast<double>(taps - 1) / 2.0;
    const double i0b = bessel_i0(beta);
    for (std::size_t i = 0; i < taps; ++i) {
        const double t = static_cast<double>(i) - mid;
        const double sinc = (t == 0.0) ? 2.0 * cutoff
                                       : std::sin(2.0 * std::numbers::pi * cutoff * t) /
                                             (std::numbers::pi * t);
        const double r = 2.0 * (static_cast<double>(i) / (taps - 1)) - 1.0;
        const double win = bessel_i0(beta * std::sqrt(std::max(0.0, 1.0 - r * r))) / i0b;
        h[i] = sinc * win;
    }
    return h;
}

}  // namespace detail

inline constexpr std::size_t kResampleTaps = 301;

// 4:1 decimation with anti-aliasing; output length floor(len/4).
inline std::vector<double> resample_4to1(const std::vector<double>& x) {
    static const std::vector<double> h =
        detail::kaiser_lowpass(kResampleTaps, 0.8 * 0.125, 8.6);  // cutoff 4.8 kHz at 48 kHz
    if (x.size() < h.size())
        throw std::invalid_argument("resample_4to1: input shorter than filter (" +
                                    std::to_string(h.size()) + " taps)");
    const std::size_t out_len = x.size() / 4;
    const std::ptrdiff_t half = static_cast<std::ptrdiff_t>(h.size() - 1) / 2;
    std::vector<double> y(out_len);
    for (std::size_t m = 0; m < out_len; ++m) {
        const std::ptrdiff_t center = static_cast<std::ptrdiff_t>(4 * m);
        double acc = 0.0;
        for (std::size_t k = 0; k < h.size(); ++k) {
            const std::ptrdiff_t idx = center - half + static_cast<std::ptrdiff_t>(k);
            if (idx >= 0 && idx < static_cast<std::ptrdiff_t>(x.size()))
                acc += h[k] * x[static_cast<std::size_t>(idx)];
        }
        y[m] = acc;
    }
    return y;
}

// ---------------------------------------------------------------------------
// Segmentation.

struct SegmentationSpec {
    std::size_t window_length = 0;
    double overlap_fraction = 0.0;  // in [0,1)

    std::size_t hop() const {
        const double h = std::round(static_cast<double>(window_length) * (1.0 - overlap_fraction));
        return std::max<std::size_t>(1, static_cast<std::size_t>(h));
    }
};

inline std::vector<std::vector<double>> segment(const std::vector<double>& x,
                                                const SegmentationSpec& spec) {
    const std::size_t w = spec.window_length;
    if (x.size() < w)
        throw std::invalid_argument("segment: signal shorter than window (" +
                                    std::to_string(x.size()) + " < " + std::to_string(w) + ")");
    const std::size_t hop = spec.hop();
    const std::size_t count = (x.size() - w) / hop + 1;
    std::vector<std::vector<double>> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i)
        out.emplace_back(x.begin() + static_cast<std::ptrdiff_t>(i * hop),
                         x.begin() + static_cast<std::ptrdiff_t>(i * hop + w));
    return out;
}

// ---------------------------------------------------------------------------
// Spectral representations.

inline constexpr std::size_t kSpectrumWindow = 4096;
inline constexpr std::size_t kTimeWindow = 2048;
inline constexpr std::size_t kSpectrogramWindow = 11500;
inline constexpr double kCepstrumEpsilon = 1e-12;

// One-sided DFT magnitude: bins 0..2047 (DC kept, Nyquist dropped), no scaling.
inline std::vector<double> spectrum(const std::vector<double>& x) {
    if (x.size() != kSpectrumWindow)
        throw std::invalid_argument("spectrum: expected length 4096, got " +
                                    std::to_string(x.size()));
    auto X = fft_real(x);
    std::vector<double> mag(kSpectrumWindow / 2);
    for (std::size_t k = 0; k < mag.size(); ++k) mag[k] = std::abs(X[k]);
    return mag;
}

// Power spectrum of the log of the power spectrum:
//   P = |DFT(x)|^2, one-sided (2048); L = ln(P + eps); C = |DFT(L)|^2, one-sided (1024).
inline std::vector<double> power_cepstrum(const std::vector<double>& x) {
    if (x.size() != kSpectrumWindow)
        throw std::invalid_argument("power_cepstrum: expected length 4096, got " +
                                    std::to_string(x.size()));
    auto X = fft_real(x);
    std::vector<double> log_power(kSpectrumWindow / 2);
    for (std::size_t k = 0; k < log_power.size(); ++k)
        log_power[k] = std::log(std::norm(X[k]) + kCepstrumEpsilon);
    auto L = fft_real(log_power);
    std::vector<double> c(kSpectrumWindow / 4);
    for (std::size_t k = 0; k < c.size(); ++k) c[k] = std::norm(L[k]);
    return c;
}

struct Matrix {
    std::size_t rows = 0, cols = 0;
    std::vector<double> data;  // row-major

    double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

inline constexpr std::size_t kStftWindow = 104;
inline constexpr std::size_t kStftOverlap = 54;
inline constexpr std::size_t kStftHop = kStftWindow - kStftOverlap;  // 50
inline constexpr std::size_t kStftNfft = 452;
inline constexpr std::size_t kSpectrogramSide = 224;

// Periodic Hann analysis window, length 104.
inline const std::vector<double>& stft_window() {
    static const std::vector<double> w = [] {
        std::vector<double> v(kStftWindow);
        for (std::size_t n = 0; n < kStftWindow; ++n)
            v[n] = 0.5 * (1.0 - std::cos(2.0 * std::numbers::pi * static_cast<double>(n) /
                                         static_cast<double>(kStftWindow)));
        return v;
    }();
    return w;
}

// STFT magnitude: 227 frequency rows (one-sided bins 0..226 of the 452-point
// DFT) x 228 frames. No log scaling is applied; magnitudes only.
inline Matrix spectrogram_uncropped(const std::vector<double>& x) {
    if (x.size() != kSpectrogramWindow)
        throw std::invalid_argument("spectrogram: expected length 11500, got " +
                                    std::to_string(x.size()));
    const std::size_t frames = (x.size() - kStftWindow) / kStftHop + 1;  // 228
    const std::size_t bins = kStftNfft / 2 + 1;                          // 227
    const auto& win = stft_window();
    Matrix m{bins, frames, std::vector<double>(bins * frames)};
    std::vector<cdouble> frame(kStftNfft);
    for (std::size_t f = 0; f < frames; ++f) {
        std::fill(frame.begin(), frame.end(), cdouble(0, 0));
        for (std::size_t n = 0; n < kStftWindow; ++n)
            frame[n] = cdouble(x[f * kStftHop + n] * win[n], 0.0);
        auto F = fft(frame);
        for (std::size_t b = 0; b < bins; ++b) m.at(b, f) = std::abs(F[b]);
    }
    return m;
}

// Lower-left 224x224 crop: lowest 224 frequencies, first 224 frames.
inline Matrix spectrogram(const std::vector<double>& x) {
    Matrix full = spectrogram_uncropped(x);
    Matrix out{kSpectrogramSide, kSpectrogramSide,
               std::vector<double>(kSpectrogramSide * kSpectrogramSide)};
    for (std::size_t r = 0; r < kSpectrogramSide; ++r)
        for (std::size_t c = 0; c < kSpectrogramSide; ++c) out.at(r, c) = full.at(r, c);
    return out;
}

// ---------------------------------------------------------------------------
// Pooled z-score normalization. One scalar mean and one scalar std over every
// element of every training input; population (divide-by-N) convention.

struct ZScoreStats {
    double mean = 0.0;
    double std = 1.0;
};

template <typename InputRange>
ZScoreStats fit_zscore(const InputRange& train_inputs) {
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& input : train_inputs)
        for (double v : input) {
            sum += v;
            ++n;
        }
    if (n == 0) throw std::invalid_argument("fit_zscore: empty training pool");
    const double mean = sum / static_cast<double>(n);
    double ss = 0.0;
    for (const auto& input : train_inputs)
        for (double v : input) ss += (v - mean) * (v - mean);
    const double var = ss / static_cast<double>(n);
    if (var <= 0.0) throw std::invalid_argument("fit_zscore: zero-variance training pool");
    return {mean, std::sqrt(var)};
}

template <typename InputRange>
void apply_zscore(InputRange& inputs, const ZScoreStats& stats) {
    for (auto& input : inputs)
        for (auto& v : input) {
            using Elem = std::remove_reference_t<decltype(v)>;
            v = static_cast<Elem>((static_cast<double>(v) - stats.mean) / stats.std);
        }
}

}  // namespace cwru::dsp

#endif  // CWRU_DSP_HPP
