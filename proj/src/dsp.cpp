#include "dvn/dsp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "dvn/errors.hpp"

namespace dvn {

namespace {
constexpr double kPi = std::numbers::pi;
}

std::size_t next_pow2(std::size_t n) {
    std::size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

void fft_inplace(std::vector<std::complex<double>>& x, bool inverse) {
    const std::size_t n = x.size();
    if (n == 0 || (n & (n - 1)) != 0)
        throw std::invalid_argument("fft_inplace: size must be a nonzero power of two");

    // bit-reversal permutation
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(x[i], x[j]);
    }

    for (std::size_t len = 2; len <= n; len <<= 1) {
        double angle = 2.0 * kPi / static_cast<double>(len) * (inverse ? 1.0 : -1.0);
        std::complex<double> wlen(std::cos(angle), std::sin(angle));
        for (std::size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (std::size_t j = 0; j < len / 2; ++j) {
                std::complex<double> u = x[i + j];
                std::complex<double> v = x[i + j + len / 2] * w;
                x[i + j] = u + v;
                x[i + j + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
    if (inverse) {
        double inv_n = 1.0 / static_cast<double>(n);
        for (auto& v : x) v *= inv_n;
    }
}

std::vector<double> hann_window(std::size_t length) {
    std::vector<double> w(length);
    for (std::size_t n = 0; n < length; ++n)
        w[n] = 0.5 * (1.0 - std::cos(2.0 * kPi * static_cast<double>(n) / static_cast<double>(length)));
    return w;
}

void StftConfig::validate() const {
    if (fft_length == 0 || (fft_length & (fft_length - 1)) != 0)
        throw std::invalid_argument("StftConfig: fft_length must be a power of two");
    if (window_length == 0 || window_length > fft_length)
        throw std::invalid_argument("StftConfig: window_length must be in [1, fft_length]");
    if (hop == 0) throw std::invalid_argument("StftConfig: hop must be positive");
}

std::size_t stft_num_frames(std::size_t signal_length, const StftConfig& config) {
    if (signal_length < config.window_length)
        throw numeric_error("stft: signal shorter than one analysis window");
    std::size_t nf = (signal_length - config.window_length) / config.hop + 1;
    if ((nf - 1) * config.hop + config.window_length < signal_length) ++nf;  // zero-padded tail frame
    return nf;
}

Matrix stft_magnitudes(std::span<const double> signal, const StftConfig& config) {
    config.validate();
    if (signal.empty()) throw std::invalid_argument("stft: empty signal");
    const std::size_t nf = stft_num_frames(signal.size(), config);
    const std::size_t bins = config.num_bins();
    const std::vector<double> window = hann_window(config.window_length);

    Matrix mags(bins, nf);
    std::vector<std::complex<double>> buf(config.fft_length);
    for (std::size_t f = 0; f < nf; ++f) {
        std::fill(buf.begin(), buf.end(), std::complex<double>(0.0, 0.0));
        const std::size_t start = f * config.hop;
        for (std::size_t n = 0; n < config.window_length; ++n) {
            std::size_t idx = start + n;
            if (idx >= signal.size()) break;
            buf[n] = signal[idx] * window[n];
        }
        fft_inplace(buf, false);
        auto col = mags.col(f);
        for (std::size_t k = 0; k < bins; ++k) col[k] = std::abs(buf[k]);
    }
    return mags;
}

bool AllpoleFilter::is_stable() const {
    // Step-down recursion: stable iff every reflection coefficient < 1.
    std::vector<double> c(a.begin(), a.end());
    for (std::size_t p = c.size(); p > 0; --p) {
        double k = c[p - 1];
        if (std::abs(k) >= 1.0) return false;
        if (p == 1) break;
        std::vector<double> prev(p - 1);
        double denom = 1.0 - k * k;
        for (std::size_t i = 0; i < p - 1; ++i) prev[i] = (c[i] - k * c[p - 2 - i]) / denom;
        c = std::move(prev);
    }
    return true;
}

AllpoleFilter lp_from_autocorr(std::span<const double> autocorr, std::size_t order) {
    if (order < 1) throw std::invalid_argument("lp_from_autocorr: order must be >= 1");
    if (autocorr.size() < order + 1)
        throw std::invalid_argument("lp_from_autocorr: need lags 0..order");
    double r0 = autocorr[0] * (1.0 + 1e-9);  // guard positive-definiteness
    if (r0 <= 0.0) throw numeric_error("lp_from_autocorr: zero-energy frame");

    std::vector<double> a;  // a1..ap so far
    double err = r0;
    for (std::size_t p = 1; p <= order; ++p) {
        double acc = autocorr[p];
        for (std::size_t j = 1; j < p; ++j) acc += a[j - 1] * autocorr[p - j];
        double k = -acc / err;
        if (!(std::abs(k) < 1.0))
            throw numeric_error("lp_from_autocorr: reflection coefficient magnitude >= 1 at order " +
                                std::to_string(p));
        std::vector<double> next(p);
        for (std::size_t j = 1; j < p; ++j) next[j - 1] = a[j - 1] + k * a[p - 1 - j];
        next[p - 1] = k;
        a = std::move(next);
        err *= (1.0 - k * k);
    }
    AllpoleFilter f;
    f.b0 = 1.0;
    f.a = std::move(a);
    return f;
}

namespace {

// Mean over the full (symmetric) FFT grid given values on bins 0..N/2.
double full_grid_mean(std::span<const double> half, std::size_t fft_length) {
    double sum = half[0] + half[half.size() - 1];
    for (std::size_t k = 1; k + 1 < half.size(); ++k) sum += 2.0 * half[k];
    return sum / static_cast<double>(fft_length);
}

}  // namespace

AllpoleFilter lp_from_magnitudes(std::span<const double> magnitudes, std::size_t order,
                                 std::size_t fft_length) {
    if (magnitudes.size() != fft_length / 2 + 1)
        throw std::invalid_argument("lp_from_magnitudes: expected fft_length/2+1 bins");
    // Autocorrelation as the inverse transform of the squared magnitudes.
    std::vector<std::complex<double>> power(fft_length);
    for (std::size_t k = 0; k < magnitudes.size(); ++k) {
        double p = magnitudes[k] * magnitudes[k];
        power[k] = p;
        if (k > 0 && k < fft_length / 2) power[fft_length - k] = p;
    }
    fft_inplace(power, true);
    std::vector<double> r(order + 1);
    for (std::size_t k = 0; k <= order; ++k) r[k] = power[k].real();

    AllpoleFilter f = lp_from_autocorr(r, order);

    // Match the frame's mean-square magnitude.
    std::vector<double> inv_a = allpole_magnitudes(AllpoleFilter{1.0, f.a}, fft_length);
    for (auto& v : inv_a) v *= v;
    std::vector<double> mag2(magnitudes.size());
    for (std::size_t k = 0; k < magnitudes.size(); ++k) mag2[k] = magnitudes[k] * magnitudes[k];
    double frame_ms = full_grid_mean(mag2, fft_length);
    double filt_ms = full_grid_mean(inv_a, fft_length);
    f.b0 = std::sqrt(frame_ms / filt_ms);
    return f;
}

AllpoleFilter lp_from_signal(std::span<const double> frame, std::size_t order) {
    if (frame.size() <= order)
        throw std::invalid_argument("lp_from_signal: frame shorter than order+1");
    std::vector<double> r(order + 1, 0.0);
    for (std::size_t lag = 0; lag <= order; ++lag)
        for (std::size_t n = lag; n < frame.size(); ++n) r[lag] += frame[n] * frame[n - lag];
    return lp_from_autocorr(r, order);
}

std::vector<double> allpole_magnitudes(const AllpoleFilter& filter, std::size_t fft_length) {
    const std::size_t bins = fft_length / 2 + 1;
    std::vector<double> mags(bins);
    for (std::size_t k = 0; k < bins; ++k) {
        double w = 2.0 * kPi * static_cast<double>(k) / static_cast<double>(fft_length);
        double re = 1.0, im = 0.0;
        for (std::size_t j = 0; j < filter.a.size(); ++j) {
            re += filter.a[j] * std::cos(w * static_cast<double>(j + 1));
            im -= filter.a[j] * std::sin(w * static_cast<double>(j + 1));
        }
        mags[k] = std::abs(filter.b0) / std::hypot(re, im);
    }
    return mags;
}

std::vector<double> apply_allpole(const AllpoleFilter& filter, std::span<const double> signal) {
    if (!filter.is_stable()) throw numeric_error("apply_allpole: unstable filter");
    std::vector<double> out(signal.size());
    const std::size_t p = filter.order();
    for (std::size_t n = 0; n < signal.size(); ++n) {
        double acc = filter.b0 * signal[n];
        for (std::size_t k = 1; k <= p && k <= n; ++k) acc -= filter.a[k - 1] * out[n - k];
        out[n] = acc;
    }
    return out;
}

std::vector<double> apply_inverse(const AllpoleFilter& filter, std::span<const double> signal) {
    if (filter.b0 == 0.0) throw std::invalid_argument("apply_inverse: zero gain");
    std::vector<double> out(signal.size());
    const std::size_t p = filter.order();
    for (std::size_t n = 0; n < signal.size(); ++n) {
        double acc = signal[n];
        for (std::size_t k = 1; k <= p && k <= n; ++k) acc += filter.a[k - 1] * signal[n - k];
        out[n] = acc / filter.b0;
    }
    return out;
}

std::vector<double> dc_blocker_magnitudes(double pole_radius, std::size_t fft_length) {
    const std::size_t bins = fft_length / 2 + 1;
    std::vector<double> mags(bins);
    for (std::size_t k = 0; k < bins; ++k) {
        double w = 2.0 * kPi * static_cast<double>(k) / static_cast<double>(fft_length);
        double num = 2.0 - 2.0 * std::cos(w);
        double den = 1.0 + pole_radius * pole_radius - 2.0 * pole_radius * std::cos(w);
        mags[k] = std::sqrt(num / den);
    }
    return mags;
}

std::vector<double> dc_blocker_inverse_magnitudes(double pole_radius, std::size_t fft_length) {
    const std::size_t bins = fft_length / 2 + 1;
    std::vector<double> mags(bins);
    const double soft = kDcInverseSoftPole;
    for (std::size_t k = 0; k < bins; ++k) {
        double w = 2.0 * kPi * static_cast<double>(k) / static_cast<double>(fft_length);
        double num = 1.0 + pole_radius * pole_radius - 2.0 * pole_radius * std::cos(w);
        double den = 1.0 + soft * soft - 2.0 * soft * std::cos(w);
        mags[k] = std::sqrt(num / den);
    }
    return mags;
}

std::vector<double> apply_dc_blocker(const DcBlocker& dc, std::span<const double> signal) {
    if (dc.pole_radius <= 0.0 || dc.pole_radius >= 1.0)
        throw std::invalid_argument("apply_dc_blocker: pole radius outside (0,1)");
    std::vector<double> out(signal.size());
    double x1 = 0.0, y1 = 0.0;
    for (std::size_t n = 0; n < signal.size(); ++n) {
        out[n] = signal[n] - x1 + dc.pole_radius * y1;
        x1 = signal[n];
        y1 = out[n];
    }
    return out;
}

std::vector<double> apply_dc_blocker_inverse(const DcBlocker& dc, std::span<const double> signal) {
    // (1 - R z^-1) / (1 - 0.9999 z^-1): the exact inverse pole sits on the
    // unit circle, softened here to keep the filter stable.
    std::vector<double> out(signal.size());
    double x1 = 0.0, y1 = 0.0;
    for (std::size_t n = 0; n < signal.size(); ++n) {
        out[n] = signal[n] - dc.pole_radius * x1 + kDcInverseSoftPole * y1;
        x1 = signal[n];
        y1 = out[n];
    }
    return out;
}

DcBlocker fit_dc_blocker(std::span<const double> whitened_first_frame_mags, double sample_rate,
                         std::size_t fft_length) {
    const std::size_t bins = whitened_first_frame_mags.size();
    const double bin_hz = sample_rate / static_cast<double>(fft_length);

    // Reference level: mean dB over 200 Hz .. 16 kHz (or what exists of it).
    double ref_sum = 0.0;
    std::size_t ref_count = 0;
    std::vector<std::size_t> low_bins;
    for (std::size_t k = 1; k < bins; ++k) {
        double f = bin_hz * static_cast<double>(k);
        double mag = whitened_first_frame_mags[k];
        if (mag <= 0.0) continue;
        if (f < 200.0) {
            low_bins.push_back(k);
        } else if (f <= 16000.0) {
            ref_sum += 20.0 * std::log10(mag);
            ++ref_count;
        }
    }
    if (low_bins.empty() || ref_count == 0) return DcBlocker{0.995};
    double ref_db = ref_sum / static_cast<double>(ref_count);

    std::vector<double> resid_db(low_bins.size());
    double max_abs = 0.0;
    for (std::size_t i = 0; i < low_bins.size(); ++i) {
        resid_db[i] = 20.0 * std::log10(whitened_first_frame_mags[low_bins[i]]) - ref_db;
        max_abs = std::max(max_abs, std::abs(resid_db[i]));
    }
    if (max_abs <= 1.0) return DcBlocker{0.995};  // flat low band

    std::vector<double> grid;
    for (int i = 0; i <= 9; ++i) grid.push_back(0.90 + 0.01 * i);
    for (int i = 1; i <= 9; ++i) grid.push_back(0.99 + 0.001 * i);
    for (int i = 1; i <= 9; ++i) grid.push_back(0.999 + 0.0001 * i);

    double best_r = grid.front();
    double best_err = std::numeric_limits<double>::infinity();
    for (double r : grid) {
        std::vector<double> h = dc_blocker_magnitudes(r, fft_length);
        double err = 0.0;
        for (std::size_t i = 0; i < low_bins.size(); ++i) {
            double d = 20.0 * std::log10(h[low_bins[i]]) - resid_db[i];
            err += d * d;
        }
        if (err < best_err) {
            best_err = err;
            best_r = r;
        }
    }
    return DcBlocker{best_r};
}

std::vector<double> fft_convolve(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("fft_convolve: empty input");
    const std::size_t out_len = a.size() + b.size() - 1;
    const std::size_t n = next_pow2(out_len);
    std::vector<std::complex<double>> fa(n), fb(n);
    for (std::size_t i = 0; i < a.size(); ++i) fa[i] = a[i];
    for (std::size_t i = 0; i < b.size(); ++i) fb[i] = b[i];
    fft_inplace(fa, false);
    fft_inplace(fb, false);
    for (std::size_t i = 0; i < n; ++i) fa[i] *= fb[i];
    fft_inplace(fa, true);
    std::vector<double> out(out_len);
    for (std::size_t i = 0; i < out_len; ++i) out[i] = fa[i].real();
    return out;
}

}  // namespace dvn
