#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "dvn/matrix.hpp"

namespace dvn {

// In-place radix-2 FFT; size must be a power of two. The inverse includes
// the 1/N normalization.
void fft_inplace(std::vector<std::complex<double>>& x, bool inverse);

std::size_t next_pow2(std::size_t n);

// Periodic Hann window (sums to a constant at 50% overlap).
std::vector<double> hann_window(std::size_t length);

struct StftConfig {
    std::size_t fft_length = 2048;    // power of two, >= window_length
    std::size_t window_length = 256;  // samples
    std::size_t hop = 128;            // samples; window_length/2 unless overridden

    void validate() const;
    std::size_t num_bins() const { return fft_length / 2 + 1; }
};

// Magnitudes of bins 0..fft_length/2, one column per frame. Frames start at
// multiples of hop; a trailing partial frame is zero-padded rather than
// dropped so the decay tail stays in the fit.
Matrix stft_magnitudes(std::span<const double> signal, const StftConfig& config);

std::size_t stft_num_frames(std::size_t signal_length, const StftConfig& config);

// Allpole filter b0 / (1 + a1 z^-1 + ... + aP z^-P).
struct AllpoleFilter {
    double b0 = 1.0;
    std::vector<double> a;  // a1..aP

    std::size_t order() const { return a.size(); }
    bool is_stable() const;
};

// Levinson-Durbin on autocorrelation lags r[0..P]; r[0] gets a 1e-9
// relative bump to guard near-singular frames. Gain is left at 1.
AllpoleFilter lp_from_autocorr(std::span<const double> autocorr, std::size_t order);

// LP fit to a magnitude spectrum (bins 0..fft_length/2): the autocorrelation
// is the inverse transform of the squared magnitudes. Gain is set so the
// filter's mean-square magnitude matches the frame's.
AllpoleFilter lp_from_magnitudes(std::span<const double> magnitudes, std::size_t order,
                                 std::size_t fft_length);

// LP fit to a time-domain frame (biased autocorrelation estimate).
AllpoleFilter lp_from_signal(std::span<const double> frame, std::size_t order);

// |b0 / A(w)| on bins 0..fft_length/2.
std::vector<double> allpole_magnitudes(const AllpoleFilter& filter, std::size_t fft_length);

std::vector<double> apply_allpole(const AllpoleFilter& filter, std::span<const double> signal);
// FIR numerator (1 + sum a_k z^-k) / b0; exact inverse of apply_allpole.
std::vector<double> apply_inverse(const AllpoleFilter& filter, std::span<const double> signal);

// First-order DC blocker (1 - z^-1) / (1 - R z^-1).
struct DcBlocker {
    double pole_radius = 0.995;  // R in (0, 1)
};

// |Hdc(w)| on bins 0..fft_length/2.
std::vector<double> dc_blocker_magnitudes(double pole_radius, std::size_t fft_length);

// |(1 - R z^-1) / (1 - 0.9999 z^-1)| on the same grid: the softened inverse
// response. Whitening divides STFT frames by the blocker in this magnitude
// form; a time-domain inverse would smear early energy into a long
// low-frequency tail and corrupt the fitted decay.
std::vector<double> dc_blocker_inverse_magnitudes(double pole_radius, std::size_t fft_length);

std::vector<double> apply_dc_blocker(const DcBlocker& dc, std::span<const double> signal);
// Inverse with the unit-circle pole softened to radius 0.9999.
std::vector<double> apply_dc_blocker_inverse(const DcBlocker& dc, std::span<const double> signal);

inline constexpr double kDcInverseSoftPole = 0.9999;

// Grid search over R in {0.90..0.99 step .01, 0.991..0.999 step .001,
// 0.9991..0.9999 step .0001} minimizing squared dB error against the
// low-frequency (< 200 Hz) roll-off of the whitened first-frame spectrum.
// Falls back to R = 0.995 when the low band is flat within 1 dB.
DcBlocker fit_dc_blocker(std::span<const double> whitened_first_frame_mags, double sample_rate,
                         std::size_t fft_length);

// Linear convolution via FFT, length a + b - 1.
std::vector<double> fft_convolve(std::span<const double> a, std::span<const double> b);

}  // namespace dvn
