#pragma once

#include <span>
#include <string>
#include <vector>

#include "dvn/dsp.hpp"
#include "dvn/matrix.hpp"

namespace dvn {

// Schroeder backward integration, normalized so EDC(0) = 0 dB. The all-zero
// tail is clamped to kDbFloor.
inline constexpr double kDbFloor = -120.0;
std::vector<double> schroeder_edc(std::span<const double> ir);

// Fourth-order bandpass (cascaded second-order Butterworth highpass at f_lo
// and lowpass at f_hi).
std::vector<double> bandpass(std::span<const double> signal, double f_lo, double f_hi,
                             double sample_rate);

std::vector<double> schroeder_edc_band(std::span<const double> ir, double f_lo, double f_hi,
                                       double sample_rate);

// T20 convention: least-squares line through the -5..-25 dB span of the EDC,
// extrapolated to -60 dB. Returns seconds.
double estimate_t60(std::span<const double> edc_db, double sample_rate);

// Octave band centers c with f_min <= c <= f_max (base 1000 Hz, edges at
// c/sqrt(2) and c*sqrt(2)), restricted below Nyquist.
std::vector<double> octave_band_centers(double f_min, double f_max, double sample_rate);

struct BandT60 {
    double center_hz = 0.0;
    double t60_target = 0.0;
    double t60_model = 0.0;
    double error_pct = 0.0;
    bool valid = false;  // false when a band never decays 25 dB
};

struct T60Error {
    double mean_pct = 0.0;
    double max_pct = 0.0;
    std::vector<BandT60> bands;
};

T60Error t60_error(std::span<const double> model_ir, std::span<const double> target_ir,
                   double sample_rate, double f_min = 125.0, double f_max = 8000.0);

// STFT magnitudes in dB relative to the matrix peak, floored at kDbFloor.
Matrix spectrogram_db(std::span<const double> signal, const StftConfig& config);

// CSV export: first row bin frequencies, first column frame times, cells dB.
void write_spectrogram_csv(const std::string& path, const Matrix& spec_db,
                           const StftConfig& config, double sample_rate);

// Welch PSD estimate (Hann, 50% overlap) on bins 0..segment/2.
std::vector<double> welch_psd(std::span<const double> signal, std::size_t segment_length);

}  // namespace dvn
