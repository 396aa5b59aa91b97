#include "dvn/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include "dvn/errors.hpp"

namespace dvn {

namespace {

struct Biquad {
    double b0, b1, b2, a1, a2;

    void apply(std::vector<double>& x) const {
        double z1 = 0.0, z2 = 0.0;
        for (double& v : x) {
            double in = v;
            double out = b0 * in + z1;
            z1 = b1 * in - a1 * out + z2;
            z2 = b2 * in - a2 * out;
            v = out;
        }
    }
};

// RBJ cookbook second-order Butterworth sections (Q = 1/sqrt(2)).
Biquad butterworth_lowpass(double fc, double fs) {
    double w0 = 2.0 * std::numbers::pi * fc / fs;
    double alpha = std::sin(w0) / std::sqrt(2.0);
    double cw = std::cos(w0);
    double a0 = 1.0 + alpha;
    return {(1.0 - cw) / 2.0 / a0, (1.0 - cw) / a0, (1.0 - cw) / 2.0 / a0, -2.0 * cw / a0,
            (1.0 - alpha) / a0};
}

Biquad butterworth_highpass(double fc, double fs) {
    double w0 = 2.0 * std::numbers::pi * fc / fs;
    double alpha = std::sin(w0) / std::sqrt(2.0);
    double cw = std::cos(w0);
    double a0 = 1.0 + alpha;
    return {(1.0 + cw) / 2.0 / a0, -(1.0 + cw) / a0, (1.0 + cw) / 2.0 / a0, -2.0 * cw / a0,
            (1.0 - alpha) / a0};
}

}  // namespace

std::vector<double> schroeder_edc(std::span<const double> ir) {
    if (ir.empty()) throw std::invalid_argument("schroeder_edc: empty input");
    std::vector<double> edc(ir.size());
    double acc = 0.0;
    for (std::size_t n = ir.size(); n-- > 0;) {
        acc += ir[n] * ir[n];
        edc[n] = acc;
    }
    if (acc <= 0.0) throw numeric_error("schroeder_edc: silent input");
    const double floor_lin = std::pow(10.0, kDbFloor / 10.0);
    for (double& v : edc) v = 10.0 * std::log10(std::max(v / acc, floor_lin));
    return edc;
}

std::vector<double> bandpass(std::span<const double> signal, double f_lo, double f_hi,
                             double sample_rate) {
    if (!(0.0 < f_lo && f_lo < f_hi && f_hi < sample_rate / 2.0))
        throw std::invalid_argument("bandpass: need 0 < f_lo < f_hi < Nyquist");
    std::vector<double> out(signal.begin(), signal.end());
    butterworth_highpass(f_lo, sample_rate).apply(out);
    butterworth_lowpass(f_hi, sample_rate).apply(out);
    return out;
}

std::vector<double> schroeder_edc_band(std::span<const double> ir, double f_lo, double f_hi,
                                       double sample_rate) {
    return schroeder_edc(bandpass(ir, f_lo, f_hi, sample_rate));
}

double estimate_t60(std::span<const double> edc_db, double sample_rate) {
    std::size_t i5 = edc_db.size(), i25 = edc_db.size();
    for (std::size_t n = 0; n < edc_db.size(); ++n) {
        if (i5 == edc_db.size() && edc_db[n] <= -5.0) i5 = n;
        if (edc_db[n] <= -25.0) {
            i25 = n;
            break;
        }
    }
    if (i25 == edc_db.size() || i5 >= i25)
        throw numeric_error("estimate_t60: EDC never reaches -25 dB");

    // least-squares line over the -5..-25 dB span
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const auto count = static_cast<double>(i25 - i5 + 1);
    for (std::size_t n = i5; n <= i25; ++n) {
        auto x = static_cast<double>(n);
        sx += x;
        sy += edc_db[n];
        sxx += x * x;
        sxy += x * edc_db[n];
    }
    double slope = (count * sxy - sx * sy) / (count * sxx - sx * sx);  // dB per sample
    if (slope >= 0.0) throw numeric_error("estimate_t60: non-decaying EDC fit");
    return -60.0 / (slope * sample_rate);
}

std::vector<double> octave_band_centers(double f_min, double f_max, double sample_rate) {
    std::vector<double> centers;
    for (int k = -6; k <= 6; ++k) {
        double c = 1000.0 * std::pow(2.0, k);
        if (c < f_min || c > f_max) continue;
        if (c * std::sqrt(2.0) >= sample_rate / 2.0) continue;
        centers.push_back(c);
    }
    return centers;
}

T60Error t60_error(std::span<const double> model_ir, std::span<const double> target_ir,
                   double sample_rate, double f_min, double f_max) {
    T60Error result;
    double err_sum = 0.0;
    std::size_t valid = 0;
    for (double c : octave_band_centers(f_min, f_max, sample_rate)) {
        BandT60 band;
        band.center_hz = c;
        const double lo = c / std::sqrt(2.0);
        const double hi = c * std::sqrt(2.0);
        try {
            band.t60_target = estimate_t60(schroeder_edc_band(target_ir, lo, hi, sample_rate),
                                           sample_rate);
            band.t60_model =
                estimate_t60(schroeder_edc_band(model_ir, lo, hi, sample_rate), sample_rate);
            band.error_pct =
                100.0 * std::abs(band.t60_model - band.t60_target) / band.t60_target;
            band.valid = true;
            err_sum += band.error_pct;
            result.max_pct = std::max(result.max_pct, band.error_pct);
            ++valid;
        } catch (const numeric_error&) {
            band.valid = false;  // excluded and reported
        }
        result.bands.push_back(band);
    }
    if (valid == 0) throw numeric_error("t60_error: no band decays 25 dB");
    result.mean_pct = err_sum / static_cast<double>(valid);
    return result;
}

Matrix spectrogram_db(std::span<const double> signal, const StftConfig& config) {
    Matrix mags = stft_magnitudes(signal, config);
    double peak = 0.0;
    for (double v : mags.data) peak = std::max(peak, v);
    if (peak <= 0.0) {
        std::fill(mags.data.begin(), mags.data.end(), kDbFloor);
        return mags;
    }
    for (double& v : mags.data)
        v = std::max(20.0 * std::log10(std::max(v, 0.0) / peak), kDbFloor);
    return mags;
}

void write_spectrogram_csv(const std::string& path, const Matrix& spec_db,
                           const StftConfig& config, double sample_rate) {
    std::ofstream out(path);
    if (!out) throw io_error("write_spectrogram_csv: cannot open " + path);
    out.precision(9);
    out << "time_s";
    for (std::size_t k = 0; k < spec_db.rows; ++k)
        out << ',' << sample_rate * static_cast<double>(k) / static_cast<double>(config.fft_length);
    out << '\n';
    for (std::size_t f = 0; f < spec_db.cols; ++f) {
        double t = (static_cast<double>(f * config.hop) +
                    static_cast<double>(config.window_length) / 2.0) /
                   sample_rate;
        out << t;
        for (std::size_t k = 0; k < spec_db.rows; ++k) out << ',' << spec_db(k, f);
        out << '\n';
    }
    if (!out) throw io_error("write_spectrogram_csv: write failed for " + path);
}

std::vector<double> welch_psd(std::span<const double> signal, std::size_t segment_length) {
    if (segment_length == 0 || (segment_length & (segment_length - 1)) != 0)
        throw std::invalid_argument("welch_psd: segment length must be a power of two");
    if (signal.size() < segment_length)
        throw std::invalid_argument("welch_psd: signal shorter than one segment");
    const std::size_t hop = segment_length / 2;
    const std::size_t bins = segment_length / 2 + 1;
    std::vector<double> window = hann_window(segment_length);
    double wnorm = 0.0;
    for (double v : window) wnorm += v * v;

    std::vector<double> psd(bins, 0.0);
    std::vector<std::complex<double>> buf(segment_length);
    std::size_t count = 0;
    for (std::size_t start = 0; start + segment_length <= signal.size(); start += hop) {
        for (std::size_t n = 0; n < segment_length; ++n)
            buf[n] = signal[start + n] * window[n];
        fft_inplace(buf, false);
        for (std::size_t k = 0; k < bins; ++k) psd[k] += std::norm(buf[k]);
        ++count;
    }
    for (double& v : psd) v /= (static_cast<double>(count) * wnorm);
    return psd;
}

}  // namespace dvn
