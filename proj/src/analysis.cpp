#include "dvn/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>
#include <string>

#include "dvn/errors.hpp"
#include "dvn/nnls.hpp"

namespace dvn {

namespace {

// Hann-windowed FFT magnitudes of the first window of a signal.
std::vector<double> first_frame_magnitudes(std::span<const double> signal,
                                           const StftConfig& framing) {
    std::vector<std::complex<double>> buf(framing.fft_length, 0.0);
    std::vector<double> window = hann_window(framing.window_length);
    for (std::size_t n = 0; n < framing.window_length && n < signal.size(); ++n)
        buf[n] = signal[n] * window[n];
    fft_inplace(buf, false);
    std::vector<double> mags(framing.num_bins());
    for (std::size_t k = 0; k < mags.size(); ++k) mags[k] = std::abs(buf[k]);
    return mags;
}

double mean_square(std::span<const double> v) {
    double acc = 0.0;
    for (double x : v) acc += x * x;
    return v.empty() ? 0.0 : acc / static_cast<double>(v.size());
}

}  // namespace

WhitenResult whiten(std::span<const double> target_ir, double sample_rate,
                    std::int64_t late_start, const StftConfig& framing, std::size_t lp_order,
                    std::size_t num_dc_blockers) {
    if (late_start < 0 || static_cast<std::size_t>(late_start) >= target_ir.size())
        throw std::invalid_argument("whiten: late_start outside the IR");
    if (lp_order < 1) throw std::invalid_argument("whiten: lp_order must be >= 1");
    framing.validate();

    std::span<const double> late = target_ir.subspan(static_cast<std::size_t>(late_start));
    if (late.size() < framing.window_length)
        throw numeric_error("whiten: late part shorter than one analysis window");
    double energy = 0.0;
    for (double v : late) energy += v * v;
    if (energy <= 0.0) throw numeric_error("whiten: silent late part");

    WhitenResult result;
    std::vector<double> first = first_frame_magnitudes(late, framing);
    result.post_filter = lp_from_magnitudes(first, lp_order, framing.fft_length);
    result.whitened = apply_inverse(result.post_filter, late);

    // DC blockers are fitted and inverted on the first-frame magnitudes only;
    // the frames get divided by the blocker responses at fit time instead of
    // running a time-domain inverse, whose near-unit pole would smear early
    // energy into a slow tail and flatten the measured decay.
    std::vector<double> mags = first_frame_magnitudes(result.whitened, framing);
    for (std::size_t i = 0; i < num_dc_blockers; ++i) {
        DcBlocker dc = fit_dc_blocker(mags, sample_rate, framing.fft_length);
        result.dc_blockers.push_back(dc);
        std::vector<double> inv = dc_blocker_inverse_magnitudes(dc.pole_radius, framing.fft_length);
        for (std::size_t k = 0; k < mags.size(); ++k) mags[k] *= inv[k];
    }
    return result;
}

void whiten_frames_dc(Matrix& frames, std::span<const DcBlocker> dc_blockers,
                      std::size_t fft_length) {
    for (const DcBlocker& dc : dc_blockers) {
        std::vector<double> inv = dc_blocker_inverse_magnitudes(dc.pole_radius, fft_length);
        if (inv.size() != frames.rows)
            throw std::invalid_argument("whiten_frames_dc: bin grid mismatch");
        for (std::size_t f = 0; f < frames.cols; ++f) {
            auto col = frames.col(f);
            for (std::size_t k = 0; k < col.size(); ++k) col[k] *= inv[k];
        }
    }
}

std::vector<std::size_t> select_log_spaced_frames(std::size_t num_frames, std::size_t subset_size) {
    if (subset_size < 1 || subset_size > num_frames)
        throw std::invalid_argument("select_log_spaced_frames: need 1 <= N <= frame count");
    if (subset_size == 1) return {1};

    const double log_end = std::log(static_cast<double>(num_frames));
    std::vector<std::size_t> picked;
    for (std::size_t points = subset_size;; ++points) {
        picked.clear();
        for (std::size_t j = 0; j < points; ++j) {
            double v = std::exp(log_end * static_cast<double>(j) / static_cast<double>(points - 1));
            auto idx = static_cast<std::size_t>(std::floor(v + 0.5));
            idx = std::clamp<std::size_t>(idx, 1, num_frames);
            if (picked.empty() || idx > picked.back()) picked.push_back(idx);
        }
        if (picked.size() >= subset_size) break;
    }
    // Densifying can overshoot; thin interior points closest to a neighbor
    // in log spacing until exactly N remain.
    while (picked.size() > subset_size) {
        std::size_t drop = 1;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 1; i + 1 < picked.size(); ++i) {
            double gap = std::log(static_cast<double>(picked[i])) -
                         std::log(static_cast<double>(picked[i - 1]));
            if (gap < best) {
                best = gap;
                drop = i;
            }
        }
        picked.erase(picked.begin() + static_cast<std::ptrdiff_t>(drop));
    }
    return picked;
}

std::vector<DictionaryFilter> design_dictionary_from_frames(const Matrix& frame_mags,
                                                            const StftConfig& framing,
                                                            std::size_t num_filters) {
    if (num_filters > frame_mags.cols)
        throw std::invalid_argument("design_dictionary: more filters requested than frames");
    std::vector<std::size_t> frames = select_log_spaced_frames(frame_mags.cols, num_filters);

    std::vector<DictionaryFilter> dictionary;
    dictionary.reserve(frames.size());
    for (std::size_t idx : frames) {
        DictionaryFilter filt;
        filt.source_frame = static_cast<int>(idx);
        filt.allpole = lp_from_magnitudes(frame_mags.col(idx - 1), 2, framing.fft_length);
        filt.magnitude = allpole_magnitudes(filt.allpole, framing.fft_length);
        double ms = mean_square(filt.magnitude);
        double scale = 1.0 / std::sqrt(ms);
        filt.allpole.b0 *= scale;
        for (double& v : filt.magnitude) v *= scale;
        dictionary.push_back(std::move(filt));
    }
    return dictionary;
}

std::vector<DictionaryFilter> design_dictionary(std::span<const double> whitened_ir,
                                                const StftConfig& framing,
                                                std::size_t num_filters) {
    return design_dictionary_from_frames(stft_magnitudes(whitened_ir, framing), framing,
                                         num_filters);
}

ProbabilityFit fit_probabilities_from_frames(const Matrix& frame_mags,
                                             std::span<const DictionaryFilter> dictionary) {
    if (dictionary.empty()) throw std::invalid_argument("fit_probabilities: empty dictionary");
    const std::size_t n = dictionary.size();
    Matrix design(frame_mags.rows, n);
    for (std::size_t c = 0; c < n; ++c) {
        if (dictionary[c].magnitude.size() != frame_mags.rows)
            throw std::invalid_argument("fit_probabilities: dictionary bin grid mismatch");
        auto col = design.col(c);
        std::copy(dictionary[c].magnitude.begin(), dictionary[c].magnitude.end(), col.begin());
    }

    Matrix activations = solve_nnls_batch(design, frame_mags);

    ProbabilityFit fit;
    fit.prob_matrix = Matrix(n, frame_mags.cols);
    fit.frame_gains.assign(frame_mags.cols, 0.0);
    for (std::size_t f = 0; f < frame_mags.cols; ++f) {
        auto a = activations.col(f);
        double gain = 0.0;
        for (double v : a) gain += v;
        auto p = fit.prob_matrix.col(f);
        if (gain > 0.0) {
            fit.frame_gains[f] = gain;
            for (std::size_t i = 0; i < n; ++i) p[i] = a[i] / gain;
        } else {
            // degenerate frame: zero gain, uniform column keeps P stochastic
            for (std::size_t i = 0; i < n; ++i) p[i] = 1.0 / static_cast<double>(n);
        }
    }
    return fit;
}

ProbabilityFit fit_probabilities(std::span<const double> whitened_ir,
                                 std::span<const DictionaryFilter> dictionary,
                                 const StftConfig& framing) {
    return fit_probabilities_from_frames(stft_magnitudes(whitened_ir, framing), dictionary);
}

double frame_center_time(const StftConfig& framing, std::size_t frame_index) {
    return static_cast<double>(frame_index * framing.hop) +
           static_cast<double>(framing.window_length) / 2.0;
}

DvnModel analyze(std::span<const double> target_ir, double sample_rate,
                 const AnalysisConfig& config) {
    if (target_ir.empty()) throw std::invalid_argument("analyze: empty target IR");

    StftConfig framing = config.framing;
    if (framing.fft_length < framing.window_length)
        framing.fft_length = next_pow2(framing.window_length);
    framing.validate();

    WhitenResult white;
    try {
        white = whiten(target_ir, sample_rate, config.late_start, framing, config.lp_order,
                       config.num_dc_blockers);
    } catch (const std::exception& e) {
        throw numeric_error(std::string("analyze [whiten]: ") + e.what());
    }

    Matrix frames;
    std::vector<DictionaryFilter> dictionary;
    try {
        frames = stft_magnitudes(white.whitened, framing);
        whiten_frames_dc(frames, white.dc_blockers, framing.fft_length);
        // The render path ends in forward DC blockers, so the model cannot
        // produce DC; the bin is random measurement content amplified by the
        // inverse boost and would otherwise dominate the NNLS fit.
        for (std::size_t f = 0; f < frames.cols; ++f) frames(0, f) = 0.0;
        dictionary = design_dictionary_from_frames(frames, framing, config.num_filters);
    } catch (const std::exception& e) {
        throw numeric_error(std::string("analyze [dictionary]: ") + e.what());
    }

    ProbabilityFit fit;
    try {
        fit = fit_probabilities_from_frames(frames, dictionary);
    } catch (const std::exception& e) {
        throw numeric_error(std::string("analyze [probabilities]: ") + e.what());
    }

    DvnModel model;
    model.sample_rate = sample_rate;
    model.late_start = config.late_start;
    model.post_filter = white.post_filter;
    model.dc_blockers = white.dc_blockers;
    model.dictionary = std::move(dictionary);
    model.prob_matrix = std::move(fit.prob_matrix);
    model.frame_gains = std::move(fit.frame_gains);
    model.framing = framing;
    model.density.start_density = config.start_density;
    model.density.end_density = config.end_density;
    model.density.duration =
        static_cast<std::int64_t>(target_ir.size()) - config.late_start;
    model.seed = config.seed;
    model.early_part.assign(target_ir.begin(),
                            target_ir.begin() + static_cast<std::ptrdiff_t>(config.late_start));

    const std::size_t nf = model.frame_gains.size();
    model.gain_times.resize(nf);
    for (std::size_t f = 0; f < nf; ++f) model.gain_times[f] = frame_center_time(framing, f);
    model.prob_times = model.gain_times;
    return model;
}

}  // namespace dvn
