#include "dvn/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "dvn/errors.hpp"

namespace dvn {

namespace {

double lerp_at(std::span<const double> values, std::span<const double> times, double query) {
    if (query <= times.front()) return values.front();
    if (query >= times.back()) return values.back();
    // times strictly increasing
    auto it = std::upper_bound(times.begin(), times.end(), query);
    std::size_t hi = static_cast<std::size_t>(it - times.begin());
    std::size_t lo = hi - 1;
    double t = (query - times[lo]) / (times[hi] - times[lo]);
    return values[lo] + t * (values[hi] - values[lo]);
}

void check_times(std::span<const double> times) {
    if (times.empty()) throw std::invalid_argument("interpolation: empty frame times");
    for (std::size_t i = 1; i < times.size(); ++i)
        if (times[i] <= times[i - 1])
            throw std::invalid_argument("interpolation: frame times must be strictly increasing");
}

}  // namespace

std::vector<double> interpolate_series(std::span<const double> values,
                                       std::span<const double> times,
                                       std::span<const std::int64_t> query_points) {
    check_times(times);
    if (values.size() != times.size())
        throw std::invalid_argument("interpolate_series: values/times size mismatch");
    std::vector<double> out(query_points.size());
    for (std::size_t m = 0; m < query_points.size(); ++m)
        out[m] = lerp_at(values, times, static_cast<double>(query_points[m]));
    return out;
}

Matrix interpolate_to_pulses(const Matrix& frame_values, std::span<const double> frame_times,
                             std::span<const std::int64_t> pulse_locations,
                             bool renormalize_columns) {
    check_times(frame_times);
    if (frame_values.cols != frame_times.size())
        throw std::invalid_argument("interpolate_to_pulses: column/time count mismatch");

    Matrix out(frame_values.rows, pulse_locations.size());
    std::vector<double> row(frame_values.cols);
    for (std::size_t r = 0; r < frame_values.rows; ++r) {
        for (std::size_t c = 0; c < frame_values.cols; ++c) row[c] = frame_values(r, c);
        for (std::size_t m = 0; m < pulse_locations.size(); ++m)
            out(r, m) = lerp_at(row, frame_times, static_cast<double>(pulse_locations[m]));
    }
    if (renormalize_columns) {
        for (std::size_t m = 0; m < out.cols; ++m) {
            auto col = out.col(m);
            double sum = 0.0;
            for (double v : col) sum += v;
            if (sum <= 0.0)
                throw numeric_error("interpolate_to_pulses: degenerate probability column at pulse " +
                                    std::to_string(m));
            for (double& v : col) v /= sum;
        }
    }
    return out;
}

std::vector<double> pulse_gains(std::span<const double> interp_gains,
                                std::span<const double> grid_sizes) {
    if (interp_gains.size() != grid_sizes.size())
        throw std::invalid_argument("pulse_gains: size mismatch");
    std::vector<double> g(interp_gains.size());
    for (std::size_t m = 0; m < g.size(); ++m) {
        if (interp_gains[m] < 0.0) throw std::invalid_argument("pulse_gains: negative gain");
        if (grid_sizes[m] < 1.0) throw std::invalid_argument("pulse_gains: grid size below 1");
        g[m] = interp_gains[m] * std::sqrt(grid_sizes[m]);
    }
    return g;
}

std::vector<double> allpole_impulse_response(const AllpoleFilter& filter, double floor_db) {
    if (!filter.is_stable()) throw numeric_error("allpole_impulse_response: unstable filter");
    const double rel_floor = std::pow(10.0, floor_db / 20.0);
    constexpr std::size_t kTailWindow = 64;
    constexpr std::size_t kMaxLength = 1 << 22;

    std::vector<double> h;
    h.reserve(1024);
    double peak = 0.0;
    std::size_t quiet = 0;
    for (std::size_t n = 0; n < kMaxLength; ++n) {
        double acc = (n == 0) ? filter.b0 : 0.0;
        for (std::size_t k = 1; k <= filter.order() && k <= n; ++k)
            acc -= filter.a[k - 1] * h[n - k];
        h.push_back(acc);
        peak = std::max(peak, std::abs(acc));
        if (std::abs(acc) < peak * rel_floor) {
            if (++quiet >= kTailWindow) break;
        } else {
            quiet = 0;
        }
    }
    // drop the quiet run except one sample
    if (quiet >= kTailWindow) h.resize(h.size() - (kTailWindow - 1));
    return h;
}

std::vector<int> fvn_mode_assign(const Matrix& prob_matrix, std::span<const double> frame_times,
                                 std::span<const std::int64_t> pulse_locations, FvnMode mode,
                                 RngStream& rng) {
    check_times(frame_times);
    if (prob_matrix.cols != frame_times.size())
        throw std::invalid_argument("fvn_mode_assign: column/time count mismatch");

    if (mode == FvnMode::probability_interp) {
        Matrix interp = interpolate_to_pulses(prob_matrix, frame_times, pulse_locations, true);
        return naive_assign(interp, rng);
    }

    // filter_interp: per-frame argmax, switch at frame boundaries.
    std::vector<int> frame_filter(prob_matrix.cols);
    for (std::size_t f = 0; f < prob_matrix.cols; ++f) {
        auto col = prob_matrix.col(f);
        frame_filter[f] = static_cast<int>(std::max_element(col.begin(), col.end()) - col.begin());
    }
    std::vector<int> indices(pulse_locations.size());
    for (std::size_t m = 0; m < pulse_locations.size(); ++m) {
        double loc = static_cast<double>(pulse_locations[m]);
        // nearest frame center; exact midpoints resolve to the earlier frame
        auto it = std::lower_bound(frame_times.begin(), frame_times.end(), loc);
        std::size_t hi = static_cast<std::size_t>(it - frame_times.begin());
        std::size_t f;
        if (hi == 0) {
            f = 0;
        } else if (hi >= frame_times.size()) {
            f = frame_times.size() - 1;
        } else {
            f = (loc - frame_times[hi - 1] <= frame_times[hi] - loc) ? hi - 1 : hi;
        }
        indices[m] = frame_filter[f];
    }
    return indices;
}

std::vector<double> predict_psd(const DvnModel& model, std::span<const double> probabilities) {
    if (probabilities.size() != model.num_filters())
        throw std::invalid_argument("predict_psd: probability vector size mismatch");
    std::vector<double> psd(model.num_bins(), 0.0);
    for (std::size_t i = 0; i < model.num_filters(); ++i) {
        const auto& mag = model.dictionary[i].magnitude;
        for (std::size_t k = 0; k < psd.size(); ++k) psd[k] += probabilities[i] * mag[k];
    }
    return psd;
}

ImpulseResponse synthesize(const DvnModel& model, const SynthesisConfig& config) {
    if (model.dictionary.empty()) throw std::invalid_argument("synthesize: empty dictionary");
    if (model.frame_gains.empty()) throw std::invalid_argument("synthesize: no frame gains");
    if (config.kappa < 0.0) throw std::invalid_argument("synthesize: kappa must be >= 0");

    RngStream rng(config.seed);
    DensityProfile profile = model.density;
    if (config.length) profile.duration = *config.length;
    const auto duration = static_cast<std::size_t>(profile.duration);

    PulseTrain train = generate_pulse_train(profile, model.sample_rate, {}, rng);

    // Gated model: pulses at or beyond the gate never enter the render.
    if (model.gate) {
        std::size_t keep = 0;
        while (keep < train.size() && train.locations[keep] < *model.gate) ++keep;
        train.locations.resize(keep);
        train.signs.resize(keep);
        train.widths.resize(keep);
        train.grid_sizes.resize(keep);
    }

    std::vector<double> ghat =
        interpolate_series(model.frame_gains, model.gain_times, train.locations);
    Matrix pulse_probs =
        interpolate_to_pulses(model.prob_matrix, model.prob_times, train.locations, true);

    std::vector<int> assignment;
    switch (config.mode) {
        case AssignMode::greedy:
            assignment = greedy_assign(pulse_probs, config.kappa, rng);
            break;
        case AssignMode::naive:
            assignment = naive_assign(pulse_probs, rng);
            break;
        case AssignMode::fvn_filter_interp:
            assignment = fvn_mode_assign(model.prob_matrix, model.prob_times, train.locations,
                                         FvnMode::filter_interp, rng);
            break;
    }

    std::vector<double> gains = pulse_gains(ghat, train.grid_sizes);

    std::vector<std::vector<double>> filter_irs(model.num_filters());
    for (std::size_t i = 0; i < model.num_filters(); ++i)
        filter_irs[i] = allpole_impulse_response(model.dictionary[i].allpole);

    // Sparse rendering: scatter-add of scaled, shifted filter responses.
    std::vector<double> late(duration, 0.0);
    for (std::size_t m = 0; m < train.size(); ++m) {
        const auto& h = filter_irs[static_cast<std::size_t>(assignment[m])];
        const double amp = train.signs[m] * gains[m];
        const auto base = static_cast<std::size_t>(train.locations[m]);
        const std::size_t count = std::min(h.size(), duration > base ? duration - base : 0);
        double* out = late.data() + base;
        for (std::size_t t = 0; t < count; ++t) out[t] += amp * h[t];
    }

    // Scale so the synthetic frame magnitudes land on the fitted ones: a
    // frame holds ~window/T pulses of amplitude ghat*sqrt(T), giving an
    // expected magnitude of ghat * sqrt(sum w^2).
    std::vector<double> window = hann_window(model.framing.window_length);
    double wsum2 = 0.0;
    for (double v : window) wsum2 += v * v;
    const double scale = 1.0 / std::sqrt(wsum2);
    for (double& v : late) v *= scale;

    late = apply_allpole(model.post_filter, late);
    for (const DcBlocker& dc : model.dc_blockers) late = apply_dc_blocker(dc, late);

    ImpulseResponse ir;
    ir.sample_rate = model.sample_rate;
    if (config.include_early && !model.early_part.empty()) {
        ir.late_start = static_cast<std::int64_t>(model.early_part.size());
        ir.samples = model.early_part;
        ir.samples.resize(model.early_part.size() + late.size(), 0.0);
        for (std::size_t n = 0; n < late.size(); ++n)
            ir.samples[model.early_part.size() + n] += late[n];
    } else {
        ir.late_start = 0;
        ir.samples = std::move(late);
    }
    return ir;
}

}  // namespace dvn
