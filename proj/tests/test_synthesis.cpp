#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "dvn/errors.hpp"
#include "dvn/synthesis.hpp"

using namespace dvn;

namespace {

// Minimal renderable model: one transparent dictionary filter, flat unit
// gains, no post-coloration.
DvnModel flat_model(std::int64_t duration, std::size_t num_filters = 1) {
    DvnModel model;
    model.sample_rate = 48000.0;
    model.framing.fft_length = 512;
    model.framing.window_length = 256;
    model.framing.hop = 128;
    model.density = {2000.0, 2000.0, duration};
    model.post_filter.b0 = 1.0;

    model.dictionary.resize(num_filters);
    for (std::size_t i = 0; i < num_filters; ++i) {
        model.dictionary[i].allpole.b0 = 1.0;  // pass-through second-order shell
        model.dictionary[i].allpole.a = {0.0, 0.0};
        model.dictionary[i].magnitude.assign(model.framing.num_bins(), 1.0);
        model.dictionary[i].source_frame = static_cast<int>(i + 1);
    }

    model.prob_times = {0.0, static_cast<double>(duration)};
    model.gain_times = model.prob_times;
    model.frame_gains = {1.0, 1.0};
    model.prob_matrix = Matrix(num_filters, 2);
    for (std::size_t f = 0; f < 2; ++f)
        for (std::size_t i = 0; i < num_filters; ++i)
            model.prob_matrix(i, f) = 1.0 / static_cast<double>(num_filters);
    return model;
}

// flat_model with the dictionary replaced by unit-energy resonators.
DvnModel resonator_model(std::int64_t duration, const std::vector<double>& freqs_hz,
                         double radius) {
    DvnModel model = flat_model(duration, freqs_hz.size());
    for (std::size_t i = 0; i < freqs_hz.size(); ++i) {
        double w = 2.0 * std::numbers::pi * freqs_hz[i] / model.sample_rate;
        auto& filt = model.dictionary[i];
        filt.allpole.a = {-2.0 * radius * std::cos(w), radius * radius};
        filt.magnitude = allpole_magnitudes(filt.allpole, model.framing.fft_length);
        double ms = 0.0;
        for (double v : filt.magnitude) ms += v * v;
        ms /= static_cast<double>(filt.magnitude.size());
        double scale = 1.0 / std::sqrt(ms);
        filt.allpole.b0 *= scale;
        for (double& v : filt.magnitude) v *= scale;
    }
    return model;
}

}  // namespace

TEST_CASE("interpolate_series midpoint and clamping") {
    std::vector<double> values{1.0, 3.0};
    std::vector<double> times{100.0, 300.0};
    std::vector<std::int64_t> q{0, 100, 200, 300, 500};
    auto out = interpolate_series(values, times, q);
    CHECK(out == std::vector<double>{1.0, 1.0, 2.0, 3.0, 3.0});
    CHECK_THROWS_AS(interpolate_series(values, std::vector<double>{300.0, 100.0}, q),
                    std::invalid_argument);
}

TEST_CASE("interpolate_to_pulses renormalizes probability columns") {
    Matrix probs(2, 2);
    probs(0, 0) = 0.9;
    probs(1, 0) = 0.1;
    probs(0, 1) = 0.1;
    probs(1, 1) = 0.9;
    std::vector<double> times{0.0, 100.0};
    std::vector<std::int64_t> locs{0, 50, 100};
    Matrix out = interpolate_to_pulses(probs, times, locs, true);
    CHECK(out(0, 0) == doctest::Approx(0.9));
    CHECK(out(0, 1) == doctest::Approx(0.5));
    CHECK(out(1, 1) == doctest::Approx(0.5));
    CHECK(out(0, 2) == doctest::Approx(0.1));
    for (std::size_t m = 0; m < 3; ++m)
        CHECK(out(0, m) + out(1, m) == doctest::Approx(1.0));
}

TEST_CASE("interpolate_to_pulses rejects degenerate columns") {
    Matrix probs(2, 2);  // all zeros
    std::vector<double> times{0.0, 100.0};
    std::vector<std::int64_t> locs{50};
    CHECK_THROWS_AS(interpolate_to_pulses(probs, times, locs, true), numeric_error);
    CHECK_NOTHROW(interpolate_to_pulses(probs, times, locs, false));
}

TEST_CASE("pulse_gains applies the sqrt grid compensation") {
    std::vector<double> ghat{1.0, 2.0, 0.5};
    std::vector<double> grids{4.0, 9.0, 16.0};
    auto g = pulse_gains(ghat, grids);
    CHECK(g[0] == doctest::Approx(2.0));
    CHECK(g[1] == doctest::Approx(6.0));
    CHECK(g[2] == doctest::Approx(2.0));
    CHECK_THROWS_AS(pulse_gains(std::vector<double>{-1.0}, std::vector<double>{4.0}),
                    std::invalid_argument);
}

TEST_CASE("allpole_impulse_response matches the recursion and truncates") {
    AllpoleFilter f;
    f.b0 = 2.0;
    f.a = {-0.5};
    auto h = allpole_impulse_response(f);
    REQUIRE(h.size() >= 15);
    for (std::size_t n = 0; n < 15; ++n)
        CHECK(h[n] == doctest::Approx(2.0 * std::pow(0.5, static_cast<double>(n))));
    CHECK(h.size() < 200);

    AllpoleFilter unstable;
    unstable.a = {-1.5};
    CHECK_THROWS_AS(allpole_impulse_response(unstable), numeric_error);
}

TEST_CASE("predict_psd sums weighted magnitudes") {
    DvnModel model = flat_model(1000, 2);
    for (std::size_t k = 0; k < model.num_bins(); ++k) {
        model.dictionary[0].magnitude[k] = 2.0;
        model.dictionary[1].magnitude[k] = 4.0;
    }
    auto psd = predict_psd(model, std::vector<double>{0.25, 0.75});
    for (double v : psd) CHECK(v == doctest::Approx(0.25 * 2.0 + 0.75 * 4.0));
}

TEST_CASE("fvn filter_interp switches at frame midpoints") {
    Matrix probs(2, 2);
    probs(0, 0) = 1.0;
    probs(1, 1) = 1.0;
    std::vector<double> times{100.0, 300.0};
    std::vector<std::int64_t> locs{0, 150, 199, 200, 201, 400};
    RngStream rng(0);
    auto idx = fvn_mode_assign(probs, times, locs, FvnMode::filter_interp, rng);
    CHECK(idx == std::vector<int>{0, 0, 0, 0, 1, 1});
}

TEST_CASE("synthesize is deterministic in the seed") {
    DvnModel model = flat_model(24000, 3);
    SynthesisConfig cfg;
    cfg.seed = 1234;
    auto a = synthesize(model, cfg);
    auto b = synthesize(model, cfg);
    CHECK(a.samples == b.samples);

    cfg.seed = 1235;
    auto c = synthesize(model, cfg);
    CHECK(a.samples != c.samples);
}

TEST_CASE("synthesize output length and early prepend") {
    DvnModel model = flat_model(12000);
    model.early_part.assign(500, 0.25);
    SynthesisConfig cfg;
    cfg.seed = 1;
    auto late_only = synthesize(model, cfg);
    CHECK(late_only.samples.size() == 12000);
    CHECK(late_only.late_start == 0);

    cfg.include_early = true;
    auto full = synthesize(model, cfg);
    CHECK(full.samples.size() == 12500);
    CHECK(full.late_start == 500);
    CHECK(full.samples[0] == doctest::Approx(0.25));
    for (std::size_t n = 0; n < 12000; ++n)
        CHECK(full.samples[500 + n] == doctest::Approx(late_only.samples[n]));

    cfg.include_early = false;
    cfg.length = 6000;
    auto shorter = synthesize(model, cfg);
    CHECK(shorter.samples.size() == 6000);
}

TEST_CASE("synthesize level calibration: flat gains give the expected rms") {
    DvnModel model = flat_model(96000);
    SynthesisConfig cfg;
    cfg.seed = 7;
    auto ir = synthesize(model, cfg);
    double power = 0.0;
    for (double v : ir.samples) power += v * v;
    power /= static_cast<double>(ir.samples.size());
    auto w = hann_window(model.framing.window_length);
    double wsum2 = 0.0;
    for (double v : w) wsum2 += v * v;
    // unit ghat: per-sample power ghat^2 / sum(w^2)
    CHECK(power == doctest::Approx(1.0 / wsum2).epsilon(0.1));
}

TEST_CASE("gated model renders nothing past the gate plus filter tails") {
    DvnModel model = flat_model(24000);
    model.gate = 8000;
    SynthesisConfig cfg;
    cfg.seed = 3;
    auto ir = synthesize(model, cfg);
    REQUIRE(ir.samples.size() == 24000);
    // transparent filters: a single-sample pulse cannot reach past the gate
    for (std::size_t n = 8000; n < 24000; ++n) CHECK(ir.samples[n] == 0.0);
}

TEST_CASE("synthesize is linear in the frame gains") {
    DvnModel model = resonator_model(24000, {500.0, 2000.0}, 0.8);
    SynthesisConfig cfg;
    cfg.seed = 17;
    auto base = synthesize(model, cfg);
    const double c = 2.5;
    for (double& g : model.frame_gains) g *= c;
    auto scaled = synthesize(model, cfg);
    REQUIRE(scaled.samples.size() == base.samples.size());
    for (std::size_t n = 0; n < base.samples.size(); ++n)
        CHECK(scaled.samples[n] == doctest::Approx(c * base.samples[n]).epsilon(1e-12));
}

TEST_CASE("fvn probability_interp splits a boundary midpoint evenly") {
    Matrix probs(2, 2);
    probs(0, 0) = 1.0;
    probs(1, 1) = 1.0;
    std::vector<double> times{100.0, 300.0};
    std::vector<std::int64_t> locs{200};  // interpolated column [0.5, 0.5]
    std::size_t first = 0;
    const std::size_t trials = 10000;
    for (std::size_t s = 0; s < trials; ++s) {
        RngStream rng(s + 1);
        auto idx = fvn_mode_assign(probs, times, locs, FvnMode::probability_interp, rng);
        if (idx[0] == 0) ++first;
    }
    double freq = static_cast<double>(first) / trials;
    CHECK(freq == doctest::Approx(0.5).epsilon(0.04));
}

TEST_CASE("greedy assignment halves per-band short-time energy variance") {
    DvnModel model = resonator_model(240000, {500.0, 1500.0, 3000.0, 6000.0}, 0.95);
    SynthesisConfig greedy_cfg;
    greedy_cfg.seed = 29;
    greedy_cfg.kappa = 0.0;
    greedy_cfg.mode = AssignMode::greedy;
    SynthesisConfig naive_cfg = greedy_cfg;
    naive_cfg.mode = AssignMode::naive;
    auto a = synthesize(model, greedy_cfg);
    auto b = synthesize(model, naive_cfg);

    // normalized variance (var / mean^2) of frame energy in each filter's band
    auto band_cv2 = [&](const std::vector<double>& sig) {
        Matrix mags = stft_magnitudes(sig, model.framing);
        double total = 0.0;
        for (const auto& filt : model.dictionary) {
            std::size_t peak = 0;
            for (std::size_t k = 1; k < filt.magnitude.size(); ++k)
                if (filt.magnitude[k] > filt.magnitude[peak]) peak = k;
            std::size_t lo = peak > 3 ? peak - 3 : 0;
            std::size_t hi = std::min(peak + 4, mags.rows);
            std::vector<double> energy;
            for (std::size_t f = 10; f + 10 < mags.cols; ++f) {
                double e = 0.0;
                for (std::size_t k = lo; k < hi; ++k) e += mags(k, f) * mags(k, f);
                energy.push_back(e);
            }
            double mean = 0.0;
            for (double e : energy) mean += e;
            mean /= static_cast<double>(energy.size());
            double var = 0.0;
            for (double e : energy) var += (e - mean) * (e - mean);
            var /= static_cast<double>(energy.size());
            total += var / (mean * mean);
        }
        return total;
    };
    CHECK(band_cv2(a.samples) <= 0.5 * band_cv2(b.samples));
}

TEST_CASE("assignment mode changes the render but not its scale") {
    DvnModel model = flat_model(48000, 4);
    SynthesisConfig greedy_cfg;
    greedy_cfg.seed = 11;
    greedy_cfg.mode = AssignMode::greedy;
    SynthesisConfig naive_cfg = greedy_cfg;
    naive_cfg.mode = AssignMode::naive;
    auto a = synthesize(model, greedy_cfg);
    auto b = synthesize(model, naive_cfg);
    double pa = 0.0, pb = 0.0;
    for (double v : a.samples) pa += v * v;
    for (double v : b.samples) pb += v * v;
    CHECK(pa / pb == doctest::Approx(1.0).epsilon(0.2));
}
