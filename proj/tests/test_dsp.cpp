#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "dvn/dsp.hpp"
#include "dvn/errors.hpp"
#include "dvn/rng.hpp"

using namespace dvn;

TEST_CASE("fft of an impulse is flat") {
    std::vector<std::complex<double>> x(8, 0.0);
    x[0] = 1.0;
    fft_inplace(x, false);
    for (const auto& v : x) {
        CHECK(v.real() == doctest::Approx(1.0));
        CHECK(v.imag() == doctest::Approx(0.0));
    }
}

TEST_CASE("fft of a single cosine concentrates in one bin pair") {
    const std::size_t n = 64;
    std::vector<std::complex<double>> x(n);
    for (std::size_t i = 0; i < n; ++i)
        x[i] = std::cos(2.0 * std::numbers::pi * 5.0 * i / n);
    fft_inplace(x, false);
    for (std::size_t k = 0; k < n; ++k) {
        double expected = (k == 5 || k == n - 5) ? n / 2.0 : 0.0;
        CHECK(std::abs(x[k]) == doctest::Approx(expected).epsilon(1e-9));
    }
}

TEST_CASE("fft inverse round-trips") {
    RngStream rng(4);
    std::vector<std::complex<double>> x(256), orig;
    for (auto& v : x) v = {rng.uniform() - 0.5, rng.uniform() - 0.5};
    orig = x;
    fft_inplace(x, false);
    fft_inplace(x, true);
    for (std::size_t i = 0; i < x.size(); ++i)
        CHECK(std::abs(x[i] - orig[i]) < 1e-12);
}

TEST_CASE("next_pow2") {
    CHECK(next_pow2(1) == 1);
    CHECK(next_pow2(2) == 2);
    CHECK(next_pow2(3) == 4);
    CHECK(next_pow2(2048) == 2048);
    CHECK(next_pow2(2049) == 4096);
}

TEST_CASE("periodic hann overlap-adds to a constant") {
    auto w = hann_window(256);
    CHECK(w[0] == doctest::Approx(0.0));
    CHECK(w[128] == doctest::Approx(1.0));
    for (std::size_t i = 0; i < 128; ++i)
        CHECK(w[i] + w[i + 128] == doctest::Approx(1.0));
}

TEST_CASE("stft frame count includes the zero-padded tail") {
    StftConfig cfg;
    cfg.fft_length = 512;
    cfg.window_length = 256;
    cfg.hop = 128;
    CHECK(stft_num_frames(1024, cfg) == 7);   // (1024-256)/128+1, exact fit
    CHECK(stft_num_frames(1025, cfg) == 8);   // one partial tail frame
    CHECK(stft_num_frames(256, cfg) == 1);
    CHECK_THROWS_AS(stft_num_frames(100, cfg), numeric_error);
}

TEST_CASE("stft column matches a direct windowed FFT") {
    StftConfig cfg;
    cfg.fft_length = 256;
    cfg.window_length = 128;
    cfg.hop = 64;
    RngStream rng(8);
    std::vector<double> sig(512);
    for (auto& v : sig) v = rng.uniform() - 0.5;

    Matrix mags = stft_magnitudes(sig, cfg);
    REQUIRE(mags.rows == cfg.num_bins());
    REQUIRE(mags.cols == stft_num_frames(sig.size(), cfg));

    auto w = hann_window(cfg.window_length);
    std::vector<std::complex<double>> frame(cfg.fft_length, 0.0);
    const std::size_t f = 3;
    for (std::size_t i = 0; i < cfg.window_length; ++i)
        frame[i] = sig[f * cfg.hop + i] * w[i];
    fft_inplace(frame, false);
    for (std::size_t k = 0; k < cfg.num_bins(); ++k)
        CHECK(mags(k, f) == doctest::Approx(std::abs(frame[k])).epsilon(1e-10));
}

TEST_CASE("stft config validation") {
    StftConfig bad;
    bad.fft_length = 100;  // not a power of two
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad.fft_length = 128;
    bad.window_length = 256;  // exceeds fft
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad.window_length = 128;
    bad.hop = 0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("levinson recovers a known second-order model") {
    // poles at 0.8 exp(+-j pi/4): a1 = -2 * 0.8 * cos(pi/4), a2 = 0.64
    const double a1 = -1.6 * std::cos(std::numbers::pi / 4.0);
    const double a2 = 0.64;
    // Yule-Walker autocorrelation with r0 = 1
    const double r1 = -a1 / (1.0 + a2);
    const double r2 = -a1 * r1 - a2;
    AllpoleFilter f = lp_from_autocorr(std::vector<double>{1.0, r1, r2}, 2);
    REQUIRE(f.order() == 2);
    CHECK(f.a[0] == doctest::Approx(a1).epsilon(1e-6));
    CHECK(f.a[1] == doctest::Approx(a2).epsilon(1e-6));
    CHECK(f.is_stable());
}

TEST_CASE("levinson first-order sanity") {
    // AR(1), pole 0.9: r(k) proportional to 0.9^k
    AllpoleFilter f = lp_from_autocorr(std::vector<double>{1.0, 0.9}, 1);
    CHECK(f.a[0] == doctest::Approx(-0.9).epsilon(1e-9));
}

TEST_CASE("lp_from_magnitudes inverts allpole_magnitudes") {
    AllpoleFilter truth;
    truth.b0 = 2.5;
    truth.a = {-1.2, 0.5};
    const std::size_t nfft = 1024;
    auto mags = allpole_magnitudes(truth, nfft);
    AllpoleFilter fit = lp_from_magnitudes(mags, 2, nfft);
    CHECK(fit.a[0] == doctest::Approx(truth.a[0]).epsilon(1e-4));
    CHECK(fit.a[1] == doctest::Approx(truth.a[1]).epsilon(1e-4));
    CHECK(fit.b0 == doctest::Approx(truth.b0).epsilon(1e-3));
}

TEST_CASE("lp_from_signal whitens what it models") {
    AllpoleFilter truth;
    truth.a = {-0.95};
    RngStream rng(21);
    std::vector<double> noise(16384);
    for (auto& v : noise) v = rng.uniform() - 0.5;
    auto colored = apply_allpole(truth, noise);
    AllpoleFilter fit = lp_from_signal(colored, 4);
    auto white = apply_inverse(fit, colored);
    auto energy = [](const std::vector<double>& x, std::size_t from, std::size_t to) {
        double e = 0.0;
        for (std::size_t i = from; i < to; ++i) e += x[i] * x[i];
        return e;
    };
    // flat spectrum: low and high halves carry comparable energy after the
    // inverse, unlike the strongly lowpass input
    const std::size_t n = 4096;
    std::vector<std::complex<double>> spec(n);
    for (std::size_t i = 0; i < n; ++i) spec[i] = white[i];
    fft_inplace(spec, false);
    std::vector<double> p(n / 2);
    for (std::size_t i = 0; i < n / 2; ++i) p[i] = std::norm(spec[i]);
    double low = 0.0, high = 0.0;
    for (std::size_t i = 1; i < n / 4; ++i) low += p[i];
    for (std::size_t i = n / 4; i < n / 2; ++i) high += p[i];
    CHECK(low / high < 3.0);
    CHECK(high / low < 3.0);
    (void)energy;
}

TEST_CASE("is_stable flags poles outside the unit circle") {
    AllpoleFilter stable;
    stable.a = {-1.2, 0.5};
    CHECK(stable.is_stable());
    AllpoleFilter unstable;
    unstable.a = {-2.1, 1.1};  // pole magnitudes > 1
    CHECK_FALSE(unstable.is_stable());
}

TEST_CASE("apply_inverse undoes apply_allpole") {
    AllpoleFilter f;
    f.b0 = 0.7;
    f.a = {-1.1, 0.4, -0.05};
    RngStream rng(2);
    std::vector<double> x(2000);
    for (auto& v : x) v = rng.uniform() - 0.5;
    auto y = apply_allpole(f, x);
    auto back = apply_inverse(f, y);
    for (std::size_t i = 0; i < x.size(); ++i)
        CHECK(back[i] == doctest::Approx(x[i]).epsilon(1e-9));
}

TEST_CASE("dc blocker magnitude endpoints") {
    const std::size_t nfft = 512;
    auto mag = dc_blocker_magnitudes(0.995, nfft);
    REQUIRE(mag.size() == nfft / 2 + 1);
    CHECK(mag[0] == doctest::Approx(0.0));
    CHECK(mag[nfft / 2] == doctest::Approx(2.0 / (1.0 + 0.995)).epsilon(1e-9));
    // monotone rise towards Nyquist
    for (std::size_t k = 1; k < mag.size(); ++k) CHECK(mag[k] >= mag[k - 1] - 1e-12);
}

TEST_CASE("dc blocker inverse restores the input closely") {
    DcBlocker dc{0.99};
    RngStream rng(6);
    std::vector<double> x(5000);
    for (auto& v : x) v = rng.uniform() - 0.5;
    auto y = apply_dc_blocker(dc, x);
    auto back = apply_dc_blocker_inverse(dc, y);
    // the softened inverse pole leaks a small bounded reconstruction error
    for (std::size_t i = 0; i < x.size(); ++i)
        CHECK(std::abs(back[i] - x[i]) < 0.02);
}

TEST_CASE("fit_dc_blocker recovers a known roll-off") {
    const std::size_t nfft = 4096;
    const double fs = 48000.0;
    auto target = dc_blocker_magnitudes(0.97, nfft);
    DcBlocker fit = fit_dc_blocker(target, fs, nfft);
    CHECK(fit.pole_radius == doctest::Approx(0.97).epsilon(1e-6));

    auto fine = dc_blocker_magnitudes(0.999, nfft);
    DcBlocker fit2 = fit_dc_blocker(fine, fs, nfft);
    CHECK(fit2.pole_radius == doctest::Approx(0.999).epsilon(1e-6));
}

TEST_CASE("fit_dc_blocker falls back on flat spectra") {
    const std::size_t nfft = 4096;
    std::vector<double> flat(nfft / 2 + 1, 1.0);
    DcBlocker fit = fit_dc_blocker(flat, 48000.0, nfft);
    CHECK(fit.pole_radius == doctest::Approx(0.995));
}

TEST_CASE("stft of silence is all zero") {
    StftConfig cfg;
    cfg.fft_length = 512;
    cfg.window_length = 256;
    cfg.hop = 128;
    std::vector<double> sig(1000, 0.0);
    Matrix mags = stft_magnitudes(sig, cfg);
    for (std::size_t f = 0; f < mags.cols; ++f)
        for (std::size_t k = 0; k < mags.rows; ++k) CHECK(mags(k, f) == 0.0);
}

TEST_CASE("stft of a bin-centered sinusoid peaks at its bin in every full frame") {
    StftConfig cfg;
    cfg.fft_length = 256;
    cfg.window_length = 256;
    cfg.hop = 128;
    const std::size_t bin = 16;
    std::vector<double> sig(2048);
    for (std::size_t n = 0; n < sig.size(); ++n)
        sig[n] = std::sin(2.0 * std::numbers::pi * bin * n / 256.0);
    Matrix mags = stft_magnitudes(sig, cfg);
    const std::size_t full_frames = (sig.size() - cfg.window_length) / cfg.hop + 1;
    for (std::size_t f = 0; f < full_frames; ++f) {
        std::size_t peak = 0;
        for (std::size_t k = 1; k < mags.rows; ++k)
            if (mags(k, f) > mags(peak, f)) peak = k;
        CHECK(peak == bin);
    }
}

TEST_CASE("order-2 lp on white noise is near flat") {
    RngStream rng(14);
    std::vector<double> noise(16384);
    for (auto& v : noise) v = rng.uniform() - 0.5;
    AllpoleFilter f = lp_from_signal(noise, 2);
    CHECK(std::abs(f.a[0]) < 0.05);
    CHECK(std::abs(f.a[1]) < 0.05);
}

TEST_CASE("order-1 lp recovers an ar(1) pole from a long realization") {
    AllpoleFilter truth;
    truth.a = {-0.9};
    RngStream rng(15);
    std::vector<double> noise(1 << 17);
    for (auto& v : noise) v = rng.uniform() - 0.5;
    auto colored = apply_allpole(truth, noise);
    AllpoleFilter fit = lp_from_signal(colored, 1);
    CHECK(fit.a[0] == doctest::Approx(-0.9).epsilon(0.02 / 0.9));
}

TEST_CASE("fit_dc_blocker clamps to the steepest candidate") {
    // a notch narrower than any candidate's needs a sub-hertz bin grid to
    // register at all; the search then clamps at its upper boundary
    const std::size_t nfft = std::size_t{1} << 20;
    auto steep = dc_blocker_magnitudes(0.99995, nfft);
    DcBlocker fit = fit_dc_blocker(steep, 48000.0, nfft);
    CHECK(fit.pole_radius == doctest::Approx(0.9999));
}

TEST_CASE("identity filter passes signals through unchanged") {
    AllpoleFilter id;  // b0 = 1, no denominator
    std::vector<double> x{0.3, -0.7, 1.0, 0.0, 0.25};
    CHECK(apply_allpole(id, x) == x);
    CHECK(apply_inverse(id, x) == x);
}

TEST_CASE("fft_convolve matches direct convolution") {
    std::vector<double> a{1, 2, 3};
    std::vector<double> b{0.5, -1, 0, 2};
    auto c = fft_convolve(a, b);
    REQUIRE(c.size() == 6);
    std::vector<double> direct(6, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) direct[i + j] += a[i] * b[j];
    for (std::size_t i = 0; i < 6; ++i)
        CHECK(c[i] == doctest::Approx(direct[i]).epsilon(1e-12));
}
