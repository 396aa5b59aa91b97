#include "dvn/cli.hpp"

#include <cmath>
#include <cstdio>
#include <optional>

#include <CLI11.hpp>

#include "dvn/analysis.hpp"
#include "dvn/dsp.hpp"
#include "dvn/errors.hpp"
#include "dvn/metrics.hpp"
#include "dvn/model_io.hpp"
#include "dvn/modify.hpp"
#include "dvn/synthesis.hpp"
#include "dvn/wav.hpp"

namespace dvn {

namespace {

std::pair<double, double> parse_pair(const std::string& text, const char* what) {
    auto sep = text.find(':');
    if (sep == std::string::npos || sep == 0 || sep + 1 >= text.size())
        throw CLI::ValidationError(std::string(what) + ": expected <start>:<end>");
    try {
        return {std::stod(text.substr(0, sep)), std::stod(text.substr(sep + 1))};
    } catch (const std::exception&) {
        throw CLI::ValidationError(std::string(what) + ": expected numeric <start>:<end>");
    }
}

std::vector<double> load_mono_ir(const std::string& path, const char* command,
                                 double* sample_rate) {
    AudioFile audio = read_wav(path);
    if (audio.channels != 1)
        throw io_error(std::string(command) + ": " + path + " has " +
                       std::to_string(audio.channels) +
                       " channels; impulse responses must be mono (split or downmix first)");
    *sample_rate = audio.sample_rate;
    return audio.samples;
}

WavEncoding parse_encoding(const std::string& name) {
    if (name == "float32") return WavEncoding::float32;
    if (name == "pcm16") return WavEncoding::pcm16;
    if (name == "pcm24") return WavEncoding::pcm24;
    throw CLI::ValidationError("encoding must be float32, pcm16, or pcm24");
}

}  // namespace

int cli_run(const std::vector<std::string>& argv) {
    CLI::App app{"Extended dark-velvet-noise late-reverberation modeling toolkit"};
    app.require_subcommand(1);

    // ---- analyze ----
    std::string an_input, an_output;
    double an_late_ms = 110.0, an_window_ms = 85.0;
    std::size_t an_fft = 2048, an_dict = 10, an_lp = 10, an_dc = 1;
    std::string an_density = "2000:500";
    std::uint64_t an_seed = kDefaultSeed;
    auto* analyze_cmd = app.add_subcommand("analyze", "Fit a model to a target IR");
    analyze_cmd->add_option("target", an_input, "Target impulse response (mono WAV)")->required();
    analyze_cmd->add_option("-o,--output", an_output, "Output model JSON")->required();
    analyze_cmd->add_option("--late-start-ms", an_late_ms, "Late-reverberation start (ms)");
    analyze_cmd->add_option("--window-ms", an_window_ms, "STFT window length (ms)");
    analyze_cmd->add_option("--fft", an_fft, "FFT length (grows to fit the window)");
    analyze_cmd->add_option("--dict", an_dict, "Number of dictionary filters");
    analyze_cmd->add_option("--lp-order", an_lp, "Post-filter LP order");
    analyze_cmd->add_option("--dc-blockers", an_dc, "Number of cascaded DC blockers");
    analyze_cmd->add_option("--density", an_density, "Pulse density ramp start:end (pulses/s)");
    analyze_cmd->add_option("--seed", an_seed, "Model default synthesis seed");

    // ---- synthesize ----
    std::string sy_model, sy_output, sy_assign = "greedy", sy_encoding = "float32";
    std::optional<std::uint64_t> sy_seed;
    double sy_kappa = 1.0;
    bool sy_early = false;
    auto* synth_cmd = app.add_subcommand("synthesize", "Render a model to an IR");
    synth_cmd->add_option("model", sy_model, "Model JSON")->required();
    synth_cmd->add_option("-o,--output", sy_output, "Output WAV")->required();
    synth_cmd->add_option("--seed", sy_seed, "Seed (defaults to the model's)");
    synth_cmd->add_option("--kappa", sy_kappa, "Greedy randomization amount");
    synth_cmd->add_option("--assign", sy_assign, "greedy | naive | fvn-filter-interp")
        ->check(CLI::IsMember({"greedy", "naive", "fvn-filter-interp"}));
    synth_cmd->add_flag("--include-early", sy_early, "Prepend the stored early part");
    synth_cmd->add_option("--encoding", sy_encoding, "float32 | pcm16 | pcm24");

    // ---- modify ----
    std::string mo_model, mo_output;
    std::optional<double> mo_gate_ms, mo_stretch, mo_alpha;
    bool mo_rev_spectral = false, mo_rev_decay = false;
    auto* modify_cmd = app.add_subcommand(
        "modify", "Transform a model (applied in order: stretch, alpha, reversals, gate)");
    modify_cmd->add_option("model", mo_model, "Input model JSON")->required();
    modify_cmd->add_option("-o,--output", mo_output, "Output model JSON")->required();
    modify_cmd->add_option("--gate-ms", mo_gate_ms, "Gate time (ms after late start)");
    modify_cmd->add_option("--stretch", mo_stretch, "Time-stretch factor");
    modify_cmd->add_option("--alpha", mo_alpha, "Spectral-evolution scale in (0, 1]");
    modify_cmd->add_flag("--reverse-spectral", mo_rev_spectral, "Reverse the spectral evolution");
    modify_cmd->add_flag("--reverse-decay", mo_rev_decay, "Reverse the decay envelope");

    // ---- report ----
    std::string re_target, re_model_ir, re_bands = "125:8000", re_spectrogram;
    auto* report_cmd = app.add_subcommand("report", "Per-band T60 comparison of two IRs");
    report_cmd->add_option("target", re_target, "Target IR (mono WAV)")->required();
    report_cmd->add_option("model_ir", re_model_ir, "Model IR (mono WAV)")->required();
    report_cmd->add_option("--bands", re_bands, "Band range min:max (Hz)");
    report_cmd->add_option("--spectrogram", re_spectrogram, "Export model-IR spectrogram CSV");

    // ---- convolve ----
    std::string co_ir, co_dry, co_output, co_encoding = "float32";
    auto* conv_cmd = app.add_subcommand("convolve", "Convolve a dry signal with an IR");
    conv_cmd->add_option("ir", co_ir, "Impulse response (mono WAV)")->required();
    conv_cmd->add_option("dry", co_dry, "Dry input WAV")->required();
    conv_cmd->add_option("-o,--output", co_output, "Output WAV")->required();
    conv_cmd->add_option("--encoding", co_encoding, "float32 | pcm16 | pcm24");

    try {
        std::vector<std::string> args(argv.rbegin(), argv.rend());
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    }

    try {
        if (analyze_cmd->parsed()) {
            double fs = 0.0;
            std::vector<double> ir = load_mono_ir(an_input, "analyze", &fs);
            auto [d_start, d_end] = parse_pair(an_density, "--density");

            AnalysisConfig config;
            config.late_start = static_cast<std::int64_t>(std::llround(an_late_ms * fs / 1000.0));
            config.framing.window_length =
                static_cast<std::size_t>(std::llround(an_window_ms * fs / 1000.0));
            config.framing.hop = config.framing.window_length / 2;
            config.framing.fft_length = an_fft;
            config.num_filters = an_dict;
            config.lp_order = an_lp;
            config.num_dc_blockers = an_dc;
            config.start_density = d_start;
            config.end_density = d_end;
            config.seed = an_seed;

            DvnModel model = analyze(ir, fs, config);
            save_model(an_output, model);
            std::printf("wrote %s (%zu filters, %zu frames)\n", an_output.c_str(),
                        model.num_filters(), model.frame_gains.size());
        } else if (synth_cmd->parsed()) {
            DvnModel model = load_model(sy_model);
            SynthesisConfig config;
            config.seed = sy_seed.value_or(model.seed);
            config.kappa = sy_kappa;
            config.include_early = sy_early;
            if (sy_assign == "naive")
                config.mode = AssignMode::naive;
            else if (sy_assign == "fvn-filter-interp")
                config.mode = AssignMode::fvn_filter_interp;

            ImpulseResponse ir = synthesize(model, config);
            AudioFile out;
            out.sample_rate = ir.sample_rate;
            out.channels = 1;
            out.samples = std::move(ir.samples);
            write_wav(sy_output, out, parse_encoding(sy_encoding));
            std::printf("wrote %s (%zu samples)\n", sy_output.c_str(), out.samples.size());
        } else if (modify_cmd->parsed()) {
            DvnModel model = load_model(mo_model);
            if (mo_stretch) model = stretch(std::move(model), *mo_stretch);
            if (mo_alpha) model = scale_spectral_evolution(std::move(model), *mo_alpha);
            if (mo_rev_spectral) model = reverse_spectral(std::move(model));
            if (mo_rev_decay) model = reverse_decay(std::move(model));
            if (mo_gate_ms)
                model = gate(std::move(model), static_cast<std::int64_t>(std::llround(
                                                   *mo_gate_ms * model.sample_rate / 1000.0)));
            save_model(mo_output, model);
            std::printf("wrote %s\n", mo_output.c_str());
        } else if (report_cmd->parsed()) {
            double fs_target = 0.0, fs_model = 0.0;
            std::vector<double> target = load_mono_ir(re_target, "report", &fs_target);
            std::vector<double> model_ir = load_mono_ir(re_model_ir, "report", &fs_model);
            if (fs_target != fs_model)
                throw io_error("report: sample-rate mismatch between inputs");
            auto [f_min, f_max] = parse_pair(re_bands, "--bands");

            T60Error err = t60_error(model_ir, target, fs_target, f_min, f_max);
            std::printf("%10s %12s %12s %10s\n", "band_hz", "t60_target_s", "t60_model_s",
                        "error_pct");
            for (const BandT60& band : err.bands) {
                if (band.valid)
                    std::printf("%10.1f %12.4f %12.4f %10.2f\n", band.center_hz, band.t60_target,
                                band.t60_model, band.error_pct);
                else
                    std::printf("%10.1f %12s %12s %10s\n", band.center_hz, "-", "-", "excluded");
            }
            std::printf("mean_error_pct %.2f\n", err.mean_pct);
            std::printf("max_error_pct %.2f\n", err.max_pct);

            if (!re_spectrogram.empty()) {
                StftConfig spec_cfg{2048, 256, 128};
                write_spectrogram_csv(re_spectrogram, spectrogram_db(model_ir, spec_cfg), spec_cfg,
                                      fs_model);
                std::printf("wrote %s\n", re_spectrogram.c_str());
            }
        } else if (conv_cmd->parsed()) {
            double fs_ir = 0.0;
            std::vector<double> ir = load_mono_ir(co_ir, "convolve", &fs_ir);
            AudioFile dry = read_wav(co_dry);
            if (fs_ir != dry.sample_rate)
                throw io_error("convolve: sample-rate mismatch between IR and dry input");

            AudioFile wet;
            wet.sample_rate = dry.sample_rate;
            wet.channels = dry.channels;
            const std::size_t out_frames = dry.num_frames() + ir.size() - 1;
            wet.samples.resize(out_frames * dry.channels, 0.0);
            for (std::size_t ch = 0; ch < dry.channels; ++ch) {
                std::vector<double> mixed = fft_convolve(dry.channel(ch), ir);
                for (std::size_t n = 0; n < out_frames; ++n)
                    wet.samples[n * dry.channels + ch] = mixed[n];
            }
            write_wav(co_output, wet, parse_encoding(co_encoding));
            std::printf("wrote %s (%zu frames)\n", co_output.c_str(), out_frames);
        }
    } catch (const io_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const numeric_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
    return 0;
}

}  // namespace dvn
