#include "dvn/modify.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dvn/pulse_train.hpp"

namespace dvn {

DvnModel gate(DvnModel model, std::int64_t gate_time) {
    if (gate_time <= 0) throw std::invalid_argument("gate: gate_time must be positive");
    model.gate = model.gate ? std::min(*model.gate, gate_time) : gate_time;
    return model;
}

std::vector<double> gate_ir(std::span<const double> ir, std::int64_t gate_time) {
    if (gate_time <= 0) throw std::invalid_argument("gate_ir: gate_time must be positive");
    std::vector<double> out(ir.begin(), ir.end());
    for (std::size_t n = static_cast<std::size_t>(std::min<std::int64_t>(
             gate_time, static_cast<std::int64_t>(out.size())));
         n < out.size(); ++n)
        out[n] = 0.0;
    return out;
}

DvnModel stretch(DvnModel model, double factor) {
    if (factor <= 0.0) throw std::invalid_argument("stretch: factor must be positive");
    if (factor == 1.0) return model;
    model.density.duration = round_half_up(static_cast<double>(model.density.duration) * factor);
    for (double& t : model.prob_times) t *= factor;
    for (double& t : model.gain_times) t *= factor;
    if (model.gate) model.gate = round_half_up(static_cast<double>(*model.gate) * factor);
    return model;
}

DvnModel scale_spectral_evolution(DvnModel model, double alpha) {
    if (!(alpha > 0.0) || alpha > 1.0)
        throw std::invalid_argument("scale_spectral_evolution: alpha must be in (0, 1]");
    const std::size_t total = model.prob_matrix.cols;
    auto kept = static_cast<std::size_t>(round_half_up(static_cast<double>(total) * alpha));
    kept = std::clamp<std::size_t>(kept, 1, total);
    if (kept == total) return model;

    Matrix trimmed(model.prob_matrix.rows, kept);
    std::copy_n(model.prob_matrix.data.begin(), trimmed.data.size(), trimmed.data.begin());
    model.prob_matrix = std::move(trimmed);

    // Spread the surviving columns over the original time span.
    std::vector<double> times(model.prob_times.begin(),
                              model.prob_times.begin() + static_cast<std::ptrdiff_t>(kept));
    const double t0 = times.front();
    const double span_old = times.back() - t0;
    const double span_new = model.prob_times.back() - t0;
    if (kept > 1 && span_old > 0.0)
        for (double& t : times) t = t0 + (t - t0) * span_new / span_old;
    model.prob_times = std::move(times);
    return model;
}

DvnModel reverse_spectral(DvnModel model) {
    const std::size_t n = model.prob_matrix.cols;
    for (std::size_t c = 0; c < n / 2; ++c) {
        auto a = model.prob_matrix.col(c);
        auto b = model.prob_matrix.col(n - 1 - c);
        std::swap_ranges(a.begin(), a.end(), b.begin());
    }
    return model;
}

DvnModel reverse_decay(DvnModel model) {
    std::reverse(model.frame_gains.begin(), model.frame_gains.end());
    std::swap(model.density.start_density, model.density.end_density);
    return model;
}

}  // namespace dvn
