#include "dvn/pulse_train.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "dvn/errors.hpp"

namespace dvn {

double DensityProfile::density_at(double sample) const {
    if (duration <= 0) return start_density;
    double t = std::clamp(sample / static_cast<double>(duration), 0.0, 1.0);
    return start_density + t * (end_density - start_density);
}

void DensityProfile::validate() const {
    if (start_density <= 0.0 || end_density <= 0.0)
        throw std::invalid_argument("DensityProfile: densities must be positive");
    if (duration <= 0)
        throw std::invalid_argument("DensityProfile: duration must be positive");
}

double grid_size(double density, double sample_rate) {
    if (density <= 0.0) throw std::invalid_argument("grid_size: density must be positive");
    if (sample_rate <= 0.0) throw std::invalid_argument("grid_size: sample rate must be positive");
    return sample_rate / density;
}

std::vector<int> draw_pulse_widths(std::size_t count, int w_min, int w_max, RngStream& rng) {
    if (w_min < 1) throw std::invalid_argument("draw_pulse_widths: w_min must be >= 1");
    if (w_max < w_min) throw std::invalid_argument("draw_pulse_widths: w_max must be >= w_min");
    std::vector<int> widths(count);
    for (std::size_t m = 0; m < count; ++m) {
        double r2 = rng.uniform();
        widths[m] = static_cast<int>(round_half_up(r2 * (w_max - w_min) + w_min));
    }
    return widths;
}

PulseTrain generate_pulse_train(const DensityProfile& profile, double sample_rate,
                                std::span<const int> widths, RngStream& rng) {
    profile.validate();
    if (sample_rate <= 0.0) throw std::invalid_argument("generate_pulse_train: bad sample rate");

    PulseTrain train;
    double cell_start = 0.0;
    const double duration = static_cast<double>(profile.duration);
    std::size_t m = 0;
    while (true) {
        double t_grid = sample_rate / profile.density_at(cell_start);
        if (cell_start + t_grid > duration) break;

        int w = 1;
        if (!widths.empty()) {
            if (widths.size() == 1) {
                w = widths[0];
            } else if (m < widths.size()) {
                w = widths[m];
            } else {
                throw std::invalid_argument("generate_pulse_train: widths exhausted at pulse " +
                                            std::to_string(m));
            }
        }
        if (w < 1 || static_cast<double>(w) > t_grid)
            throw std::invalid_argument("generate_pulse_train: width " + std::to_string(w) +
                                        " outside [1, grid size] at pulse " + std::to_string(m));

        double r1 = rng.uniform();
        std::int64_t loc = round_half_up(cell_start + r1 * (t_grid - w));
        double r3 = rng.uniform();
        int sign = static_cast<int>(2 * round_half_up(r3) - 1);

        train.locations.push_back(loc);
        train.signs.push_back(sign);
        train.widths.push_back(w);
        train.grid_sizes.push_back(t_grid);

        cell_start += t_grid;
        ++m;
    }
    return train;
}

std::vector<double> render_basic_dvn(const PulseTrain& train, std::size_t length) {
    std::vector<double> out(length, 0.0);
    for (std::size_t m = 0; m < train.size(); ++m) {
        std::int64_t l = train.locations[m];
        int w = train.widths.empty() ? 1 : train.widths[m];
        if (m + 1 < train.size() && l + w > train.locations[m + 1])
            throw std::invalid_argument("render_basic_dvn: overlapping pulses at index " +
                                        std::to_string(m));
        if (l < 0 || static_cast<std::size_t>(l + w) > length)
            throw std::invalid_argument("render_basic_dvn: pulse outside output at index " +
                                        std::to_string(m));
        for (int k = 0; k < w; ++k) out[static_cast<std::size_t>(l) + k] = train.signs[m];
    }
    return out;
}

namespace {

// Shared argmax over active entries (p_i > 0); ties break to lowest index.
int pick_filter(std::span<const double> p, std::span<const double> score, std::size_t m) {
    int best = -1;
    double best_score = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i] < 0.0)
            throw std::invalid_argument("filter assignment: negative probability at pulse " +
                                        std::to_string(m));
        if (p[i] == 0.0) continue;
        if (best < 0 || score[i] > best_score) {
            best = static_cast<int>(i);
            best_score = score[i];
        }
    }
    if (best < 0)
        throw numeric_error("filter assignment: all-zero probability column at pulse " +
                            std::to_string(m));
    return best;
}

}  // namespace

std::vector<int> naive_assign(const Matrix& probs, RngStream& rng) {
    std::vector<int> indices(probs.cols);
    std::vector<double> score(probs.rows);
    for (std::size_t m = 0; m < probs.cols; ++m) {
        auto p = probs.col(m);
        for (std::size_t i = 0; i < probs.rows; ++i) score[i] = rng.uniform() * p[i];
        indices[m] = pick_filter(p, score, m);
    }
    return indices;
}

std::vector<int> greedy_assign(const Matrix& probs, double kappa, RngStream& rng) {
    if (kappa < 0.0) throw std::invalid_argument("greedy_assign: kappa must be >= 0");
    std::vector<int> indices(probs.cols);
    std::vector<double> tau(probs.rows, 0.0);
    std::vector<double> score(probs.rows);
    for (std::size_t m = 0; m < probs.cols; ++m) {
        auto p = probs.col(m);
        for (std::size_t i = 0; i < probs.rows; ++i)
            score[i] = (tau[i] + kappa * rng.uniform()) * p[i];
        int k = pick_filter(p, score, m);
        indices[m] = k;
        for (std::size_t i = 0; i < probs.rows; ++i)
            tau[i] = (static_cast<int>(i) == k) ? 0.0 : tau[i] + 1.0;
    }
    return indices;
}

}  // namespace dvn
