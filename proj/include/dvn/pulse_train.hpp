#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "dvn/matrix.hpp"
#include "dvn/rng.hpp"

namespace dvn {

// Pulse density ramp: linear interpolation from start_density to end_density
// over [0, duration) samples.
struct DensityProfile {
    double start_density = 2000.0;  // pulses/s
    double end_density = 500.0;     // pulses/s
    std::int64_t duration = 0;      // samples

    double density_at(double sample) const;
    void validate() const;
};

// Sparse velvet-noise pulse train. Locations are strictly increasing.
// widths is used by the basic (square-pulse) variant only; the extended
// variant keeps every width at 1 and routes pulses to dictionary filters
// via filter_indices (0-based).
struct PulseTrain {
    std::vector<std::int64_t> locations;
    std::vector<int> signs;  // +1 or -1
    std::vector<int> widths;
    std::vector<double> gains;
    std::vector<int> filter_indices;
    std::vector<double> grid_sizes;  // grid size (samples) of the cell each pulse came from

    std::size_t size() const { return locations.size(); }
};

// Grid size in samples for a given pulse density. Callers quantize per
// pulse; the returned value is real-valued.
double grid_size(double density, double sample_rate);

// Uniformly random pulse widths in [w_min, w_max], rounded half-up.
std::vector<int> draw_pulse_widths(std::size_t count, int w_min, int w_max, RngStream& rng);

// One pulse per grid cell: location jittered inside the cell by
// r1 * (T - w), sign from a fresh uniform draw. The grid advances by the
// instantaneous grid size at the cell start; generation stops when the
// next cell would not fit inside profile.duration.
// `widths` may be empty (all widths 1), a single element (constant), or
// one entry per pulse.
PulseTrain generate_pulse_train(const DensityProfile& profile, double sample_rate,
                                std::span<const int> widths, RngStream& rng);

// Basic DVN rendering: sign s(m) held over [l(m), l(m)+w(m)).
std::vector<double> render_basic_dvn(const PulseTrain& train, std::size_t length);

// probs: one probability column (length N, nonnegative, sums to 1) per pulse.
// Returns 0-based filter indices.

// k(m) = argmax_i { r_i(m) * p_i(m) }; entries with p_i = 0 are never picked.
std::vector<int> naive_assign(const Matrix& probs, RngStream& rng);

// k(m) = argmax_i { (tau_i(m) + kappa * r_i(m)) * p_i(m) } with tau reset to 0
// on selection and incremented otherwise. tau_i(0) = 0; ties go to the lowest
// index.
std::vector<int> greedy_assign(const Matrix& probs, double kappa, RngStream& rng);

// Round half-up, the single rounding convention used for pulse placement.
inline std::int64_t round_half_up(double x) { return static_cast<std::int64_t>(std::floor(x + 0.5)); }

}  // namespace dvn
