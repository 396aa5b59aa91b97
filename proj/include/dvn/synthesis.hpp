#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "dvn/model.hpp"

namespace dvn {

enum class AssignMode { greedy, naive, fvn_filter_interp };

struct SynthesisConfig {
    std::uint64_t seed = 0;
    double kappa = 1.0;  // greedy randomization amount
    AssignMode mode = AssignMode::greedy;
    std::optional<std::int64_t> length;  // late-part length override, samples
    bool include_early = false;
};

struct ImpulseResponse {
    double sample_rate = 48000.0;
    std::int64_t late_start = 0;  // early/late split index
    std::vector<double> samples;
};

// Linear interpolation of per-frame rows onto pulse locations; query points
// outside [first, last] frame time clamp to the endpoint. When
// renormalize_columns is set each interpolated column is rescaled to sum 1.
Matrix interpolate_to_pulses(const Matrix& frame_values, std::span<const double> frame_times,
                             std::span<const std::int64_t> pulse_locations,
                             bool renormalize_columns);

std::vector<double> interpolate_series(std::span<const double> values,
                                       std::span<const double> times,
                                       std::span<const std::int64_t> query_points);

// g(m) = ghat(m) * sqrt(T(m)): the sqrt of the grid size compensates the
// energy change of the time-varying density.
std::vector<double> pulse_gains(std::span<const double> interp_gains,
                                std::span<const double> grid_sizes);

// Impulse response of an allpole filter, truncated where the tail stays
// below floor_db relative to its peak.
std::vector<double> allpole_impulse_response(const AllpoleFilter& filter, double floor_db = -120.0);

enum class FvnMode { filter_interp, probability_interp };

// Matched-dictionary assignment modes: filter_interp resolves the per-frame
// argmax filter and switches at frame boundaries; probability_interp
// interpolates the probability columns first and assigns per pulse.
std::vector<int> fvn_mode_assign(const Matrix& prob_matrix, std::span<const double> frame_times,
                                 std::span<const std::int64_t> pulse_locations, FvnMode mode,
                                 RngStream& rng);

// |H(w)| = sum_i p_i |F_i(w)| on the analysis bin grid.
std::vector<double> predict_psd(const DvnModel& model, std::span<const double> probabilities);

// Full render: pulse train from the density profile, interpolated gains and
// probabilities, filter assignment, per-filter scatter-add, post-filter and
// DC blockers, optional early-part prepend. Deterministic given the seed.
ImpulseResponse synthesize(const DvnModel& model, const SynthesisConfig& config);

}  // namespace dvn
