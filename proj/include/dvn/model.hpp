#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "dvn/dsp.hpp"
#include "dvn/matrix.hpp"
#include "dvn/pulse_train.hpp"

namespace dvn {

// One coloration filter of the dictionary: a second-order allpole with its
// magnitude response precomputed on the analysis bin grid and normalized to
// unit mean-square energy.
struct DictionaryFilter {
    AllpoleFilter allpole;
    std::vector<double> magnitude;  // bins 0..fft_length/2
    int source_frame = 0;           // 1-based analysis frame the filter came from
};

// Complete serializable fit of a target late-reverberation IR.
//
// prob_matrix columns and frame_gains carry their own time axes
// (prob_times / gain_times, samples relative to late_start) so the
// spectral-evolution and decay modifications can move them independently.
struct DvnModel {
    double sample_rate = 48000.0;
    std::int64_t late_start = 0;  // samples into the original IR

    AllpoleFilter post_filter;
    std::vector<DcBlocker> dc_blockers;
    std::vector<DictionaryFilter> dictionary;

    Matrix prob_matrix;              // N x L_P, column-stochastic (or degenerate)
    std::vector<double> prob_times;  // strictly increasing frame-center times
    std::vector<double> frame_gains;
    std::vector<double> gain_times;

    StftConfig framing;
    DensityProfile density;  // duration = late-part length in samples
    std::uint64_t seed = 0;
    std::optional<std::int64_t> gate;  // samples relative to late_start

    std::vector<double> early_part;  // unmodeled samples before late_start

    std::size_t num_filters() const { return dictionary.size(); }
    std::size_t num_bins() const { return framing.num_bins(); }
};

}  // namespace dvn
