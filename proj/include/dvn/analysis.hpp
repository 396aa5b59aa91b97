#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dvn/model.hpp"

namespace dvn {

struct AnalysisConfig {
    std::int64_t late_start = 0;   // samples
    StftConfig framing;            // fft_length grows to fit window_length if needed
    std::size_t num_filters = 10;  // dictionary size N
    std::size_t lp_order = 10;     // post-filter order
    std::size_t num_dc_blockers = 1;
    double start_density = 2000.0;  // pulses/s
    double end_density = 500.0;
    std::uint64_t seed = 0;
};

struct WhitenResult {
    std::vector<double> whitened;  // late part through the inverse LP filter
    AllpoleFilter post_filter;
    std::vector<DcBlocker> dc_blockers;
};

// LP post-filter from the first late STFT frame; the whitened IR is the late
// part through the exact LP inverse. Fitted DC blockers are returned but not
// inverted in the time domain (their near-unit inverse pole would smear a
// slow tail into the decay); apply whiten_frames_dc to STFT magnitudes
// instead.
WhitenResult whiten(std::span<const double> target_ir, double sample_rate,
                    std::int64_t late_start, const StftConfig& framing, std::size_t lp_order,
                    std::size_t num_dc_blockers);

// Divide STFT magnitude columns by the fitted DC blockers (softened inverse
// magnitude response).
void whiten_frames_dc(Matrix& frames, std::span<const DcBlocker> dc_blockers,
                      std::size_t fft_length);

// Rounded geometric frame subset from 1 to num_frames. The point count is
// densified until num_frames distinct indices survive rounding, which for
// (50, 10) yields {1, 2, 3, 5, 7, 10, 15, 23, 34, 50}. Returned indices are
// 1-based and strictly increasing.
std::vector<std::size_t> select_log_spaced_frames(std::size_t num_frames, std::size_t subset_size);

// Order-2 LP per selected analysis frame, unit mean-square energy.
std::vector<DictionaryFilter> design_dictionary(std::span<const double> whitened_ir,
                                                const StftConfig& framing,
                                                std::size_t num_filters);

// Same, but on an explicit frame-magnitude matrix (one column per frame).
std::vector<DictionaryFilter> design_dictionary_from_frames(const Matrix& frame_mags,
                                                            const StftConfig& framing,
                                                            std::size_t num_filters);

struct ProbabilityFit {
    Matrix prob_matrix;              // N x L_F
    std::vector<double> frame_gains;  // L_F
};

// Per-frame NNLS of the dictionary magnitudes onto the frame magnitudes;
// gains are the 1-norms of the activation columns, probabilities the
// column-normalized activations. All-zero frames get gain 0 and a uniform
// column.
ProbabilityFit fit_probabilities(std::span<const double> whitened_ir,
                                 std::span<const DictionaryFilter> dictionary,
                                 const StftConfig& framing);

ProbabilityFit fit_probabilities_from_frames(const Matrix& frame_mags,
                                             std::span<const DictionaryFilter> dictionary);

// Frame-center time of 0-based frame index f, in samples after late_start.
double frame_center_time(const StftConfig& framing, std::size_t frame_index);

// Full pipeline: whiten -> design_dictionary -> fit_probabilities.
DvnModel analyze(std::span<const double> target_ir, double sample_rate,
                 const AnalysisConfig& config);

}  // namespace dvn
