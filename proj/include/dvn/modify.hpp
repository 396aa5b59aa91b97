#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dvn/model.hpp"

namespace dvn {

// All transforms are model-to-model; gate_ir is the rendered-IR convenience.

// Pulses at or beyond gate_time (samples after late_start) are dropped at
// render time.
DvnModel gate(DvnModel model, std::int64_t gate_time);

// Samples at or beyond gate_time zeroed.
std::vector<double> gate_ir(std::span<const double> ir, std::int64_t gate_time);

// Duration and both frame-time axes scaled by factor.
DvnModel stretch(DvnModel model, double factor);

// Keeps the first round(L * alpha) probability columns and spreads them over
// the original time span; gains untouched, so decay and spectral evolution
// stay decoupled.
DvnModel scale_spectral_evolution(DvnModel model, double alpha);

// Reverses the probability columns in time; gains untouched.
DvnModel reverse_spectral(DvnModel model);

// Reverses the gain sequence (and the density ramp, so pulse statistics
// follow the flipped envelope); probabilities untouched.
DvnModel reverse_decay(DvnModel model);

}  // namespace dvn
