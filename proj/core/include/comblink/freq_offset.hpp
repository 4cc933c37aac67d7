#pragma once

#include <span>

#include "comblink/types.hpp"

namespace comblink {

// Carrier frequency offset from the peak of the 4th-power spectrum, refined
// by parabolic interpolation of the peak bin. Works for any constellation
// with 4-fold rotational symmetry. Throws dsp_error when no dominant peak
// exists (peak-to-mean power ratio below `min_peak_to_mean`).
double estimate_foe_4thpower(std::span<const cplx> samples, double sample_rate,
                             double min_peak_to_mean = 20.0);

// Comb spacing difference from the frequency offsets of two channels:
// (foe_b - foe_a) / (n_b - n_a).
double estimate_spacing_difference(double foe_a_hz, double foe_b_hz, int n_a, int n_b);

}  // namespace comblink
