#pragma once

#include <span>
#include <vector>

#include "comblink/types.hpp"

namespace comblink {

// Unit-energy root-raised-cosine FIR taps, odd length span*sps + 1, centered.
// Throws config_error if the span captures less than 99.9% of the pulse
// energy.
std::vector<double> rrc_taps(double rolloff, int sps, int span);

// Upsample symbols by sps and filter with the RRC. The output frame is
// single-polarization at sample_rate = sps * baud with t0 chosen so that
// symbol m is centered at t = m / baud.
Frame rrc_shape(std::span<const cplx> symbols, double rolloff, int sps, int span,
                double baud);

}  // namespace comblink
