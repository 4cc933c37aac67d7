#pragma once

#include "comblink/types.hpp"

namespace comblink {

// RRC matched filter (frequency-domain, matching the analytic pulse) plus
// resampling to sps_out samples per symbol, grid-aligned so that output
// sample k sits at t = k / (sps_out * baud): even output indices are symbol
// centers when sps_out = 2.
Frame matched_filter_downsample(const Frame& frame, double baud, double rolloff,
                                int sps_out = 2);

// Analytic RRC amplitude response at frequency f (baud-normalized design).
double rrc_freq_response(double f, double baud, double rolloff);

}  // namespace comblink
