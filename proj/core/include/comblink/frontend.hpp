#pragma once

#include "comblink/types.hpp"

namespace comblink {

// Receiver front end: brick-wall low-pass at `bandwidth_hz` (one-sided),
// rational resampling to target_rate, and a fractional-delay `skew_s`
// applied as a frequency-domain phase ramp. target_rate must divide the
// frame length rationally (n_out = n_in * target/source must be integral).
Frame rx_frontend(const Frame& frame, double target_rate_hz, double bandwidth_hz,
                  double skew_s);

// FFT-domain resampler used by the front end and matched filter; exposed for
// reuse. Keeps t0.
Frame resample_fft(const Frame& frame, double target_rate_hz);

// Pure fractional delay (positive delays the signal).
Frame fractional_delay(const Frame& frame, double delay_s);

}  // namespace comblink
