#pragma once

#include <vector>

#include "comblink/types.hpp"

namespace comblink::fft {

// In-place complex FFT/IFFT, any length. forward() is unnormalized,
// inverse() scales by 1/N. Plan creation is serialized internally; execution
// on distinct buffers is safe from concurrent threads.
void forward(std::vector<cplx>& data);
void inverse(std::vector<cplx>& data);

std::vector<cplx> forward_copy(const std::vector<cplx>& data);

// k-th bin frequency in Hz for an N-point transform at sample_rate,
// negative frequencies in the upper half.
double bin_freq(std::size_t k, std::size_t n, double sample_rate);

}  // namespace comblink::fft
