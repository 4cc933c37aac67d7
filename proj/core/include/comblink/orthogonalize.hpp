#pragma once

#include "comblink/types.hpp"

namespace comblink {

// Gram-Schmidt I/Q orthogonalization per polarization: removes quadrature
// skew and amplitude imbalance, leaving each component with unit power and
// zero I/Q sample cross-correlation.
Frame gram_schmidt(const Frame& frame);

}  // namespace comblink
