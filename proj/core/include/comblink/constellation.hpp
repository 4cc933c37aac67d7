#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "comblink/types.hpp"

namespace comblink {

// Square QAM alphabet with unit average energy. Bit labels are per-axis
// reflected Gray, I bits first then Q bits, MSB first. Point index is
// (I level * L + Q level) with level 0 at the most positive amplitude.
struct Constellation {
    std::vector<cplx> points;
    std::vector<std::uint32_t> bit_labels;
    int order = 0;

    int bits_per_symbol() const;
    int levels_per_axis() const;   // L = sqrt(order)
    double axis_scale() const;     // spacing/2 of the normalized grid

    // Index of the nearest point (Euclidean); exact ties resolve to the
    // lowest point index.
    std::size_t nearest_index(cplx y) const;

    // Distinct |point|^2 values, ascending (multi-modulus CMA radii).
    std::vector<double> modulus_squared_levels() const;
};

Constellation make_qam(int order);  // 4, 16, 64

std::vector<cplx> map_qam(std::span<const std::uint8_t> bits, const Constellation& c);
std::vector<std::uint8_t> demap_hard(std::span<const cplx> symbols, const Constellation& c);

// Bits of the label of the nearest point for one symbol, MSB first, written
// to out[0..m).
void hard_bits(const Constellation& c, cplx y, std::uint8_t* out);

}  // namespace comblink
