#include "comblink/constellation.hpp"

#include <algorithm>
#include <cmath>

namespace comblink {

namespace {

int ilog2(int v) {
    int m = 0;
    while ((1 << m) < v) ++m;
    return m;
}

std::uint32_t gray_encode(std::uint32_t v) { return v ^ (v >> 1); }

// level 0 -> +(L-1), level L-1 -> -(L-1), step -2 (before scaling)
inline double level_amplitude(int level, int L, double scale) {
    return (L - 1 - 2 * level) * scale;
}

inline int quantize_level(double v, int L, double scale) {
    // level = (L-1 - v/scale)/2, exact midpoints resolve to the smaller
    // level (the lower point index).
    if (!std::isfinite(v)) return 0;
    const double x = (L - 1 - v / scale) / 2.0;
    int lv = static_cast<int>(std::ceil(x - 0.5));
    if (lv < 0) lv = 0;
    if (lv > L - 1) lv = L - 1;
    return lv;
}

}  // namespace

int Constellation::bits_per_symbol() const { return ilog2(order); }

int Constellation::levels_per_axis() const {
    return static_cast<int>(std::lround(std::sqrt(static_cast<double>(order))));
}

double Constellation::axis_scale() const {
    const int L = levels_per_axis();
    return 1.0 / std::sqrt(2.0 * (L * L - 1) / 3.0);
}

std::size_t Constellation::nearest_index(cplx y) const {
    const int L = levels_per_axis();
    const double s = axis_scale();
    const int li = quantize_level(y.real(), L, s);
    const int lq = quantize_level(y.imag(), L, s);
    return static_cast<std::size_t>(li * L + lq);
}

std::vector<double> Constellation::modulus_squared_levels() const {
    std::vector<double> r2;
    for (const cplx& p : points) {
        const double m2 = std::norm(p);
        bool found = false;
        for (double v : r2)
            if (std::abs(v - m2) < 1e-12) { found = true; break; }
        if (!found) r2.push_back(m2);
    }
    std::sort(r2.begin(), r2.end());
    return r2;
}

Constellation make_qam(int order) {
    if (order != 4 && order != 16 && order != 64)
        throw config_error("make_qam: supported orders are 4, 16, 64");
    const int m = ilog2(order);
    const int L = 1 << (m / 2);
    const double scale = 1.0 / std::sqrt(2.0 * (L * L - 1) / 3.0);

    Constellation c;
    c.order = order;
    c.points.resize(order);
    c.bit_labels.resize(order);
    for (int li = 0; li < L; ++li) {
        for (int lq = 0; lq < L; ++lq) {
            const int idx = li * L + lq;
            c.points[idx] = cplx(level_amplitude(li, L, scale),
                                 level_amplitude(lq, L, scale));
            c.bit_labels[idx] =
                (gray_encode(static_cast<std::uint32_t>(li)) << (m / 2)) |
                gray_encode(static_cast<std::uint32_t>(lq));
        }
    }
    return c;
}

std::vector<cplx> map_qam(std::span<const std::uint8_t> bits, const Constellation& c) {
    const int m = c.bits_per_symbol();
    if (bits.size() % m != 0)
        throw shape_error("map_qam: bit count not divisible by bits per symbol");
    // label -> point index lookup
    std::vector<std::size_t> by_label(c.order);
    for (std::size_t i = 0; i < c.points.size(); ++i) by_label[c.bit_labels[i]] = i;

    std::vector<cplx> out(bits.size() / m);
    for (std::size_t k = 0; k < out.size(); ++k) {
        std::uint32_t label = 0;
        for (int b = 0; b < m; ++b)
            label = (label << 1) | (bits[k * m + b] & 1u);
        out[k] = c.points[by_label[label]];
    }
    return out;
}

std::vector<std::uint8_t> demap_hard(std::span<const cplx> symbols,
                                     const Constellation& c) {
    const int m = c.bits_per_symbol();
    std::vector<std::uint8_t> bits(symbols.size() * m);
    for (std::size_t k = 0; k < symbols.size(); ++k)
        hard_bits(c, symbols[k], &bits[k * m]);
    return bits;
}

void hard_bits(const Constellation& c, cplx y, std::uint8_t* out) {
    const int m = c.bits_per_symbol();
    const std::uint32_t label = c.bit_labels[c.nearest_index(y)];
    for (int b = 0; b < m; ++b)
        out[b] = static_cast<std::uint8_t>((label >> (m - 1 - b)) & 1u);
}

}  // namespace comblink
