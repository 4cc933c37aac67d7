#include <cmath>

#include "comblink/metrics.hpp"

namespace comblink {

namespace {

// log2(1 + exp(u)), stable for large |u|
double log2_1p_exp(double u) {
    constexpr double ln2 = 0.6931471805599453;
    if (u > 40.0) return u / ln2;
    if (u < -40.0) return std::exp(u) / ln2;
    return std::log1p(std::exp(u)) / ln2;
}

}  // namespace

double compute_gmi_2d(std::span<const cplx> rx, std::span<const std::uint8_t> tx_bits,
                      const Constellation& c) {
    const int m = c.bits_per_symbol();
    if (rx.size() * static_cast<std::size_t>(m) != tx_bits.size())
        throw shape_error("compute_gmi: symbol/bit count mismatch");
    if (rx.empty()) throw shape_error("compute_gmi: empty input");

    // Complex least-squares scale to the reference constellation, then the
    // per-polarization noise variance from the data-aided error.
    std::vector<cplx> tx_sym = map_qam(tx_bits, c);
    cplx num(0.0, 0.0);
    double den = 0.0;
    for (std::size_t k = 0; k < rx.size(); ++k) {
        num += tx_sym[k] * std::conj(rx[k]);
        den += std::norm(rx[k]);
    }
    if (den <= 0.0) throw shape_error("compute_gmi: zero-power input");
    const cplx h = num / den;
    double sigma2 = 0.0;
    for (std::size_t k = 0; k < rx.size(); ++k) sigma2 += std::norm(h * rx[k] - tx_sym[k]);
    sigma2 /= static_cast<double>(rx.size());
    sigma2 = std::max(sigma2, 1e-12);

    // Exact bit-metric LLRs; per-symbol max subtraction keeps the exps sane.
    const std::size_t n_pts = c.points.size();
    double loss = 0.0;  // sum over symbols and bit levels of log2(1+exp(...))
    std::vector<double> metric(n_pts);
    for (std::size_t k = 0; k < rx.size(); ++k) {
        const cplx y = h * rx[k];
        double mmax = -1e300;
        for (std::size_t a = 0; a < n_pts; ++a) {
            metric[a] = -std::norm(y - c.points[a]) / sigma2;
            if (metric[a] > mmax) mmax = metric[a];
        }
        for (int i = 0; i < m; ++i) {
            const std::uint32_t mask = 1u << (m - 1 - i);
            double s1 = 0.0, s0 = 0.0;
            for (std::size_t a = 0; a < n_pts; ++a) {
                const double e = std::exp(metric[a] - mmax);
                if (c.bit_labels[a] & mask)
                    s1 += e;
                else
                    s0 += e;
            }
            const double llr = std::log(s1) - std::log(s0);
            const double b = tx_bits[k * m + i];
            loss += log2_1p_exp((1.0 - 2.0 * b) * llr);
        }
    }
    return static_cast<double>(m) - loss / static_cast<double>(rx.size());
}

double compute_gmi(std::span<const cplx> rx_x, std::span<const cplx> rx_y,
                   std::span<const std::uint8_t> tx_bits_x,
                   std::span<const std::uint8_t> tx_bits_y, const Constellation& c) {
    if (rx_x.size() != rx_y.size())
        throw shape_error("compute_gmi: polarization symbol counts differ");
    return compute_gmi_2d(rx_x, tx_bits_x, c) + compute_gmi_2d(rx_y, tx_bits_y, c);
}

}  // namespace comblink
