#include <cmath>
#include <limits>

#include "comblink/metrics.hpp"

namespace comblink {

MetricsReport compute_evm_snr_ber(std::span<const cplx> rx,
                                  std::span<const cplx> tx_symbols,
                                  std::span<const std::uint8_t> tx_bits,
                                  const Constellation& c) {
    if (rx.size() != tx_symbols.size())
        throw shape_error("compute_evm_snr_ber: length mismatch");
    const int m = c.bits_per_symbol();
    if (tx_bits.size() != rx.size() * static_cast<std::size_t>(m))
        throw shape_error("compute_evm_snr_ber: bit count mismatch");

    cplx num(0.0, 0.0);
    double den = 0.0;
    for (std::size_t k = 0; k < rx.size(); ++k) {
        num += tx_symbols[k] * std::conj(rx[k]);
        den += std::norm(rx[k]);
    }
    const cplx h = den > 0.0 ? num / den : cplx(1.0, 0.0);

    double p_err = 0.0, p_sig = 0.0;
    std::size_t bit_errors = 0;
    std::vector<std::uint8_t> hb(m);
    for (std::size_t k = 0; k < rx.size(); ++k) {
        const cplx y = h * rx[k];
        p_err += std::norm(y - tx_symbols[k]);
        p_sig += std::norm(tx_symbols[k]);
        hard_bits(c, y, hb.data());
        for (int i = 0; i < m; ++i)
            bit_errors += hb[i] != tx_bits[k * m + i];
    }

    MetricsReport r;
    if (p_err <= 0.0) {
        r.evm_db = -std::numeric_limits<double>::infinity();
        r.snr_db = std::numeric_limits<double>::infinity();
    } else {
        r.evm_db = 10.0 * std::log10(p_err / p_sig);
        r.snr_db = 10.0 * std::log10(p_sig / p_err);
    }
    r.ber = static_cast<double>(bit_errors) / static_cast<double>(tx_bits.size());
    return r;
}

double phase_mse(std::span<const double> estimate, std::span<const double> truth) {
    if (estimate.size() != truth.size() || estimate.empty())
        throw shape_error("phase_mse: length mismatch");
    // Remove the constant offset (which includes any pi/2 alignment).
    double mean = 0.0;
    for (std::size_t i = 0; i < estimate.size(); ++i) mean += estimate[i] - truth[i];
    mean /= static_cast<double>(estimate.size());
    double mse = 0.0;
    for (std::size_t i = 0; i < estimate.size(); ++i) {
        const double d = estimate[i] - truth[i] - mean;
        mse += d * d;
    }
    return mse / static_cast<double>(estimate.size());
}

}  // namespace comblink
