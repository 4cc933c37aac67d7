#pragma once

#include <span>
#include <vector>

#include "comblink/constellation.hpp"
#include "comblink/types.hpp"

namespace comblink {

struct MetricsReport {
    double gmi_bits_per_4d = 0.0;
    double ngmi = 0.0;
    double snr_db = 0.0;
    double evm_db = 0.0;
    double ber = 0.0;
    double phase_mse_rad2 = 0.0;
};

// Generalized mutual information of a bit-wise receiver over a circular-
// Gaussian auxiliary channel. Exact log-sum-exp LLRs; the noise variance is
// estimated per polarization from the data-aided error after a complex
// least-squares scale. Returns bits per 4D symbol (both polarizations).
double compute_gmi(std::span<const cplx> rx_x, std::span<const cplx> rx_y,
                   std::span<const std::uint8_t> tx_bits_x,
                   std::span<const std::uint8_t> tx_bits_y, const Constellation& c);

// Single-polarization GMI in bits per 2D symbol.
double compute_gmi_2d(std::span<const cplx> rx, std::span<const std::uint8_t> tx_bits,
                      const Constellation& c);

// EVM/SNR (after complex LS scaling to the reference) and hard-decision BER.
MetricsReport compute_evm_snr_ber(std::span<const cplx> rx,
                                  std::span<const cplx> tx_symbols,
                                  std::span<const std::uint8_t> tx_bits,
                                  const Constellation& c);

struct CorrelationResult {
    std::vector<double> lags_s;
    std::vector<double> coefficients;
    double lag0_coefficient = 0.0;
};

// Normalized cross-correlation of two phase traces versus lag, after
// removing the best-fit linear ramp from each (residual frequency offsets).
CorrelationResult phase_crosscorr(const PhaseTrace& a, const PhaseTrace& b,
                                  std::size_t max_lag, bool detrend = true);

// Mean-square difference between a phase estimate and the ground truth
// after removing the constant offset (mod-pi/2 alignment included).
double phase_mse(std::span<const double> estimate, std::span<const double> truth);

}  // namespace comblink
