#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "comblink/constellation.hpp"
#include "comblink/types.hpp"

namespace comblink {

struct DspConfig {
    int eq_taps = 35;          // per branch, T/2-spaced, odd
    double eq_step = 1e-4;     // DD step; block-averaged gradient, one update
    double cma_step = 5e-3;    // per block of block_size symbols
    int block_size = 64;
    std::size_t cma_preconv_symbols = 400000;
    int bps_test_angles = 32;
    int bps_window = 64;
    double one_tap_step = 0.0;  // joint-mode one-tap DD equalizer; 0 -> eq_step
    std::size_t startup_symbols = 64;  // data-aided acquisition block length
    // manual electronic time offset applied when reusing the master phase on
    // slaves (walk-off counteraction); fractional values interpolate
    double slave_phase_delay_symbols = 0.0;

    void check() const {
        if (eq_taps < 1 || eq_taps % 2 == 0)
            throw config_error("DspConfig: eq_taps must be odd and >= 1");
        if (block_size < 1) throw config_error("DspConfig: block_size must be >= 1");
        if (bps_window < 1) throw config_error("DspConfig: bps_window must be >= 1");
        if (bps_test_angles < 2)
            throw config_error("DspConfig: bps_test_angles must be >= 2");
        if (eq_step <= 0.0 || cma_step <= 0.0)
            throw config_error("DspConfig: step sizes must be > 0");
    }
};

struct RecoveredStream {
    std::vector<cplx> symbols;   // decision-point samples, 1 per symbol
    PhaseTrace phase_estimate;   // dynamic derotation (BPS + static + one-tap angle)
    double freq_offset_hz = 0.0;   // total estimated offset (coarse + residual slope)
    double applied_ramp_hz = 0.0;  // derotation ramp that was removed
    int ambiguity_quarter_turns = 0;
    bool conjugated = false;
    std::size_t first_symbol = 0;  // transmit index of symbols[0]
    std::uint64_t bps_distance_evals = 0;
    std::uint64_t tap_updates = 0;
    bool converged = true;
    int bad_blocks = 0;
    bool tracking_failure = false;
};

// 2x2 T/2-spaced butterfly equalizer with block-frozen taps: within each
// block of block_size symbols the taps are constant and the per-symbol
// gradients accumulate; the sum is applied once at the block end (hardware
// parallelization model). The phase estimate enters the decision-directed
// error inside the update loop: the error is computed after full
// derotation and rotated back before the tap update.
class DdEqualizer {
public:
    DdEqualizer(const Frame& two_sps, double baud, const Constellation& c,
                const DspConfig& cfg);

    // Multi-modulus CMA pre-convergence over cfg.cma_preconv_symbols,
    // recording the symbol-rate output of the x stream for coarse FOE.
    void run_cma();
    std::span<const cplx> preconv_output() const { return cma_out_; }

    void set_stream_ramp(int stream, double hz);  // removed as exp(-i*2pi*hz*t)
    void enable_one_tap(double step);

    std::size_t dd_start() const { return dd_start_; }
    std::size_t dd_end() const { return k_hi_; }
    std::size_t valid_start() const { return k_lo_; }

    // Butterfly + ramp + one-tap for symbols [k0, k0+len); fills u per stream.
    void forward_block(std::size_t k0, std::size_t len, cplx* u_x, cplx* u_y);

    // Data-aided startup: given references and the thetas that will be used,
    // absorb the residual constant rotation into the static phase (or the
    // one-tap equalizer) and return the corrected u values.
    void acquire_block(std::size_t k0, std::size_t len, const double* th_x,
                       const double* th_y, std::span<const cplx> ref_x,
                       std::span<const cplx> ref_y, cplx* u_x, cplx* u_y);

    // Decisions, error computation and blockwise tap update. refs, when
    // present, replace the hard decisions (data-aided operation).
    void commit_block(std::size_t k0, std::size_t len, const double* th_x,
                      const double* th_y, const cplx* ref_x = nullptr,
                      const cplx* ref_y = nullptr);

    // Emitted DD-region outputs, indexed from dd_start().
    const std::vector<cplx>& out_symbols(int stream) const { return out_sym_[stream]; }
    const std::vector<double>& out_phase(int stream) const { return out_phase_[stream]; }

    std::uint64_t tap_updates() const { return tap_updates_; }
    bool converged() const { return converged_; }
    int bad_blocks() const { return bad_blocks_; }
    double baud() const { return baud_; }

    // Net unwrapped rotation of the decision-point constellation over the
    // emitted region, from the per-block 4th-power tone. A phase-locked
    // loop keeps this near zero; an untracked residual frequency winds it
    // up. Radians of carrier rotation.
    double constellation_drift_rad(int stream) const;

private:
    void butterfly(std::size_t k, cplx& yx, cplx& yy) const;
    double ramp_phase(int stream, std::size_t k) const;

    const Constellation* constellation_;
    DspConfig cfg_;
    double baud_;
    std::vector<cplx> in_x_, in_y_;  // 2 sps, power-normalized
    int half_;
    std::size_t k_lo_ = 0, k_hi_ = 0, dd_start_ = 0;

    std::vector<cplx> wxx_, wxy_, wyx_, wyy_;
    std::vector<double> radii2_;  // CMA reference moduli^2

    double ramp_hz_[2] = {0.0, 0.0};
    double static_phase_[2] = {0.0, 0.0};
    bool one_tap_on_ = false;
    double one_tap_step_ = 0.0;
    cplx h1_[2] = {cplx(1.0, 0.0), cplx(1.0, 0.0)};
    double h1_angle_[2] = {0.0, 0.0};  // continuous angle of h1

    std::vector<cplx> cma_out_;
    std::vector<cplx> out_sym_[2];
    std::vector<double> out_phase_[2];
    std::vector<cplx> z_buf_[2];     // per-block z = ramped butterfly output
    std::vector<cplx> m4_blocks_[2];  // per-block mean of q^4

    std::uint64_t tap_updates_ = 0;
    int diverge_run_ = 0;
    int bad_blocks_ = 0;
    bool converged_ = true;
};

// Per-block phase supplier for equalize_dd: fills th_x/th_y for the block
// whose one-tap/static-corrected outputs are u_x/u_y.
using PhaseHook = std::function<void(std::size_t k0, std::span<const cplx> u_x,
                                     std::span<const cplx> u_y, std::span<double> th_x,
                                     std::span<double> th_y)>;

// CMA pre-convergence, coarse 4th-power FOE, then the decision-directed loop
// with the hook supplying the per-symbol phase. Returns the x and y streams.
std::vector<RecoveredStream> equalize_dd(const Frame& two_sps, double baud,
                                         const Constellation& c, const DspConfig& cfg,
                                         const PhaseHook& hook);

}  // namespace comblink
