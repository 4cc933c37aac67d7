#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "comblink/constellation.hpp"
#include "comblink/types.hpp"

namespace comblink {

// Blind phase search over a sliding causal window. Test angles are
// theta_b = -pi/4 + b*pi/(2B) for b in [0, B): the grid is periodic modulo
// the pi/2 ambiguity, so the worst-case quantization error is pi/(4B).
//
// The engine form accepts one symbol per stream per push and keeps the
// incremental per-angle window sums, which is how the estimate runs inside
// the equalizer update loop. Multi-stream pushes realize joint estimation:
// the distances of all streams are pooled before the argmin.
class BpsEngine {
public:
    BpsEngine(const Constellation& c, int window, int test_angles,
              std::size_t n_streams);

    // One symbol per stream; returns the unwrapped phase estimate.
    double push(std::span<const cplx> symbols);

    std::uint64_t distance_evals() const { return evals_; }
    int window() const { return window_; }

private:
    const Constellation* constellation_;
    int window_;
    int n_angles_;
    std::size_t n_streams_;
    std::vector<cplx> rotators_;      // exp(-i * theta_b)
    std::vector<double> angles_;
    std::vector<double> ring_;        // [angle][window] distance history
    std::vector<double> window_sum_;  // per angle
    std::size_t pos_ = 0;
    double unwrap_ref_ = 0.0;
    int ref_gain_ = 16;  // smoothing of the unwrap reference
    bool have_prev_ = false;
    std::uint64_t evals_ = 0;
};

// Standalone joint BPS over full streams sharing a common phase. All
// streams must have equal length. symbol_rate only sets the sample_rate of
// the returned trace.
PhaseTrace bps_estimate(const std::vector<std::span<const cplx>>& streams,
                        const Constellation& c, int window, int test_angles,
                        double symbol_rate = 1.0,
                        std::uint64_t* distance_evals = nullptr);

}  // namespace comblink
