#pragma once

#include <optional>
#include <span>
#include <vector>

#include "comblink/equalizer.hpp"

namespace comblink {

// One channel prepared for carrier recovery: grid-aligned 2 sps frame plus
// the transmitted symbol sequences (indexed by absolute symbol number) used
// for data-aided startup of the slave/joint statics.
struct ChannelInput {
    const Frame* two_sps = nullptr;
    int line_index = 0;
    std::span<const cplx> ref_x;
    std::span<const cplx> ref_y;
};

struct RecoveryOutput {
    // 2 streams per channel, x then y, channel-major.
    std::vector<RecoveredStream> streams;
    std::vector<double> foe_per_channel;
    double spacing_difference_used_hz = 0.0;
};

// Fig. 1c: full chain per channel, one BPS engine per stream.
RecoveryOutput recover_independent(const std::vector<ChannelInput>& channels,
                                   double baud, const Constellation& c,
                                   const DspConfig& cfg);

// Fig. 1d: BPS runs on the master only; slaves reuse the master's per-block
// phase plus a per-slave constant and the line-scaled spacing-difference
// ramp. Slaves execute zero BPS distance evaluations; their residual phase
// rides on the decision-directed taps.
RecoveryOutput recover_master_slave(const std::vector<ChannelInput>& channels,
                                    std::size_t master_pos, double baud,
                                    const Constellation& c, const DspConfig& cfg,
                                    std::optional<double> spacing_difference_hz);

// Fig. 1e: common phase from one BPS engine pooled over every stream in the
// group, per-stream one-tap DD equalizers absorbing slow differences,
// frequency offsets removed master-slave fashion.
RecoveryOutput recover_joint(const std::vector<ChannelInput>& channels, double baud,
                             const Constellation& c, const DspConfig& cfg,
                             std::optional<double> spacing_difference_hz);

// Aligns the k*pi/2 (and conjugation) ambiguity of a recovered stream
// against known reference symbols covering the stream start. Throws
// dsp_error when the best correlation is below 0.5.
RecoveredStream resolve_ambiguity(RecoveredStream stream,
                                  std::span<const cplx> reference);

// Least-squares slope of v per sample.
double linear_slope(std::span<const double> v);

}  // namespace comblink
