#pragma once

#include <vector>

#include "comblink/rng.hpp"
#include "comblink/types.hpp"

namespace comblink {

// Parametric stand-in for nonlinear phase noise: an Ornstein-Uhlenbeck phase
// process per channel, built from a shared component (weight
// inter_channel_corr) plus independent parts, with power-law variance
// scaling and an optional decorrelation delay on channels after the first.
struct NlProxySpec {
    double base_variance_rate = 0.0;  // rad^2/s at the reference power
    double power_exponent = 2.0;
    double correlation_time_s = 1e-9;
    double inter_channel_corr = 1.0;  // in [0, 1]
    double decorrelation_delay_s = 0.0;
    double ref_power_dbm = 0.0;  // per-channel reference for the power law

    void check() const {
        if (correlation_time_s <= 0.0)
            throw config_error("NlProxySpec: correlation_time must be > 0");
        if (inter_channel_corr < 0.0 || inter_channel_corr > 1.0)
            throw config_error("NlProxySpec: inter_channel_corr must be in [0,1]");
        if (base_variance_rate < 0.0)
            throw config_error("NlProxySpec: base_variance_rate must be >= 0");
    }
};

struct NlProxyResult {
    std::vector<Frame> frames;
    std::vector<PhaseTrace> traces;  // injected ground truth per channel
};

// launch_power_dbm is per channel; -inf disables the proxy.
NlProxyResult nl_phase_proxy(const std::vector<Frame>& channels,
                             double launch_power_dbm, const NlProxySpec& spec,
                             RngStream rng);

}  // namespace comblink
