#include "comblink/nl_proxy.hpp"

#include <cmath>
#include <limits>

#include "comblink/phase_noise.hpp"

namespace comblink {

NlProxyResult nl_phase_proxy(const std::vector<Frame>& channels,
                             double launch_power_dbm, const NlProxySpec& spec,
                             RngStream rng) {
    spec.check();
    if (channels.empty()) throw config_error("nl_phase_proxy: no channels");
    for (const Frame& f : channels) f.check();

    NlProxyResult res;
    res.frames = channels;
    const bool off = launch_power_dbm == -std::numeric_limits<double>::infinity() ||
                     spec.base_variance_rate == 0.0;
    if (off) {
        for (const Frame& f : channels) {
            PhaseTrace z;
            z.sample_rate = f.sample_rate;
            z.t0 = f.t0;
            z.values.assign(f.size(), 0.0);
            res.traces.push_back(std::move(z));
        }
        return res;
    }

    const double p_ratio =
        std::pow(10.0, (launch_power_dbm - spec.ref_power_dbm) / 10.0);
    const double var = std::pow(p_ratio, spec.power_exponent) *
                       spec.base_variance_rate * spec.correlation_time_s;
    const double dt = 1.0 / channels.front().sample_rate;
    const std::size_t n = channels.front().size();

    // Shared component generated once with headroom for the delayed channels.
    const std::size_t head =
        static_cast<std::size_t>(std::ceil(std::abs(spec.decorrelation_delay_s) *
                                           channels.front().sample_rate)) + 2;
    PhaseTrace common =
        ou_phase(var, spec.correlation_time_s, n + head, dt, rng.substream("common"));

    const double w_common = std::sqrt(spec.inter_channel_corr);
    const double w_indep = std::sqrt(1.0 - spec.inter_channel_corr);
    const double shift = spec.decorrelation_delay_s / dt;

    for (std::size_t c = 0; c < channels.size(); ++c) {
        PhaseTrace indep = ou_phase(var, spec.correlation_time_s, n, dt,
                                    rng.substream("indep", c));
        PhaseTrace theta;
        theta.sample_rate = channels[c].sample_rate;
        theta.t0 = channels[c].t0;
        theta.values.resize(n);
        // Channels after the first see the common part delayed.
        const double off_samp = (c == 0) ? 0.0 : shift;
        for (std::size_t i = 0; i < n; ++i) {
            double src = static_cast<double>(i) + off_samp;
            if (src < 0.0) src = 0.0;
            if (src > static_cast<double>(n + head - 2))
                src = static_cast<double>(n + head - 2);
            const std::size_t j = static_cast<std::size_t>(src);
            const double frac = src - static_cast<double>(j);
            const double cm =
                common.values[j] * (1.0 - frac) + common.values[j + 1] * frac;
            theta.values[i] = w_common * cm + w_indep * indep.values[i];
        }

        Frame& f = res.frames[c];
        for (std::size_t i = 0; i < n; ++i) {
            const cplx rot = std::polar(1.0, theta.values[i]);
            f.x[i] *= rot;
            if (f.dual_pol()) f.y[i] *= rot;
        }
        res.traces.push_back(std::move(theta));
    }
    return res;
}

}  // namespace comblink
