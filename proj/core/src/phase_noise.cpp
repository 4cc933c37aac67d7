#include "comblink/phase_noise.hpp"

#include <cmath>

namespace comblink {

PhaseTrace wiener_phase(double linewidth_hz, std::size_t n_samples, double dt,
                        RngStream rng) {
    if (linewidth_hz < 0.0) throw config_error("wiener_phase: linewidth must be >= 0");
    PhaseTrace tr;
    tr.sample_rate = 1.0 / dt;
    tr.values.resize(n_samples);
    if (n_samples == 0) return tr;
    const double sigma = std::sqrt(2.0 * M_PI * linewidth_hz * dt);
    double acc = 0.0;
    tr.values[0] = 0.0;
    for (std::size_t i = 1; i < n_samples; ++i) {
        acc += sigma * rng.gaussian();
        tr.values[i] = acc;
    }
    return tr;
}

PhaseTrace ou_phase(double stationary_var, double correlation_time_s,
                    std::size_t n_samples, double dt, RngStream rng) {
    if (correlation_time_s <= 0.0)
        throw config_error("ou_phase: correlation time must be > 0");
    if (stationary_var < 0.0) throw config_error("ou_phase: variance must be >= 0");
    PhaseTrace tr;
    tr.sample_rate = 1.0 / dt;
    tr.values.resize(n_samples);
    if (n_samples == 0) return tr;
    const double alpha = std::exp(-dt / correlation_time_s);
    const double sigma_st = std::sqrt(stationary_var);
    const double sigma_drive = sigma_st * std::sqrt(1.0 - alpha * alpha);
    double v = sigma_st * rng.gaussian();
    tr.values[0] = v;
    for (std::size_t i = 1; i < n_samples; ++i) {
        v = alpha * v + sigma_drive * rng.gaussian();
        tr.values[i] = v;
    }
    return tr;
}

}  // namespace comblink
