#pragma once

#include "comblink/rng.hpp"
#include "comblink/types.hpp"

namespace comblink {

// Discrete Wiener process: trace[0] = 0, increments ~ N(0, 2*pi*linewidth*dt).
PhaseTrace wiener_phase(double linewidth_hz, std::size_t n_samples, double dt,
                        RngStream rng);

// Stationary Ornstein-Uhlenbeck process with the given stationary variance
// and correlation time. trace[0] is drawn from the stationary distribution.
PhaseTrace ou_phase(double stationary_var, double correlation_time_s,
                    std::size_t n_samples, double dt, RngStream rng);

}  // namespace comblink
