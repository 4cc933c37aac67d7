#pragma once

#include <optional>
#include <vector>

#include "comblink/phase_noise.hpp"
#include "comblink/rng.hpp"
#include "comblink/types.hpp"

namespace comblink {

// Statistical model of one frequency comb. Optical frequencies are stored as
// offsets from a common reference so phase ramps stay accurate in double
// precision over millisecond frames.
struct CombSpec {
    double nu0_offset_hz = 0.0;      // center line, offset from shared reference
    double f_spacing_hz = 25e9;      // line spacing
    double linewidth0_hz = 0.0;      // Lorentzian linewidth of the center line
    double jitter_linewidth_hz = 0.0;  // linewidth of the timing-jitter term
    int n_lines = 25;                // odd, lines -(n_lines-1)/2 .. +(n_lines-1)/2
    std::vector<double> line_powers;  // linear power per line, empty = all 1.0

    int max_line() const { return (n_lines - 1) / 2; }
    double line_power(int n) const;
    void check() const;
};

// One stochastic realization of a comb: center-line phase noise and the
// timing-jitter phase term, both on a common sample grid.
struct CombRealization {
    PhaseTrace phi0;
    PhaseTrace psi;
};

CombRealization realize_comb(const CombSpec& spec, std::size_t n_samples, double dt,
                             RngStream rng);

// Applies an integer+fractional delay to both traces of a realization
// (dispersive walk-off proxy). Linear interpolation, head held constant.
CombRealization delay_realization(const CombRealization& r, double delay_s);

// Per-channel output of ideal coherent mixing against the LO comb.
struct DetectedChannel {
    int line_index = 0;
    Frame frame;
    PhaseTrace true_phase;
};

// Total optical phase of line n: 2*pi*nu0*t + phi0(t) + n*(2*pi*f*t + psi(t)),
// with nu0 the stored offset.
PhaseTrace comb_line_phase(const CombSpec& comb, int n, const PhaseTrace& phi0,
                           const PhaseTrace& psi);

// Detected phase of channel n after mixing the signal comb against the LO
// comb: common beat term plus n times the spacing-difference/jitter term.
PhaseTrace detected_phase(const CombSpec& sig, const CombSpec& lo, int n,
                          const CombRealization& sig_real,
                          const CombRealization& lo_real);

// phi_k interpolated from two measured lines: phi_n + (k-n)/(m-n)*(phi_m-phi_n).
PhaseTrace interpolate_phase(const PhaseTrace& phi_n, const PhaseTrace& phi_m, int n,
                             int m, int k);

// Multiplies the modulated baseband frame by exp(i*phi_n(t)) and records the
// ground-truth phase. extra_phase, when present, is added to the applied
// (and recorded) phase.
DetectedChannel synthesize_channel(const CombSpec& sig, const CombSpec& lo, int n,
                                   const CombRealization& sig_real,
                                   const CombRealization& lo_real, const Frame& baseband,
                                   const PhaseTrace* extra_phase = nullptr);

}  // namespace comblink
