#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace comblink {

using cplx = std::complex<double>;

// Invalid configuration values (bad taps counts, rates, spans, ...).
struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Mismatched lengths / sample grids between inputs.
struct shape_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Runtime DSP failures (divergence, low-confidence estimates, alignment).
struct dsp_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// File format / parse failures.
struct parse_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Complex baseband waveform block. samples_y is empty for single-polarization
// frames; when present it has the same length as samples_x.
struct Frame {
    std::vector<cplx> x;
    std::vector<cplx> y;
    double sample_rate = 0.0;  // Hz
    double t0 = 0.0;           // seconds, time of sample 0

    std::size_t size() const { return x.size(); }
    bool dual_pol() const { return !y.empty(); }
    int pol_count() const { return y.empty() ? 1 : 2; }

    std::vector<cplx>& pol(int p) { return p == 0 ? x : y; }
    const std::vector<cplx>& pol(int p) const { return p == 0 ? x : y; }

    void check() const {
        if (sample_rate <= 0.0)
            throw config_error("Frame: sample_rate must be > 0");
        if (!y.empty() && y.size() != x.size())
            throw shape_error("Frame: polarization lengths differ");
    }
};

// Sampled real-valued phase process.
struct PhaseTrace {
    std::vector<double> values;  // radians
    double sample_rate = 0.0;    // Hz
    double t0 = 0.0;             // seconds

    std::size_t size() const { return values.size(); }
    double operator[](std::size_t i) const { return values[i]; }
    double& operator[](std::size_t i) { return values[i]; }

    bool same_grid(const PhaseTrace& o) const {
        return values.size() == o.values.size() && sample_rate == o.sample_rate &&
               t0 == o.t0;
    }
};

inline void require_same_grid(const PhaseTrace& a, const PhaseTrace& b,
                              const std::string& who) {
    if (!a.same_grid(b))
        throw shape_error(who + ": phase traces on different sample grids");
}

}  // namespace comblink
