#pragma once

#include "comblink/rng.hpp"
#include "comblink/types.hpp"

namespace comblink {

struct FiberSpec {
    double length_km = 0.0;
    double dispersion_d_ps_nm_km = 16.5;  // nominal SMF
    double ref_wavelength_nm = 1545.32;
    double channel_center_offset_hz = 0.0;  // channel offset from dispersion ref

    void check() const {
        if (length_km < 0.0) throw config_error("FiberSpec: length must be >= 0");
        if (ref_wavelength_nm <= 0.0)
            throw config_error("FiberSpec: wavelength must be > 0");
    }

    double beta2_s2_per_m() const;  // from D at the reference wavelength
};

// Chromatic dispersion as a frequency-domain all-pass with quadratic phase
// sign * beta2*L/2 * (w + w_off)^2. sign=+1 is the fiber, -1 the compensator.
// Frames up to `single_block_limit` samples are filtered in one FFT (the
// +1/-1 round trip then cancels bin-exactly); longer frames use overlap-save
// blocks sized >= 4x the dispersion memory.
Frame apply_cd(const Frame& frame, const FiberSpec& fiber, int sign,
               std::size_t single_block_limit = (1u << 24));

// Dispersion memory (group-delay spread over the sampled band) in samples.
double cd_memory_samples(const FiberSpec& fiber, double sample_rate);

// Complex AWGN per polarization at the given SNR measured over the full
// sampled bandwidth. snr_db = +inf returns the frame unchanged.
Frame add_awgn(const Frame& frame, double snr_db, RngStream rng);

}  // namespace comblink
