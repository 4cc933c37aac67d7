#include "comblink/frontend.hpp"

#include <cmath>

#include "comblink/fft.hpp"

namespace comblink {

namespace {

// Common FFT pass: low-pass, phase-ramp delay, resample. Any of the three
// may be a no-op.
std::vector<cplx> process_pol(const std::vector<cplx>& x, double fs_in, double fs_out,
                              std::size_t n_out, double bandwidth, double delay_s) {
    std::vector<cplx> spec(x);
    fft::forward(spec);
    const std::size_t n_in = x.size();

    std::vector<cplx> out_spec(n_out, cplx(0.0, 0.0));
    double fmax = std::min({bandwidth, fs_in / 2.0, fs_out / 2.0});
    const bool strict = n_out != n_in;  // drop the shared Nyquist edge when resampling
    for (std::size_t k = 0; k < n_in; ++k) {
        const double f = fft::bin_freq(k, n_in, fs_in);
        if (std::abs(f) > fmax || (strict && std::abs(f) >= fs_out / 2.0)) continue;
        cplx v = spec[k];
        if (delay_s != 0.0) v *= std::polar(1.0, -2.0 * M_PI * f * delay_s);
        // Map to the same physical frequency in the output grid.
        const long long kk = std::llround(f * static_cast<double>(n_out) / fs_out);
        const std::size_t ko =
            kk >= 0 ? static_cast<std::size_t>(kk)
                    : static_cast<std::size_t>(kk + static_cast<long long>(n_out));
        out_spec[ko] = v;
    }
    fft::inverse(out_spec);
    // forward/inverse pair of different lengths: rescale so amplitudes match
    const double g = static_cast<double>(n_out) / static_cast<double>(n_in);
    for (cplx& v : out_spec) v *= g;
    return out_spec;
}

}  // namespace

Frame rx_frontend(const Frame& frame, double target_rate_hz, double bandwidth_hz,
                  double skew_s) {
    frame.check();
    if (target_rate_hz > frame.sample_rate)
        throw config_error("rx_frontend: target rate above source rate");
    const double ratio = target_rate_hz / frame.sample_rate;
    const double n_out_f = static_cast<double>(frame.size()) * ratio;
    const double n_out_r = std::round(n_out_f);
    if (std::abs(n_out_f - n_out_r) > 1e-6)
        throw config_error("rx_frontend: frame length not divisible by the resampling ratio");
    const std::size_t n_out = static_cast<std::size_t>(n_out_r);

    Frame out;
    out.sample_rate = target_rate_hz;
    out.t0 = frame.t0;
    out.x = process_pol(frame.x, frame.sample_rate, target_rate_hz, n_out, bandwidth_hz,
                        skew_s);
    if (frame.dual_pol())
        out.y = process_pol(frame.y, frame.sample_rate, target_rate_hz, n_out,
                            bandwidth_hz, skew_s);
    return out;
}

Frame resample_fft(const Frame& frame, double target_rate_hz) {
    return rx_frontend(frame, target_rate_hz, frame.sample_rate, 0.0);
}

Frame fractional_delay(const Frame& frame, double delay_s) {
    frame.check();
    Frame out;
    out.sample_rate = frame.sample_rate;
    out.t0 = frame.t0;
    out.x = process_pol(frame.x, frame.sample_rate, frame.sample_rate, frame.size(),
                        frame.sample_rate, delay_s);
    if (frame.dual_pol())
        out.y = process_pol(frame.y, frame.sample_rate, frame.sample_rate, frame.size(),
                            frame.sample_rate, delay_s);
    return out;
}

}  // namespace comblink
