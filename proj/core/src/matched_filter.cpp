#include "comblink/matched_filter.hpp"

#include <cmath>

#include "comblink/fft.hpp"

namespace comblink {

double rrc_freq_response(double f, double baud, double rolloff) {
    const double fa = std::abs(f);
    const double f1 = (1.0 - rolloff) * baud / 2.0;
    const double f2 = (1.0 + rolloff) * baud / 2.0;
    if (fa <= f1) return 1.0;
    if (fa >= f2) return 0.0;
    const double rc =
        0.5 * (1.0 + std::cos(M_PI / (rolloff * baud) * (fa - f1)));
    return std::sqrt(rc);
}

Frame matched_filter_downsample(const Frame& frame, double baud, double rolloff,
                                int sps_out) {
    frame.check();
    if (baud <= 0.0) throw config_error("matched_filter: baud must be > 0");
    if (sps_out < 1) throw config_error("matched_filter: sps_out must be >= 1");
    const double fs_out = sps_out * baud;
    if (fs_out > frame.sample_rate)
        throw config_error("matched_filter: output rate above input rate");

    const std::size_t n_in = frame.size();
    const double n_out_f = static_cast<double>(n_in) * fs_out / frame.sample_rate;
    if (std::abs(n_out_f - std::round(n_out_f)) > 1e-6)
        throw config_error("matched_filter: frame length not divisible by resampling ratio");
    const std::size_t n_out = static_cast<std::size_t>(std::round(n_out_f));

    // Align the output grid to the symbol grid: sample k of the output lands
    // at absolute time k / fs_out. In frame-relative FFT time that is a
    // circular delay by t0.
    const double shift = frame.t0;

    Frame out;
    out.sample_rate = fs_out;
    out.t0 = 0.0;
    for (int p = 0; p < frame.pol_count(); ++p) {
        std::vector<cplx> spec(frame.pol(p));
        fft::forward(spec);
        std::vector<cplx> out_spec(n_out, cplx(0.0, 0.0));
        for (std::size_t k = 0; k < n_in; ++k) {
            const double f = fft::bin_freq(k, n_in, frame.sample_rate);
            if (std::abs(f) >= fs_out / 2.0 && n_out != n_in) continue;
            if (std::abs(f) > frame.sample_rate / 2.0) continue;
            const double h = rrc_freq_response(f, baud, rolloff);
            if (h == 0.0) continue;
            cplx v = spec[k] * h;
            if (shift != 0.0) v *= std::polar(1.0, -2.0 * M_PI * f * shift);
            const long long kk = std::llround(f * static_cast<double>(n_out) / fs_out);
            const std::size_t ko =
                kk >= 0 ? static_cast<std::size_t>(kk)
                        : static_cast<std::size_t>(kk + static_cast<long long>(n_out));
            out_spec[ko] = v;
        }
        fft::inverse(out_spec);
        const double g = static_cast<double>(n_out) / static_cast<double>(n_in);
        for (cplx& v : out_spec) v *= g;
        out.pol(p) = std::move(out_spec);
    }
    return out;
}

}  // namespace comblink
