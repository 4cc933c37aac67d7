#include "comblink/fiber.hpp"

#include <cmath>
#include <limits>

#include "comblink/fft.hpp"

namespace comblink {

namespace {
constexpr double kSpeedOfLight = 299792458.0;  // m/s

std::size_t next_pow2(std::size_t v) {
    std::size_t p = 1;
    while (p < v) p <<= 1;
    return p;
}

// exp(i * sign * beta2*L/2 * (w + w_off)^2) on an n-point FFT grid.
std::vector<cplx> cd_response(std::size_t n, double sample_rate, double beta2_l,
                              double w_off, int sign) {
    std::vector<cplx> h(n);
    const double a = 0.5 * beta2_l * static_cast<double>(sign);
    for (std::size_t k = 0; k < n; ++k) {
        const double w = 2.0 * M_PI * fft::bin_freq(k, n, sample_rate) + w_off;
        h[k] = std::polar(1.0, a * w * w);
    }
    return h;
}

void filter_whole(std::vector<cplx>& x, const std::vector<cplx>& h) {
    fft::forward(x);
    for (std::size_t k = 0; k < x.size(); ++k) x[k] *= h[k];
    fft::inverse(x);
}

// Overlap-save with guard V on each side of each block.
std::vector<cplx> filter_overlap_save(const std::vector<cplx>& x,
                                      const std::vector<cplx>& h, std::size_t block,
                                      std::size_t guard) {
    const std::size_t keep = block - 2 * guard;
    std::vector<cplx> out(x.size());
    std::vector<cplx> buf(block);
    for (std::size_t start = 0; start < x.size(); start += keep) {
        // Block covers [start - guard, start - guard + block), zero padded.
        for (std::size_t i = 0; i < block; ++i) {
            const long long src = static_cast<long long>(start + i) -
                                  static_cast<long long>(guard);
            buf[i] = (src >= 0 && src < static_cast<long long>(x.size()))
                         ? x[static_cast<std::size_t>(src)]
                         : cplx(0.0, 0.0);
        }
        fft::forward(buf);
        for (std::size_t k = 0; k < block; ++k) buf[k] *= h[k];
        fft::inverse(buf);
        const std::size_t n_keep = std::min(keep, x.size() - start);
        for (std::size_t i = 0; i < n_keep; ++i) out[start + i] = buf[guard + i];
    }
    return out;
}

}  // namespace

double FiberSpec::beta2_s2_per_m() const {
    const double d_si = dispersion_d_ps_nm_km * 1e-6;  // s/m^2
    const double lambda_m = ref_wavelength_nm * 1e-9;
    return -d_si * lambda_m * lambda_m / (2.0 * M_PI * kSpeedOfLight);
}

double cd_memory_samples(const FiberSpec& fiber, double sample_rate) {
    const double beta2_l = fiber.beta2_s2_per_m() * fiber.length_km * 1e3;
    return std::abs(beta2_l) * 2.0 * M_PI * sample_rate * sample_rate;
}

Frame apply_cd(const Frame& frame, const FiberSpec& fiber, int sign,
               std::size_t single_block_limit) {
    frame.check();
    fiber.check();
    if (sign != 1 && sign != -1) throw config_error("apply_cd: sign must be +1 or -1");
    if (fiber.length_km == 0.0 || frame.size() == 0) return frame;

    const double beta2_l = fiber.beta2_s2_per_m() * fiber.length_km * 1e3;
    const double w_off = 2.0 * M_PI * fiber.channel_center_offset_hz;

    Frame out = frame;
    if (frame.size() <= single_block_limit) {
        const auto h = cd_response(frame.size(), frame.sample_rate, beta2_l, w_off, sign);
        for (int p = 0; p < frame.pol_count(); ++p) filter_whole(out.pol(p), h);
        return out;
    }

    const double mem = cd_memory_samples(fiber, frame.sample_rate);
    const std::size_t guard = std::max<std::size_t>(
        4 * static_cast<std::size_t>(std::ceil(mem)), 1024);
    const std::size_t block = next_pow2(std::max<std::size_t>(4 * guard, 4096));
    const auto h = cd_response(block, frame.sample_rate, beta2_l, w_off, sign);
    for (int p = 0; p < frame.pol_count(); ++p)
        out.pol(p) = filter_overlap_save(frame.pol(p), h, block, guard);
    return out;
}

Frame add_awgn(const Frame& frame, double snr_db, RngStream rng) {
    frame.check();
    if (snr_db == std::numeric_limits<double>::infinity()) return frame;
    if (!std::isfinite(snr_db)) throw config_error("add_awgn: snr must be finite or +inf");

    Frame out = frame;
    const double snr = std::pow(10.0, snr_db / 10.0);
    for (int p = 0; p < frame.pol_count(); ++p) {
        auto& v = out.pol(p);
        double sig_pow = 0.0;
        for (const cplx& s : v) sig_pow += std::norm(s);
        sig_pow /= static_cast<double>(v.size());
        const double sigma = std::sqrt(sig_pow / snr / 2.0);  // per quadrature
        RngStream st = rng.substream(p == 0 ? "x" : "y");
        for (cplx& s : v) s += sigma * st.cgaussian();
    }
    return out;
}

}  // namespace comblink
