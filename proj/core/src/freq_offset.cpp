#include "comblink/freq_offset.hpp"

#include <cmath>

#include "comblink/fft.hpp"

namespace comblink {

double estimate_foe_4thpower(std::span<const cplx> samples, double sample_rate,
                             double min_peak_to_mean) {
    if (samples.size() < 16) throw config_error("estimate_foe_4thpower: too few samples");
    std::vector<cplx> s4(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const cplx s = samples[i];
        const cplx s2 = s * s;
        s4[i] = s2 * s2;
    }
    fft::forward(s4);

    const std::size_t n = s4.size();
    std::vector<double> p(n);
    double total = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        p[k] = std::norm(s4[k]);
        total += p[k];
    }
    std::size_t kmax = 0;
    for (std::size_t k = 1; k < n; ++k)
        if (p[k] > p[kmax]) kmax = k;

    const double mean = total / static_cast<double>(n);
    if (mean <= 0.0 || p[kmax] / mean < min_peak_to_mean)
        throw dsp_error("estimate_foe_4thpower: no dominant 4th-power spectral peak");

    // Parabolic refinement on log magnitude.
    const std::size_t km = (kmax + n - 1) % n;
    const std::size_t kp = (kmax + 1) % n;
    const double eps = 1e-300;
    const double a = 0.5 * std::log(p[km] + eps);
    const double b = 0.5 * std::log(p[kmax] + eps);
    const double c = 0.5 * std::log(p[kp] + eps);
    double delta = 0.0;
    const double den = a - 2.0 * b + c;
    if (den < 0.0) delta = 0.5 * (a - c) / den;
    if (!(delta > -0.5 && delta < 0.5)) delta = 0.0;

    double kk = static_cast<double>(kmax) + delta;
    if (kk > static_cast<double>(n) / 2.0) kk -= static_cast<double>(n);
    const double f4 = kk * sample_rate / static_cast<double>(n);
    return f4 / 4.0;
}

double estimate_spacing_difference(double foe_a_hz, double foe_b_hz, int n_a, int n_b) {
    if (n_a == n_b)
        throw config_error("estimate_spacing_difference: line indices must differ");
    return (foe_b_hz - foe_a_hz) / static_cast<double>(n_b - n_a);
}

}  // namespace comblink
