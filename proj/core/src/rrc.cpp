#include "comblink/rrc.hpp"

#include <cmath>

namespace comblink {

namespace {

// RRC impulse response at t (in symbol periods), unnormalized.
double rrc_point(double t, double beta) {
    const double pi = M_PI;
    if (std::abs(t) < 1e-12)
        return 1.0 - beta + 4.0 * beta / pi;
    const double tb = std::abs(std::abs(t) - 1.0 / (4.0 * beta));
    if (beta > 0.0 && tb < 1e-9) {
        const double a = pi / (4.0 * beta);
        return beta / std::sqrt(2.0) *
               ((1.0 + 2.0 / pi) * std::sin(a) + (1.0 - 2.0 / pi) * std::cos(a));
    }
    const double num =
        std::sin(pi * t * (1.0 - beta)) + 4.0 * beta * t * std::cos(pi * t * (1.0 + beta));
    const double den = pi * t * (1.0 - std::pow(4.0 * beta * t, 2.0));
    return num / den;
}

std::vector<double> raw_taps(double rolloff, int sps, int span) {
    const int n = span * sps + 1;
    std::vector<double> h(n);
    const int mid = (n - 1) / 2;
    for (int i = 0; i < n; ++i)
        h[i] = rrc_point(static_cast<double>(i - mid) / sps, rolloff);
    return h;
}

double energy(const std::vector<double>& v) {
    double e = 0.0;
    for (double x : v) e += x * x;
    return e;
}

}  // namespace

std::vector<double> rrc_taps(double rolloff, int sps, int span) {
    if (sps < 2) throw config_error("rrc_taps: sps must be >= 2");
    if (!(rolloff > 0.0 && rolloff <= 1.0))
        throw config_error("rrc_taps: rolloff must be in (0, 1]");
    if (span < 2) throw config_error("rrc_taps: span must be >= 2 symbols");

    std::vector<double> h = raw_taps(rolloff, sps, span);
    // Energy capture check against a 4x longer reference pulse.
    const double e = energy(h);
    const double e_ref = energy(raw_taps(rolloff, sps, 4 * span));
    if (e < 0.999 * e_ref)
        throw config_error("rrc_taps: span too short, captures < 99.9% of pulse energy");

    const double g = 1.0 / std::sqrt(e);
    for (double& x : h) x *= g;
    return h;
}

Frame rrc_shape(std::span<const cplx> symbols, double rolloff, int sps, int span,
                double baud) {
    if (baud <= 0.0) throw config_error("rrc_shape: baud must be > 0");
    if (symbols.empty()) throw config_error("rrc_shape: empty symbol sequence");
    const std::vector<double> h = rrc_taps(rolloff, sps, span);
    const int nh = static_cast<int>(h.size());
    const std::size_t n_out = (symbols.size() - 1) * sps + nh;

    Frame f;
    f.sample_rate = sps * baud;
    f.t0 = -static_cast<double>((nh - 1) / 2) / f.sample_rate;
    f.x.assign(n_out, cplx(0.0, 0.0));
    for (std::size_t m = 0; m < symbols.size(); ++m) {
        const cplx s = symbols[m];
        cplx* dst = f.x.data() + m * sps;
        for (int i = 0; i < nh; ++i) dst[i] += s * h[i];
    }
    return f;
}

}  // namespace comblink
