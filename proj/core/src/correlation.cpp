#include <cmath>

#include "comblink/metrics.hpp"

namespace comblink {

namespace {

std::vector<double> detrend_demean(const std::vector<double>& v, bool detrend) {
    const std::size_t n = v.size();
    std::vector<double> out(n);
    double slope = 0.0, mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(n);
    if (detrend && n > 1) {
        const double mi = static_cast<double>(n - 1) / 2.0;
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double di = static_cast<double>(i) - mi;
            num += di * (v[i] - mean);
            den += di * di;
        }
        slope = num / den;
        for (std::size_t i = 0; i < n; ++i)
            out[i] = v[i] - mean - slope * (static_cast<double>(i) - mi);
    } else {
        for (std::size_t i = 0; i < n; ++i) out[i] = v[i] - mean;
    }
    return out;
}

}  // namespace

CorrelationResult phase_crosscorr(const PhaseTrace& a, const PhaseTrace& b,
                                  std::size_t max_lag, bool detrend) {
    require_same_grid(a, b, "phase_crosscorr");
    const std::size_t n = a.size();
    if (n < 2) throw shape_error("phase_crosscorr: traces too short");
    if (max_lag >= n) throw config_error("phase_crosscorr: max_lag >= trace length");

    const std::vector<double> x = detrend_demean(a.values, detrend);
    const std::vector<double> y = detrend_demean(b.values, detrend);
    double vx = 0.0, vy = 0.0;
    for (double v : x) vx += v * v;
    for (double v : y) vy += v * v;
    if (vx <= 0.0 || vy <= 0.0)
        throw dsp_error("phase_crosscorr: zero-variance trace");
    const double norm = std::sqrt(vx * vy) / static_cast<double>(n);

    CorrelationResult res;
    const double dt = 1.0 / a.sample_rate;
    for (long long lag = -static_cast<long long>(max_lag);
         lag <= static_cast<long long>(max_lag); ++lag) {
        double acc = 0.0;
        std::size_t count = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const long long j = static_cast<long long>(i) + lag;
            if (j < 0 || j >= static_cast<long long>(n)) continue;
            acc += x[i] * y[static_cast<std::size_t>(j)];
            ++count;
        }
        const double coef = count > 0 ? (acc / static_cast<double>(count)) / norm : 0.0;
        res.lags_s.push_back(static_cast<double>(lag) * dt);
        res.coefficients.push_back(coef);
        if (lag == 0) res.lag0_coefficient = coef;
    }
    return res;
}

}  // namespace comblink
