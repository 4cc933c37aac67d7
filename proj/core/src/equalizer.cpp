#include "comblink/equalizer.hpp"

#include <cmath>

#include "comblink/freq_offset.hpp"

namespace comblink {

namespace {

// Power at the symbol instants (even indices of the grid-aligned 2 sps
// input): the constellation scale the decision stages expect.
double symbol_power(const std::vector<cplx>& v) {
    double p = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < v.size(); i += 2, ++n) p += std::norm(v[i]);
    return p / static_cast<double>(n);
}

}  // namespace

DdEqualizer::DdEqualizer(const Frame& two_sps, double baud, const Constellation& c,
                         const DspConfig& cfg)
    : constellation_(&c), cfg_(cfg), baud_(baud) {
    cfg_.check();
    two_sps.check();
    if (!two_sps.dual_pol())
        throw config_error("DdEqualizer: dual-polarization input required");
    if (two_sps.size() < static_cast<std::size_t>(4 * cfg_.eq_taps))
        throw config_error("DdEqualizer: frame shorter than equalizer support");

    in_x_ = two_sps.x;
    in_y_ = two_sps.y;
    const double px = symbol_power(in_x_);
    const double py = symbol_power(in_y_);
    if (px <= 0.0 || py <= 0.0)
        throw config_error("DdEqualizer: zero-power polarization");
    const double gx = 1.0 / std::sqrt(px);
    const double gy = 1.0 / std::sqrt(py);
    for (cplx& v : in_x_) v *= gx;
    for (cplx& v : in_y_) v *= gy;

    const int t = cfg_.eq_taps;
    half_ = (t - 1) / 2;
    wxx_.assign(t, cplx(0.0, 0.0));
    wxy_.assign(t, cplx(0.0, 0.0));
    wyx_.assign(t, cplx(0.0, 0.0));
    wyy_.assign(t, cplx(0.0, 0.0));
    wxx_[half_] = cplx(1.0, 0.0);
    wyy_[half_] = cplx(1.0, 0.0);

    radii2_ = c.modulus_squared_levels();

    k_lo_ = static_cast<std::size_t>((half_ + 1) / 2);
    k_hi_ = (in_x_.size() - 1 - static_cast<std::size_t>(half_)) / 2;
    dd_start_ = k_lo_;
}

void DdEqualizer::butterfly(std::size_t k, cplx& yx, cplx& yy) const {
    const int t = cfg_.eq_taps;
    const std::size_t base = 2 * k - static_cast<std::size_t>(half_);
    cplx ax(0.0, 0.0), bx(0.0, 0.0), ay(0.0, 0.0), by(0.0, 0.0);
    const cplx* ux = in_x_.data() + base;
    const cplx* uy = in_y_.data() + base;
    for (int i = 0; i < t; ++i) {
        ax += wxx_[i] * ux[i];
        bx += wxy_[i] * uy[i];
        ay += wyx_[i] * ux[i];
        by += wyy_[i] * uy[i];
    }
    yx = ax + bx;
    yy = ay + by;
}

void DdEqualizer::run_cma() {
    const std::size_t n = std::min<std::size_t>(cfg_.cma_preconv_symbols, k_hi_ - k_lo_);
    const std::size_t end = k_lo_ + n;
    cma_out_.clear();
    cma_out_.reserve(n);
    const int t = cfg_.eq_taps;
    std::vector<cplx> gxx(t), gxy(t), gyx(t), gyy(t);

    std::size_t k = k_lo_;
    while (k < end) {
        const std::size_t len = std::min<std::size_t>(cfg_.block_size, end - k);
        std::fill(gxx.begin(), gxx.end(), cplx(0.0, 0.0));
        std::fill(gxy.begin(), gxy.end(), cplx(0.0, 0.0));
        std::fill(gyx.begin(), gyx.end(), cplx(0.0, 0.0));
        std::fill(gyy.begin(), gyy.end(), cplx(0.0, 0.0));
        double block_pow = 0.0;
        for (std::size_t j = 0; j < len; ++j) {
            cplx yx, yy;
            butterfly(k + j, yx, yy);
            block_pow += std::norm(yx) + std::norm(yy);
            cma_out_.push_back(yx);
            // nearest reference modulus (multi-modulus CMA)
            auto nearest_r2 = [this](double m2) {
                double best = radii2_[0];
                for (double r : radii2_)
                    if (std::abs(r - m2) < std::abs(best - m2)) best = r;
                return best;
            };
            const double mx = std::norm(yx);
            const double my = std::norm(yy);
            const cplx ex = yx * (nearest_r2(mx) - mx);
            const cplx ey = yy * (nearest_r2(my) - my);
            const std::size_t base = 2 * (k + j) - static_cast<std::size_t>(half_);
            const cplx* ux = in_x_.data() + base;
            const cplx* uy = in_y_.data() + base;
            for (int i = 0; i < t; ++i) {
                gxx[i] += ex * std::conj(ux[i]);
                gxy[i] += ex * std::conj(uy[i]);
                gyx[i] += ey * std::conj(ux[i]);
                gyy[i] += ey * std::conj(uy[i]);
            }
        }
        const double g_cma = cfg_.cma_step / static_cast<double>(len);
        for (int i = 0; i < t; ++i) {
            wxx_[i] += g_cma * gxx[i];
            wxy_[i] += g_cma * gxy[i];
            wyx_[i] += g_cma * gyx[i];
            wyy_[i] += g_cma * gyy[i];
        }
        ++tap_updates_;
        const double p = block_pow / (2.0 * static_cast<double>(len));
        diverge_run_ = !(p >= 0.1 && p <= 10.0) ? diverge_run_ + 1 : 0;
        if (diverge_run_ >= 10) converged_ = false;
        k += len;
    }
    dd_start_ = end;

    // Degenerate CMA solution (both outputs on the same polarization):
    // re-seed the y branch as the orthogonal of x.
    double cxx = 0.0, cxy = 0.0, cyy = 0.0;
    for (int i = 0; i < t; ++i) {
        cxx += std::norm(wxx_[i]) + std::norm(wxy_[i]);
        cyy += std::norm(wyx_[i]) + std::norm(wyy_[i]);
    }
    cplx dot(0.0, 0.0);
    for (int i = 0; i < t; ++i)
        dot += wxx_[i] * std::conj(wyx_[i]) + wxy_[i] * std::conj(wyy_[i]);
    cxy = std::abs(dot);
    if (cxy * cxy > 0.81 * cxx * cyy) {
        for (int i = 0; i < t; ++i) {
            wyx_[i] = -std::conj(wxy_[t - 1 - i]);
            wyy_[i] = std::conj(wxx_[t - 1 - i]);
        }
    }
}

double DdEqualizer::ramp_phase(int stream, std::size_t k) const {
    return 2.0 * M_PI * ramp_hz_[stream] * static_cast<double>(k) / baud_;
}

void DdEqualizer::set_stream_ramp(int stream, double hz) { ramp_hz_[stream] = hz; }

void DdEqualizer::enable_one_tap(double step) {
    one_tap_on_ = true;
    one_tap_step_ = step > 0.0 ? step : cfg_.eq_step;
}

void DdEqualizer::forward_block(std::size_t k0, std::size_t len, cplx* u_x, cplx* u_y) {
    z_buf_[0].resize(len);
    z_buf_[1].resize(len);
    for (std::size_t j = 0; j < len; ++j) {
        cplx yx, yy;
        butterfly(k0 + j, yx, yy);
        const cplx zx =
            yx * std::polar(1.0, -(ramp_phase(0, k0 + j) + static_phase_[0]));
        const cplx zy =
            yy * std::polar(1.0, -(ramp_phase(1, k0 + j) + static_phase_[1]));
        z_buf_[0][j] = zx;
        z_buf_[1][j] = zy;
        u_x[j] = one_tap_on_ ? h1_[0] * zx : zx;
        u_y[j] = one_tap_on_ ? h1_[1] * zy : zy;
    }
}

void DdEqualizer::acquire_block(std::size_t k0, std::size_t len, const double* th_x,
                                const double* th_y, std::span<const cplx> ref_x,
                                std::span<const cplx> ref_y, cplx* u_x, cplx* u_y) {
    if (ref_x.size() < len || ref_y.size() < len)
        throw shape_error("acquire_block: reference shorter than block");
    forward_block(k0, len, u_x, u_y);
    for (int s = 0; s < 2; ++s) {
        cplx* u = s == 0 ? u_x : u_y;
        const double* th = s == 0 ? th_x : th_y;
        const std::span<const cplx>& ref = s == 0 ? ref_x : ref_y;
        cplx num(0.0, 0.0);
        double den = 0.0;
        for (std::size_t j = 0; j < len; ++j) {
            const cplx uq = u[j] * std::polar(1.0, -th[j]);
            num += ref[j] * std::conj(uq);
            den += std::norm(uq);
        }
        if (den <= 0.0) throw dsp_error("acquire_block: zero-power block");
        const cplx g = num / den;
        if (one_tap_on_) {
            h1_[s] *= g;
            h1_angle_[s] += std::arg(g);
        } else {
            static_phase_[s] -= std::arg(g);
        }
        // corrected u for the caller (phase engines warm up on these)
        for (std::size_t j = 0; j < len; ++j)
            u[j] *= one_tap_on_ ? g : std::polar(1.0, std::arg(g));
    }
}

void DdEqualizer::commit_block(std::size_t k0, std::size_t len, const double* th_x,
                               const double* th_y, const cplx* ref_x,
                               const cplx* ref_y) {
    const Constellation& c = *constellation_;
    const int t = cfg_.eq_taps;
    static thread_local std::vector<cplx> gxx, gxy, gyx, gyy;
    gxx.assign(t, cplx(0.0, 0.0));
    gxy.assign(t, cplx(0.0, 0.0));
    gyx.assign(t, cplx(0.0, 0.0));
    gyy.assign(t, cplx(0.0, 0.0));
    cplx gh1[2] = {cplx(0.0, 0.0), cplx(0.0, 0.0)};
    double block_pow[2] = {0.0, 0.0};
    cplx m4[2] = {cplx(0.0, 0.0), cplx(0.0, 0.0)};
    cplx e_bf[2];

    for (std::size_t j = 0; j < len; ++j) {
        for (int s = 0; s < 2; ++s) {
            const double th = (s == 0 ? th_x : th_y)[j];
            const cplx z = z_buf_[s][j];
            const cplx h1 = one_tap_on_ ? h1_[s] : cplx(1.0, 0.0);
            const cplx zr = z * std::polar(1.0, -th);
            const cplx q = h1 * zr;
            const cplx* ref = s == 0 ? ref_x : ref_y;
            const cplx d = ref != nullptr ? ref[j] : c.points[c.nearest_index(q)];
            const cplx e = d - q;

            out_sym_[s].push_back(q);
            out_phase_[s].push_back(th + static_phase_[s] + h1_angle_[s]);
            block_pow[s] += std::norm(q);
            const cplx q2 = q * q;
            m4[s] += q2 * q2;

            if (one_tap_on_) gh1[s] += e * std::conj(zr);
            // rotate the error back to the butterfly output domain
            const cplx cmul = h1 * std::polar(1.0, -(ramp_phase(s, k0 + j) +
                                                     static_phase_[s] + th));
            const double m2 = std::max(std::norm(cmul), 0.25);
            e_bf[s] = e * std::conj(cmul) / m2;
        }
        const std::size_t base = 2 * (k0 + j) - static_cast<std::size_t>(half_);
        const cplx* ux = in_x_.data() + base;
        const cplx* uy = in_y_.data() + base;
        for (int i = 0; i < t; ++i) {
            gxx[i] += e_bf[0] * std::conj(ux[i]);
            gxy[i] += e_bf[0] * std::conj(uy[i]);
            gyx[i] += e_bf[1] * std::conj(ux[i]);
            gyy[i] += e_bf[1] * std::conj(uy[i]);
        }
    }

    const double g_dd = cfg_.eq_step / static_cast<double>(len);
    for (int i = 0; i < t; ++i) {
        wxx_[i] += g_dd * gxx[i];
        wxy_[i] += g_dd * gxy[i];
        wyx_[i] += g_dd * gyx[i];
        wyy_[i] += g_dd * gyy[i];
    }
    if (one_tap_on_) {
        const double g_1t = one_tap_step_ / static_cast<double>(len);
        for (int s = 0; s < 2; ++s) {
            const cplx h_old = h1_[s];
            h1_[s] += g_1t * gh1[s];
            h1_angle_[s] += std::arg(h1_[s] * std::conj(h_old));
        }
    }
    ++tap_updates_;

    // Divergence and tracking health. Non-finite power counts as outside
    // the window.
    bool diverged = false;
    bool bad = false;
    for (int s = 0; s < 2; ++s) {
        const double p = block_pow[s] / static_cast<double>(len);
        if (!(p >= 0.1 && p <= 10.0)) diverged = true;
        // mean squared decision error against the emitted symbols
        double me = 0.0;
        const std::size_t n_out = out_sym_[s].size();
        for (std::size_t j = n_out - len; j < n_out; ++j) {
            const cplx q = out_sym_[s][j];
            me += std::norm(c.points[c.nearest_index(q)] - q);
        }
        if (me / static_cast<double>(len) > 0.2) bad = true;
        m4_blocks_[s].push_back(m4[s] / static_cast<double>(len));
    }
    diverge_run_ = diverged ? diverge_run_ + 1 : 0;
    if (diverge_run_ >= 10) converged_ = false;
    if (bad) ++bad_blocks_;
}

double DdEqualizer::constellation_drift_rad(int stream) const {
    // Average the tone over super-blocks to push its argument noise well
    // below the unwrap threshold, then unwrap and take the least-squares
    // slope so endpoint noise cancels too.
    const auto& blocks = m4_blocks_[stream];
    constexpr std::size_t kGroup = 32;
    std::vector<double> series;
    double acc = 0.0;
    bool have_prev = false;
    double prev = 0.0;
    for (std::size_t g = 0; g + kGroup <= blocks.size(); g += kGroup) {
        cplx m(0.0, 0.0);
        for (std::size_t i = g; i < g + kGroup; ++i) m += blocks[i];
        m /= static_cast<double>(kGroup);
        if (std::abs(m) < 0.05) continue;  // noise-dominated tone, skip
        const double a = std::arg(m);
        if (have_prev) {
            double d = a - prev;
            while (d > M_PI) d -= 2.0 * M_PI;
            while (d < -M_PI) d += 2.0 * M_PI;
            acc += d;
        }
        prev = a;
        have_prev = true;
        series.push_back(acc);
    }
    const std::size_t n = series.size();
    if (n < 8) return 0.0;
    const double mean_i = static_cast<double>(n - 1) / 2.0;
    double mean_v = 0.0;
    for (double v : series) mean_v += v;
    mean_v /= static_cast<double>(n);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double di = static_cast<double>(i) - mean_i;
        num += di * (series[i] - mean_v);
        den += di * di;
    }
    return (num / den) * static_cast<double>(n - 1) / 4.0;
}

std::vector<RecoveredStream> equalize_dd(const Frame& two_sps, double baud,
                                         const Constellation& c, const DspConfig& cfg,
                                         const PhaseHook& hook) {
    DdEqualizer eq(two_sps, baud, c, cfg);
    eq.run_cma();
    double foe = 0.0;
    try {
        foe = estimate_foe_4thpower(eq.preconv_output(), baud);
    } catch (const dsp_error&) {
        foe = 0.0;  // no dominant tone; leave the offset to the DD loop
    }
    eq.set_stream_ramp(0, foe);
    eq.set_stream_ramp(1, foe);

    const std::size_t begin = eq.dd_start();
    const std::size_t end = eq.dd_end();
    std::vector<cplx> ux(cfg.block_size), uy(cfg.block_size);
    std::vector<double> thx(cfg.block_size), thy(cfg.block_size);
    for (std::size_t k = begin; k < end;) {
        const std::size_t len = std::min<std::size_t>(cfg.block_size, end - k);
        eq.forward_block(k, len, ux.data(), uy.data());
        hook(k, std::span<const cplx>(ux.data(), len), std::span<const cplx>(uy.data(), len),
             std::span<double>(thx.data(), len), std::span<double>(thy.data(), len));
        eq.commit_block(k, len, thx.data(), thy.data());
        k += len;
    }

    std::vector<RecoveredStream> out(2);
    for (int s = 0; s < 2; ++s) {
        RecoveredStream& r = out[s];
        r.symbols = eq.out_symbols(s);
        r.phase_estimate.values = eq.out_phase(s);
        r.phase_estimate.sample_rate = baud;
        r.phase_estimate.t0 = static_cast<double>(begin) / baud;
        r.applied_ramp_hz = foe;
        r.freq_offset_hz = foe;
        r.first_symbol = begin;
        r.tap_updates = eq.tap_updates();
        r.converged = eq.converged();
        r.bad_blocks = eq.bad_blocks();
    }
    return out;
}

}  // namespace comblink
