#include <doctest.h>

#include <cmath>
#include <limits>

#include "comblink/fiber.hpp"
#include "comblink/nl_proxy.hpp"
#include "comblink/frontend.hpp"
#include "comblink/rng.hpp"
#include "comblink/rrc.hpp"

using namespace comblink;

namespace {

Frame noise_frame(std::size_t n, double fs, RngStream rng, bool dual = false) {
    Frame f;
    f.sample_rate = fs;
    f.x.resize(n);
    for (auto& v : f.x) v = rng.cgaussian();
    if (dual) {
        f.y.resize(n);
        for (auto& v : f.y) v = rng.cgaussian();
    }
    return f;
}

double frame_energy(const Frame& f) {
    double e = 0.0;
    for (const cplx& v : f.x) e += std::norm(v);
    for (const cplx& v : f.y) e += std::norm(v);
    return e;
}

}  // namespace

TEST_CASE("apply_cd: zero length is the identity") {
    RngStream rng(1, "linksim.cd0");
    const Frame f = noise_frame(4096, 50e9, rng);
    FiberSpec fib;
    fib.length_km = 0.0;
    const Frame out = apply_cd(f, fib, +1);
    CHECK(out.x == f.x);
}

TEST_CASE("apply_cd round trip is the identity within 1e-9") {
    RngStream rng(2, "linksim.cdrt");
    const Frame f = noise_frame(1 << 16, 50e9, rng, true);
    for (double km : {0.0, 80.0, 160.0}) {
        FiberSpec fib;
        fib.length_km = km;
        const Frame fwd = apply_cd(f, fib, +1);
        const Frame back = apply_cd(fwd, fib, -1);
        double worst = 0.0;
        for (std::size_t i = 0; i < f.size(); ++i) {
            worst = std::max(worst, std::abs(back.x[i] - f.x[i]));
            worst = std::max(worst, std::abs(back.y[i] - f.y[i]));
        }
        CHECK(worst < 1e-9);
    }
}

TEST_CASE("apply_cd is unitary") {
    RngStream rng(3, "linksim.cdu");
    const Frame f = noise_frame(1 << 14, 50e9, rng);
    FiberSpec fib;
    fib.length_km = 160.0;
    const Frame out = apply_cd(f, fib, +1);
    CHECK(frame_energy(out) == doctest::Approx(frame_energy(f)).epsilon(1e-12));
}

TEST_CASE("apply_cd spreads a pulse over the analytic group-delay window") {
    // 20 GBaud RRC pulse, D = 16.5 ps/nm/km, 80 km: group-delay spread over
    // the occupied band is |beta2|*L*2*pi*B_signal.
    FiberSpec fib;
    fib.length_km = 80.0;
    const double fs = 60e9;
    std::vector<cplx> one = {cplx(1.0, 0.0)};
    Frame f = rrc_shape(one, 0.05, 3, 64, 20e9);
    // center the pulse in a longer frame
    Frame frame;
    frame.sample_rate = fs;
    frame.x.assign(16384, cplx(0.0, 0.0));
    const std::size_t off = 8192 - f.x.size() / 2;
    for (std::size_t i = 0; i < f.x.size(); ++i) frame.x[off + i] = f.x[i];

    const Frame d = apply_cd(frame, fib, +1);
    // RMS time spread of |d|^2 around its centroid
    double p = 0.0, t1 = 0.0, t2 = 0.0;
    for (std::size_t i = 0; i < d.x.size(); ++i) {
        const double w = std::norm(d.x[i]);
        p += w;
        t1 += w * static_cast<double>(i);
        t2 += w * static_cast<double>(i) * static_cast<double>(i);
    }
    t1 /= p;
    t2 = t2 / p - t1 * t1;
    const double rms_spread_s = std::sqrt(t2) / fs;

    const double beta2l = std::abs(fib.beta2_s2_per_m()) * 80e3;
    const double b_sig = 21e9;  // (1+rolloff)*baud
    const double spread_s = beta2l * 2.0 * M_PI * b_sig;
    // the dispersed pulse is near-rectangular in time: rms = width/sqrt(12)
    CHECK(rms_spread_s == doctest::Approx(spread_s / std::sqrt(12.0)).epsilon(0.15));
    // and it must exceed the undispersed pulse core by far
    CHECK(spread_s * fs > 10.0);
}

TEST_CASE("apply_cd overlap-save fallback matches the exact path interior") {
    RngStream rng(4, "linksim.cdos");
    const Frame f = noise_frame(1 << 16, 50e9, rng);
    FiberSpec fib;
    fib.length_km = 160.0;
    const Frame exact = apply_cd(f, fib, +1);
    const Frame blocked = apply_cd(f, fib, +1, 4096);  // force overlap-save
    double worst = 0.0, rms = 0.0;
    for (std::size_t i = 4096; i + 4096 < f.size(); ++i) {
        const double e = std::abs(exact.x[i] - blocked.x[i]);
        worst = std::max(worst, e);
        rms += e * e;
    }
    rms = std::sqrt(rms / static_cast<double>(f.size() - 8192));
    // seam error is floor-limited by the kernel periodization tail
    CHECK(worst < 5e-3);
    CHECK(rms < 1e-3);
}

TEST_CASE("add_awgn: infinite SNR is the identity, seeds reproduce") {
    RngStream rng(5, "linksim.awgn");
    const Frame f = noise_frame(8192, 50e9, rng, true);
    const Frame same =
        add_awgn(f, std::numeric_limits<double>::infinity(), rng.substream("n"));
    CHECK(same.x == f.x);

    const Frame a = add_awgn(f, 12.0, rng.substream("s"));
    const Frame b = add_awgn(f, 12.0, rng.substream("s"));
    CHECK(a.x == b.x);
    CHECK(a.y == b.y);
}

TEST_CASE("add_awgn hits the target SNR within 0.1 dB") {
    RngStream rng(6, "linksim.awgnlvl");
    const Frame f = noise_frame(1 << 20, 50e9, rng);
    const Frame out = add_awgn(f, 15.0, rng.substream("n"));
    double pn = 0.0, ps = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        ps += std::norm(f.x[i]);
        pn += std::norm(out.x[i] - f.x[i]);
    }
    const double snr_db = 10.0 * std::log10(ps / pn);
    CHECK(std::abs(snr_db - 15.0) < 0.1);
}

TEST_CASE("nl_phase_proxy: zero power flag is the identity") {
    RngStream rng(7, "linksim.nl0");
    std::vector<Frame> ch = {noise_frame(4096, 60e9, rng.substream("a")),
                             noise_frame(4096, 60e9, rng.substream("b"))};
    NlProxySpec spec;
    spec.base_variance_rate = 1e6;
    spec.correlation_time_s = 1e-9;
    const auto res =
        nl_phase_proxy(ch, -std::numeric_limits<double>::infinity(), spec, rng);
    CHECK(res.frames[0].x == ch[0].x);
    for (double v : res.traces[0].values) CHECK(v == 0.0);
}

TEST_CASE("nl_phase_proxy: full correlation and zero delay duplicate the trace") {
    RngStream rng(8, "linksim.nl1");
    std::vector<Frame> ch = {noise_frame(4096, 60e9, rng.substream("a")),
                             noise_frame(4096, 60e9, rng.substream("b"))};
    NlProxySpec spec;
    spec.base_variance_rate = 1e7;
    spec.correlation_time_s = 2e-9;
    spec.inter_channel_corr = 1.0;
    spec.ref_power_dbm = 0.0;
    const auto res = nl_phase_proxy(ch, 0.0, spec, rng);
    CHECK(res.traces[0].values == res.traces[1].values);
}

TEST_CASE("nl_phase_proxy preserves per-sample magnitude") {
    RngStream rng(9, "linksim.nlmag");
    std::vector<Frame> ch = {noise_frame(4096, 60e9, rng.substream("a"), true)};
    NlProxySpec spec;
    spec.base_variance_rate = 1e8;
    spec.correlation_time_s = 1e-9;
    const auto res = nl_phase_proxy(ch, 3.0, spec, rng);
    for (std::size_t i = 0; i < ch[0].size(); i += 13)
        CHECK(std::abs(res.frames[0].x[i]) ==
              doctest::Approx(std::abs(ch[0].x[i])).epsilon(1e-14));
}

TEST_CASE("nl_phase_proxy cross-correlation matches the mixing weight") {
    RngStream rng(10, "linksim.nlcorr");
    NlProxySpec spec;
    spec.base_variance_rate = 1e7;
    spec.correlation_time_s = 5e-9;
    spec.inter_channel_corr = 0.6;
    const std::size_t n = 20000;
    double acc = 0.0;
    const std::size_t n_real = 100;
    for (std::size_t r = 0; r < n_real; ++r) {
        std::vector<Frame> ch = {noise_frame(256, 60e9, rng.substream("f", 2 * r)),
                                 noise_frame(256, 60e9, rng.substream("f", 2 * r + 1))};
        ch[0].x.resize(n, cplx(1.0, 0.0));
        ch[1].x.resize(n, cplx(1.0, 0.0));
        const auto res = nl_phase_proxy(ch, 0.0, spec, rng.substream("nl", r));
        const auto& a = res.traces[0].values;
        const auto& b = res.traces[1].values;
        double ma = 0, mb = 0;
        for (std::size_t i = 0; i < n; ++i) {
            ma += a[i];
            mb += b[i];
        }
        ma /= n;
        mb /= n;
        double sab = 0, sa = 0, sb = 0;
        for (std::size_t i = 0; i < n; ++i) {
            sab += (a[i] - ma) * (b[i] - mb);
            sa += (a[i] - ma) * (a[i] - ma);
            sb += (b[i] - mb) * (b[i] - mb);
        }
        acc += sab / std::sqrt(sa * sb);
    }
    CHECK(acc / static_cast<double>(n_real) == doctest::Approx(0.6).epsilon(0.034));
}

TEST_CASE("rx_frontend: generous bandwidth and equal rates pass through") {
    RngStream rng(11, "linksim.fe_id");
    Frame f = noise_frame(8192, 50e9, rng);
    const Frame out = rx_frontend(f, 50e9, 25e9, 0.0);
    double worst = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i)
        worst = std::max(worst, std::abs(out.x[i] - f.x[i]));
    CHECK(worst < 1e-6);
}

TEST_CASE("rx_frontend 60 to 50 GS/s preserves the in-band spectrum") {
    RngStream rng(12, "linksim.fe_resample");
    // band-limited test signal: shaped 20 GBaud RRC noise
    const std::size_t n_sym = 4096;
    std::vector<cplx> syms(n_sym);
    for (auto& s : syms) s = rng.cgaussian();
    Frame f = rrc_shape(syms, 0.05, 3, 64, 20e9);
    f.x.resize(n_sym * 3);  // length divisible by 6
    f.t0 = 0.0;

    const Frame out = rx_frontend(f, 50e9, 23e9, 0.0);
    CHECK(out.size() == n_sym * 3 * 5 / 6);
    CHECK(out.sample_rate == doctest::Approx(50e9));

    // compare the spectrum at shared in-band frequencies via direct probes
    auto psd_at = [](const Frame& fr, double freq) {
        cplx acc(0.0, 0.0);
        const double dt = 1.0 / fr.sample_rate;
        for (std::size_t i = 0; i < fr.size(); ++i)
            acc += fr.x[i] * std::polar(1.0, -2.0 * M_PI * freq * dt * i);
        return std::norm(acc) / static_cast<double>(fr.size()) /
               static_cast<double>(fr.size());
    };
    const double df = 60e9 / (n_sym * 3);  // shared bin grid
    for (double freq : {256 * df, 768 * df, 1536 * df}) {
        const double a = psd_at(f, freq);
        const double b = psd_at(out, freq);
        CHECK(10.0 * std::log10(b / a) == doctest::Approx(0.0).epsilon(0.01));
    }
}

TEST_CASE("rx_frontend applies an exact fractional-sample skew") {
    // a lone RRC pulse; its peak must move by exactly 3.7 samples
    std::vector<cplx> one = {cplx(1.0, 0.0)};
    Frame p = rrc_shape(one, 0.2, 4, 32, 12.5e9);
    Frame frame;
    frame.sample_rate = p.sample_rate;
    frame.x.assign(4096, cplx(0.0, 0.0));
    for (std::size_t i = 0; i < p.x.size(); ++i) frame.x[1000 + i] = p.x[i];

    const double fs = frame.sample_rate;
    const Frame out = rx_frontend(frame, fs, fs, 3.7 / fs);

    auto peak_pos = [](const Frame& fr) {
        std::size_t im = 1;
        for (std::size_t i = 1; i + 1 < fr.size(); ++i)
            if (std::abs(fr.x[i]) > std::abs(fr.x[im])) im = i;
        const double a = std::abs(fr.x[im - 1]);
        const double b = std::abs(fr.x[im]);
        const double c = std::abs(fr.x[im + 1]);
        return static_cast<double>(im) + 0.5 * (a - c) / (a - 2.0 * b + c);
    };
    CHECK(peak_pos(out) - peak_pos(frame) == doctest::Approx(3.7).epsilon(0.01));
}

TEST_CASE("rx_frontend rejects upsampling") {
    RngStream rng(14, "linksim.fe_up");
    Frame f = noise_frame(1024, 50e9, rng);
    CHECK_THROWS_AS(rx_frontend(f, 60e9, 25e9, 0.0), config_error);
}
