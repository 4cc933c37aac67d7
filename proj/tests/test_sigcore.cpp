#include <doctest.h>

#include <cmath>
#include <set>

#include "comblink/constellation.hpp"
#include "comblink/phase_noise.hpp"
#include "comblink/rng.hpp"
#include "comblink/rrc.hpp"

using namespace comblink;

namespace {

double q_function(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

std::vector<std::uint8_t> random_bits(std::size_t n, RngStream& rng) {
    std::vector<std::uint8_t> b(n);
    for (auto& v : b) v = static_cast<std::uint8_t>(rng.next_u32() & 1u);
    return b;
}

}  // namespace

TEST_CASE("qam constellations have unit average energy and valid Gray labels") {
    for (int order : {4, 16, 64}) {
        const Constellation c = make_qam(order);
        REQUIRE(c.points.size() == static_cast<std::size_t>(order));
        double e = 0.0;
        for (const cplx& p : c.points) e += std::norm(p);
        e /= order;
        CHECK(std::abs(e - 1.0) < 1e-12);

        // labels are a bijection
        std::set<std::uint32_t> labels(c.bit_labels.begin(), c.bit_labels.end());
        CHECK(labels.size() == static_cast<std::size_t>(order));

        // Gray property: nearest I/Q neighbors differ in exactly one bit
        const double d_min = 2.0 * c.axis_scale();
        for (std::size_t i = 0; i < c.points.size(); ++i)
            for (std::size_t j = i + 1; j < c.points.size(); ++j) {
                if (std::abs(std::abs(c.points[i] - c.points[j]) - d_min) > 1e-9)
                    continue;
                const std::uint32_t x = c.bit_labels[i] ^ c.bit_labels[j];
                CHECK(__builtin_popcount(x) == 1);
            }
    }
}

TEST_CASE("map_qam: QPSK 00 maps to the first-quadrant unit-energy point") {
    const Constellation c = make_qam(4);
    const std::vector<std::uint8_t> bits = {0, 0};
    const auto sym = map_qam(bits, c);
    REQUIRE(sym.size() == 1);
    const double s = 1.0 / std::sqrt(2.0);
    CHECK(std::abs(sym[0] - cplx(s, s)) < 1e-12);
}

TEST_CASE("map_qam: 64QAM projects onto exactly 8 I levels") {
    const Constellation c = make_qam(64);
    std::set<long long> levels;
    for (const cplx& p : c.points)
        levels.insert(std::llround(p.real() * 1e9));
    CHECK(levels.size() == 8);
}

TEST_CASE("map_qam: random bits give unit mean symbol energy") {
    const Constellation c = make_qam(64);
    RngStream rng(7, "test.mapper");
    const auto bits = random_bits(100002, rng);  // divisible by 6
    const auto sym = map_qam(bits, c);
    double e = 0.0;
    for (const cplx& s : sym) e += std::norm(s);
    e /= static_cast<double>(sym.size());
    CHECK(e == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("map_qam rejects bit counts not divisible by the symbol size") {
    const Constellation c = make_qam(16);
    const std::vector<std::uint8_t> bits = {0, 1, 0};
    CHECK_THROWS_AS(map_qam(bits, c), shape_error);
}

TEST_CASE("demap_hard round-trips noiseless symbols for all orders") {
    RngStream rng(3, "test.roundtrip");
    for (int order : {4, 16, 64}) {
        const Constellation c = make_qam(order);
        const int m = c.bits_per_symbol();
        const auto bits = random_bits(static_cast<std::size_t>(1000 * m), rng);
        const auto sym = map_qam(bits, c);
        const auto back = demap_hard(sym, c);
        CHECK(back == bits);
    }
}

TEST_CASE("demap_hard ties resolve to the lowest point index") {
    const Constellation c = make_qam(4);
    // midpoint between points 0 (+,+) and 2 (-,+) lies on the Q axis
    const cplx mid(0.0, 1.0 / std::sqrt(2.0));
    CHECK(c.nearest_index(mid) == 0);
    // center of the constellation ties across all four points
    CHECK(c.nearest_index(cplx(0.0, 0.0)) == 0);
}

TEST_CASE("QPSK over AWGN matches the Q-function BER at 10 dB") {
    const Constellation c = make_qam(4);
    RngStream rng(11, "test.awgn_ber");
    const std::size_t n = 1000000;
    const auto bits = random_bits(2 * n, rng);
    auto sym = map_qam(bits, c);
    const double snr = std::pow(10.0, 1.0);  // 10 dB
    const double sigma = std::sqrt(1.0 / snr / 2.0);
    for (cplx& s : sym) s += sigma * rng.cgaussian();
    const auto rx_bits = demap_hard(sym, c);
    std::size_t err = 0;
    for (std::size_t i = 0; i < rx_bits.size(); ++i) err += rx_bits[i] != bits[i];
    const double ber = static_cast<double>(err) / static_cast<double>(rx_bits.size());
    const double expected = q_function(std::sqrt(snr));  // per-bit, Gray QPSK
    CHECK(ber > 0.8 * expected);
    CHECK(ber < 1.2 * expected);
}

TEST_CASE("rrc taps: impulse response, length and unit energy") {
    const auto h = rrc_taps(0.05, 3, 64);
    CHECK(h.size() == 64u * 3u + 1u);
    double e = 0.0;
    for (double v : h) e += v * v;
    CHECK(e == doctest::Approx(1.0).epsilon(1e-12));

    // single unit impulse through rrc_shape reproduces the taps
    const std::vector<cplx> impulse = {cplx(1.0, 0.0)};
    const Frame f = rrc_shape(impulse, 0.05, 3, 64, 20e9);
    REQUIRE(f.x.size() == h.size());
    for (std::size_t i = 0; i < h.size(); ++i)
        CHECK(std::abs(f.x[i] - cplx(h[i], 0.0)) < 1e-12);
    CHECK(f.sample_rate == doctest::Approx(60e9));
}

TEST_CASE("rrc matched-filter cascade is Nyquist below -40 dB") {
    const auto h = rrc_taps(0.05, 3, 64);
    // full convolution of the filter with itself
    std::vector<double> rc(2 * h.size() - 1, 0.0);
    for (std::size_t i = 0; i < h.size(); ++i)
        for (std::size_t j = 0; j < h.size(); ++j) rc[i + j] += h[i] * h[j];
    const std::size_t center = h.size() - 1;
    const double peak = rc[center];
    double worst = 0.0;
    for (std::size_t k = 3; k + center < rc.size(); k += 3)
        worst = std::max({worst, std::abs(rc[center + k]), std::abs(rc[center - k])});
    CHECK(20.0 * std::log10(worst / peak) < -40.0);
}

TEST_CASE("rrc span too short to hold the pulse energy is rejected") {
    CHECK_THROWS_AS(rrc_taps(0.05, 3, 4), config_error);
}

TEST_CASE("rrc occupied bandwidth is (1+rolloff)*baud") {
    // 20 GBaud at rolloff 0.05: spectrum should vanish beyond 10.5 GHz and
    // be flat below 9.5 GHz.
    const auto h = rrc_taps(0.05, 3, 64);
    const double fs = 60e9;
    auto mag_at = [&](double f) {
        cplx acc(0.0, 0.0);
        const double mid = (static_cast<double>(h.size()) - 1.0) / 2.0;
        for (std::size_t i = 0; i < h.size(); ++i) {
            const double t = (static_cast<double>(i) - mid) / fs;
            acc += h[i] * std::polar(1.0, -2.0 * M_PI * f * t);
        }
        return std::abs(acc);
    };
    const double pass = mag_at(0.0);
    CHECK(mag_at(9.4e9) > 0.7 * pass);    // inside the passband edge
    CHECK(mag_at(10.6e9) < 0.01 * pass);  // beyond (1+r)*baud/2
    CHECK(mag_at(15e9) < 0.01 * pass);    // truncation sidelobes only
}

TEST_CASE("wiener phase: degenerate, reproducible, correct variance growth") {
    RngStream rng(5, "test.wiener");

    const PhaseTrace zero = wiener_phase(0.0, 1000, 50e-12, rng.substream("z"));
    for (double v : zero.values) CHECK(v == 0.0);

    const PhaseTrace a = wiener_phase(1e5, 5000, 50e-12, rng.substream("s"));
    const PhaseTrace b = wiener_phase(1e5, 5000, 50e-12, rng.substream("s"));
    CHECK(a.values == b.values);

    // Var[phi(t)] = 2*pi*linewidth*t, Monte Carlo over 200 realizations
    const double dt = 50e-12;
    const std::size_t n = 1000000;
    const std::size_t n_real = 200;
    double mean_sq_end = 0.0;
    for (std::size_t r = 0; r < n_real; ++r) {
        const PhaseTrace t = wiener_phase(1e5, n, dt, rng.substream("mc", r));
        mean_sq_end += t.values.back() * t.values.back();
    }
    mean_sq_end /= static_cast<double>(n_real);
    const double expected = 2.0 * M_PI * 1e5 * static_cast<double>(n - 1) * dt;
    CHECK(mean_sq_end == doctest::Approx(expected).epsilon(0.10));
}

TEST_CASE("wiener increments are uncorrelated at lag >= 1") {
    RngStream rng(9, "test.wiener_incr");
    const std::size_t n = 1000000;
    const PhaseTrace t = wiener_phase(1e5, n, 50e-12, rng);
    std::vector<double> inc(n - 1);
    double mean = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        inc[i] = t.values[i + 1] - t.values[i];
        mean += inc[i];
    }
    mean /= static_cast<double>(inc.size());
    double var = 0.0;
    for (double v : inc) var += (v - mean) * (v - mean);
    for (std::size_t lag : {1u, 2u, 5u}) {
        double acc = 0.0;
        for (std::size_t i = 0; i + lag < inc.size(); ++i)
            acc += (inc[i] - mean) * (inc[i + lag] - mean);
        CHECK(std::abs(acc / var) < 0.01);
    }
}

TEST_CASE("rng streams are label-separated and order-independent") {
    RngStream a(42, "alpha");
    RngStream b(42, "beta");
    CHECK(a.next_u64() != b.next_u64());

    RngStream s1(1, "x");
    RngStream s2(1, "x");
    std::vector<double> v1, v2;
    for (int i = 0; i < 100; ++i) v1.push_back(s1.gaussian());
    // interleave draws from an unrelated stream; s2 must not care
    RngStream other(1, "y");
    for (int i = 0; i < 100; ++i) {
        (void)other.gaussian();
        v2.push_back(s2.gaussian());
    }
    CHECK(v1 == v2);
}
