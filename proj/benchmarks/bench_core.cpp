#include <benchmark/benchmark.h>

#include <cmath>

#include "comblink/bps.hpp"
#include "comblink/equalizer.hpp"
#include "comblink/fft.hpp"
#include "comblink/fiber.hpp"
#include "comblink/matched_filter.hpp"
#include "comblink/metrics.hpp"
#include "comblink/phase_noise.hpp"
#include "comblink/rng.hpp"
#include "comblink/rrc.hpp"

using namespace comblink;

namespace {

std::vector<cplx> random_symbols(const Constellation& c, std::size_t n,
                                 std::uint64_t seed) {
    RngStream rng(seed, "bench.symbols");
    std::vector<std::uint8_t> bits(n * c.bits_per_symbol());
    for (auto& b : bits) b = static_cast<std::uint8_t>(rng.next_u32() & 1u);
    return map_qam(bits, c);
}

std::vector<cplx> shape_rc_2sps(std::span<const cplx> symbols, double rolloff) {
    const std::size_t n = 2 * symbols.size();
    std::vector<cplx> spec(n, cplx(0.0, 0.0));
    for (std::size_t i = 0; i < symbols.size(); ++i) spec[2 * i] = symbols[i];
    fft::forward(spec);
    for (std::size_t k = 0; k < n; ++k) {
        const double f = fft::bin_freq(k, n, 2.0);
        const double h = rrc_freq_response(f, 1.0, rolloff);
        spec[k] *= h * h;
    }
    fft::inverse(spec);
    for (cplx& v : spec) v *= 2.0;
    return spec;
}

}  // namespace

static void BM_RrcShape(benchmark::State& state) {
    const Constellation c = make_qam(64);
    const auto syms = random_symbols(c, static_cast<std::size_t>(state.range(0)), 1);
    for (auto _ : state) {
        Frame f = rrc_shape(syms, 0.05, 3, 64, 20e9);
        benchmark::DoNotOptimize(f.x.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_RrcShape)->Arg(1 << 12)->Arg(1 << 14);

static void BM_WienerPhase(benchmark::State& state) {
    RngStream rng(2, "bench.wiener");
    for (auto _ : state) {
        PhaseTrace t =
            wiener_phase(1e5, static_cast<std::size_t>(state.range(0)), 50e-12, rng);
        benchmark::DoNotOptimize(t.values.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_WienerPhase)->Arg(1 << 18);

static void BM_ApplyCd(benchmark::State& state) {
    RngStream rng(3, "bench.cd");
    Frame f;
    f.sample_rate = 50e9;
    f.x.resize(static_cast<std::size_t>(state.range(0)));
    for (auto& v : f.x) v = rng.cgaussian();
    FiberSpec fib;
    fib.length_km = 80.0;
    for (auto _ : state) {
        Frame out = apply_cd(f, fib, +1);
        benchmark::DoNotOptimize(out.x.data());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ApplyCd)->Arg(1 << 16)->Arg(1 << 18);

static void BM_BpsEngine(benchmark::State& state) {
    const Constellation c = make_qam(64);
    const std::size_t n_streams = static_cast<std::size_t>(state.range(0));
    const int window = static_cast<int>(state.range(1));
    const auto syms = random_symbols(c, 4096, 4);
    BpsEngine eng(c, window, 32, n_streams);
    std::vector<cplx> row(n_streams);
    std::size_t i = 0;
    for (auto _ : state) {
        for (std::size_t s = 0; s < n_streams; ++s) row[s] = syms[(i + s) % 4096];
        benchmark::DoNotOptimize(eng.push(row));
        ++i;
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_BpsEngine)->Args({1, 64})->Args({4, 16});

static void BM_EqualizeDd(benchmark::State& state) {
    const Constellation c = make_qam(64);
    const std::size_t n_sym = 1 << 13;
    const auto sx = random_symbols(c, n_sym, 5);
    const auto sy = random_symbols(c, n_sym, 6);
    Frame f;
    f.sample_rate = 40e9;
    f.t0 = 0.0;
    f.x = shape_rc_2sps(sx, 0.05);
    f.y = shape_rc_2sps(sy, 0.05);
    DspConfig cfg;
    cfg.cma_preconv_symbols = 2048;
    for (auto _ : state) {
        BpsEngine ex(c, cfg.bps_window, cfg.bps_test_angles, 1);
        BpsEngine ey(c, cfg.bps_window, cfg.bps_test_angles, 1);
        auto hook = [&](std::size_t, std::span<const cplx> ux, std::span<const cplx> uy,
                        std::span<double> tx, std::span<double> ty) {
            for (std::size_t j = 0; j < ux.size(); ++j) {
                tx[j] = ex.push(std::span<const cplx>(&ux[j], 1));
                ty[j] = ey.push(std::span<const cplx>(&uy[j], 1));
            }
        };
        auto streams = equalize_dd(f, 20e9, c, cfg, hook);
        benchmark::DoNotOptimize(streams[0].symbols.data());
    }
    state.SetItemsProcessed(state.iterations() * n_sym);
}
BENCHMARK(BM_EqualizeDd)->Unit(benchmark::kMillisecond);

static void BM_ComputeGmi(benchmark::State& state) {
    const Constellation c = make_qam(64);
    const std::size_t n = static_cast<std::size_t>(state.range(0));
    RngStream rng(7, "bench.gmi");
    std::vector<std::uint8_t> bits(n * 6);
    for (auto& b : bits) b = static_cast<std::uint8_t>(rng.next_u32() & 1u);
    auto sym = map_qam(bits, c);
    const double sg = std::sqrt(std::pow(10.0, -1.8) / 2.0);
    for (auto& s : sym) s += sg * rng.cgaussian();
    for (auto _ : state) {
        benchmark::DoNotOptimize(compute_gmi_2d(sym, bits, c));
    }
    state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_ComputeGmi)->Arg(1 << 13)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
