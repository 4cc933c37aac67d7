#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>

#include "comblink/carrier_recovery.hpp"
#include "comblink/fft.hpp"
#include "comblink/matched_filter.hpp"
#include "comblink/phase_noise.hpp"
#include "comblink/rng.hpp"
#include "comblink/runner.hpp"
#include "comblink/waveform_io.hpp"

using namespace comblink;

namespace {

const char* kSmallScenario = R"(
# desk-scale smoke scenario
[combs]
spacing_ghz = 25
spacing_difference_khz = 0
beat_mhz = 20
linewidth_signal_khz = 50
linewidth_lo_khz = 50
n_lines = 25

[channels]
line_indices = 0,1
baud_gbaud = 20
rolloff = 0.05
tx_sps = 3
symbols_pow2 = 13
modulation_order = 64

[fiber]
length_km = 0

[noise]
snr_db = 25

[frontend]
enabled = false

[dsp]
mode = independent
cma_preconv_pow2 = 10
metrics_skip_symbols = 512

[run]
seed = 7
)";

Scenario small_scenario(const std::string& extra = "") {
    return Scenario::from_ini(IniDoc::parse(std::string(kSmallScenario) + extra));
}

std::vector<cplx> random_symbols(const Constellation& c, std::size_t n, RngStream rng) {
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

TEST_CASE("ini parser: sections, comments, errors") {
    const IniDoc doc = IniDoc::parse("# c\n[a]\nx = 1.5 ; tail comment\ny= two\n[b]\nx=3\n");
    CHECK(doc.get_double("a.x", 0.0) == doctest::Approx(1.5));
    CHECK(doc.get("a.y", "") == "two");
    CHECK(doc.get_int("b.x", 0) == 3);
    CHECK_THROWS_AS(IniDoc::parse("[a\nk=v\n"), parse_error);
    CHECK_THROWS_AS(IniDoc::parse("[a]\njust a line\n"), parse_error);
    CHECK_THROWS_AS((void)doc.get_double("a.y", 0.0), parse_error);
}

TEST_CASE("scenario validation lists every offending field") {
    const std::string bad = R"(
[channels]
line_indices = 0,40
baud_gbaud = -3
modulation_order = 32

[dsp]
mode = sideways
)";
    try {
        (void)Scenario::from_ini(IniDoc::parse(bad));
        FAIL("expected config_error");
    } catch (const config_error& e) {
        const std::string msg = e.what();
        CHECK(msg.find("line_indices") != std::string::npos);
        CHECK(msg.find("baud_gbaud") != std::string::npos);
        CHECK(msg.find("modulation_order") != std::string::npos);
        CHECK(msg.find("dsp.mode") != std::string::npos);
    }
}

TEST_CASE("scenario hash is stable and sensitive") {
    const Scenario a = small_scenario();
    const Scenario b = small_scenario();
    CHECK(a.hash() == b.hash());
    const Scenario c = small_scenario("\n[run]\nseed = 8\n");
    CHECK(a.hash() != c.hash());
    // DSP-mode changes keep the physical label (same waveforms)
    const Scenario d = small_scenario("\n[dsp]\nmode = joint\n");
    CHECK(a.physical_label() == d.physical_label());
    CHECK(a.hash() != d.hash());
}

TEST_CASE("waveform files round-trip bit-exactly at stored precision") {
    RngStream rng(3, "expcli.wave");
    Frame f;
    f.sample_rate = 50e9;
    f.t0 = -1.25e-9;
    f.x.resize(4096);
    f.y.resize(4096);
    for (auto& v : f.x) v = rng.cgaussian();
    for (auto& v : f.y) v = rng.cgaussian();

    const std::string path = "/tmp/comblink_wave_test.cwf";
    export_waveform(f, path);
    const Frame g = import_waveform(path);
    CHECK(g.sample_rate == f.sample_rate);
    CHECK(g.t0 == f.t0);
    CHECK(g.pol_count() == 2);
    REQUIRE(g.size() == f.size());

    // float32 storage: a second round trip must be bit-identical
    export_waveform(g, path);
    const Frame h = import_waveform(path);
    CHECK(h.x == g.x);
    CHECK(h.y == g.y);
    std::remove(path.c_str());
}

TEST_CASE("truncated waveform files report the byte offset") {
    RngStream rng(4, "expcli.trunc");
    Frame f;
    f.sample_rate = 1e9;
    f.x.resize(256);
    for (auto& v : f.x) v = rng.cgaussian();
    const std::string path = "/tmp/comblink_trunc_test.cwf";
    export_waveform(f, path);
    // chop the file mid-payload
    {
        std::ifstream in(path, std::ios::binary);
        std::vector<char> all((std::istreambuf_iterator<char>(in)), {});
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        out.write(all.data(), static_cast<std::streamsize>(all.size() / 2));
    }
    try {
        (void)import_waveform(path);
        FAIL("expected parse_error");
    } catch (const parse_error& e) {
        CHECK(std::string(e.what()).find("offset") != std::string::npos);
    }
    std::remove(path.c_str());
}

TEST_CASE("run_scenario is deterministic row for row") {
    const Scenario sc = small_scenario();
    const RunRecord a = run_scenario(sc);
    const RunRecord b = run_scenario(sc);
    std::string csv_a = csv_header(), csv_b = csv_header();
    append_csv_rows(csv_a, a);
    append_csv_rows(csv_b, b);
    CHECK(csv_a == csv_b);
    REQUIRE(a.rows.size() == 2);
    CHECK(a.rows[0].metrics.gmi_bits_per_4d > 10.0);
    CHECK_FALSE(a.dsp_failure);
}

TEST_CASE("sweep CSV is byte-identical for any thread count") {
    IniDoc base = IniDoc::parse(kSmallScenario);
    std::vector<SweepAxis> axes;
    axes.push_back({"noise.snr_db", {"20", "25"}});
    axes.push_back({"dsp.mode", {"independent", "master_slave"}});
    const SweepResult r1 = run_sweep(base, axes, 1);
    const SweepResult r2 = run_sweep(base, axes, 4);
    CHECK(r1.csv == r2.csv);
    CHECK(r1.records.size() == 4);
    CHECK_FALSE(r1.any_validation_failure);
}

TEST_CASE("identical physics under different DSP modes share waveforms") {
    // GMI of the independent and master-slave runs on the same scenario
    // differ only through processing, not through different noise draws:
    // the master channel (line 0) is processed identically in both.
    const Scenario ind = small_scenario();
    Scenario ms = small_scenario("\n[dsp]\nmode = master_slave\nmaster_line = 0\n");
    const RunRecord a = run_scenario(ind);
    const RunRecord b = run_scenario(ms);
    CHECK(a.rows[0].metrics.gmi_bits_per_4d ==
          doctest::Approx(b.rows[0].metrics.gmi_bits_per_4d).epsilon(1e-12));
}

TEST_CASE("master-slave: a slave fed the master's own data matches independent") {
    RngStream rng(5, "expcli.ms_self");
    const Constellation c = make_qam(64);
    const double baud = 20e9;
    const std::size_t n_sym = 1 << 14;
    const auto sx = random_symbols(c, n_sym, rng.substream("x"));
    const auto sy = random_symbols(c, n_sym, rng.substream("y"));

    Frame f;
    f.sample_rate = 2.0 * baud;
    f.t0 = 0.0;
    f.x = shape_rc_2sps(sx, 0.05);
    f.y = shape_rc_2sps(sy, 0.05);
    // common laser phase noise, 100 kHz at the symbol rate
    const PhaseTrace ph = wiener_phase(100e3, f.size(), 1.0 / f.sample_rate,
                                       rng.substream("phase"));
    for (std::size_t i = 0; i < f.size(); ++i) {
        const cplx r = std::polar(1.0, ph.values[i]);
        f.x[i] *= r;
        f.y[i] *= r;
    }
    RngStream nrng = rng.substream("noise");
    const double sigma = std::sqrt(std::pow(10.0, -2.2) / 2.0);
    for (auto& v : f.x) v += sigma * nrng.cgaussian();
    for (auto& v : f.y) v += sigma * nrng.cgaussian();

    DspConfig cfg;
    cfg.cma_preconv_symbols = 2048;

    ChannelInput master{&f, 0, sx, sy};
    ChannelInput slave_copy{&f, 0, sx, sy};

    const RecoveryOutput ind = recover_independent({master}, baud, c, cfg);
    const RecoveryOutput ms =
        recover_master_slave({master, slave_copy}, 0, baud, c, cfg, 0.0);

    // slave executed zero BPS distance evaluations
    CHECK(ms.streams[2].bps_distance_evals == 0);
    CHECK(ms.streams[3].bps_distance_evals == 0);
    CHECK(ind.streams[0].bps_distance_evals > 0);

    // and, after aligning the quarter-turn ambiguity of both, its decisions
    // match the independent run almost everywhere
    const RecoveredStream a = resolve_ambiguity(
        ind.streams[0],
        std::span<const cplx>(sx.data() + ind.streams[0].first_symbol, 2048));
    const RecoveredStream b = resolve_ambiguity(
        ms.streams[2],
        std::span<const cplx>(sx.data() + ms.streams[2].first_symbol, 2048));
    REQUIRE(a.symbols.size() == b.symbols.size());
    std::size_t same = 0;
    for (std::size_t i = 0; i < a.symbols.size(); ++i)
        same += c.nearest_index(a.symbols[i]) == c.nearest_index(b.symbols[i]);
    CHECK(static_cast<double>(same) / static_cast<double>(a.symbols.size()) > 0.98);
}

TEST_CASE("joint recovery of a single channel stays close to independent") {
    RngStream rng(6, "expcli.joint_one");
    const Constellation c = make_qam(64);
    const double baud = 20e9;
    const std::size_t n_sym = 1 << 14;
    const auto sx = random_symbols(c, n_sym, rng.substream("x"));
    const auto sy = random_symbols(c, n_sym, rng.substream("y"));
    Frame f;
    f.sample_rate = 2.0 * baud;
    f.t0 = 0.0;
    f.x = shape_rc_2sps(sx, 0.05);
    f.y = shape_rc_2sps(sy, 0.05);
    const PhaseTrace ph =
        wiener_phase(50e3, f.size(), 1.0 / f.sample_rate, rng.substream("phase"));
    for (std::size_t i = 0; i < f.size(); ++i) {
        const cplx r = std::polar(1.0, ph.values[i]);
        f.x[i] *= r;
        f.y[i] *= r;
    }
    RngStream nrng = rng.substream("noise");
    const double sigma = std::sqrt(std::pow(10.0, -2.2) / 2.0);
    for (auto& v : f.x) v += sigma * nrng.cgaussian();
    for (auto& v : f.y) v += sigma * nrng.cgaussian();

    DspConfig cfg;
    cfg.cma_preconv_symbols = 2048;
    ChannelInput ch{&f, 0, sx, sy};

    const RecoveryOutput ind = recover_independent({ch}, baud, c, cfg);
    const RecoveryOutput joint = recover_joint({ch}, baud, c, cfg, 0.0);

    auto evm = [&](const RecoveredStream& s, const std::vector<cplx>& ref) {
        const RecoveredStream al = resolve_ambiguity(
            s, std::span<const cplx>(ref.data() + s.first_symbol, 2048));
        double pe = 0.0, ps = 0.0;
        for (std::size_t i = 2048; i < al.symbols.size(); ++i) {
            pe += std::norm(al.symbols[i] - ref[al.first_symbol + i]);
            ps += std::norm(ref[al.first_symbol + i]);
        }
        return 10.0 * std::log10(pe / ps);
    };
    const double e_ind = evm(ind.streams[0], sx);
    const double e_joint = evm(joint.streams[0], sx);
    CHECK(std::abs(e_ind - e_joint) < 1.5);  // same data, near-equal quality
}

TEST_CASE("uncompensated spacing difference at wide separation flags tracking failure") {
    const std::string base = R"(
[combs]
spacing_ghz = 25
spacing_difference_khz = 20
beat_mhz = 30
linewidth_signal_khz = 50
linewidth_lo_khz = 50
[channels]
line_indices = 0,12
symbols_pow2 = 15
[noise]
snr_db = 18
[frontend]
enabled = false
[dsp]
mode = master_slave
master_line = 0
cma_preconv_pow2 = 13
metrics_skip_symbols = 1024
[run]
seed = 2
)";
    // compensated with the true value: healthy
    const RunRecord ok = run_scenario(Scenario::from_ini(
        IniDoc::parse(base + std::string("[dsp]\nspacing_compensation = known\n"))));
    CHECK_FALSE(ok.rows[1].tracking_failure);
    CHECK(ok.rows[1].metrics.gmi_bits_per_4d > 9.0);

    // uncompensated: the slave residual of 240 kHz defeats the tap tracker
    const RunRecord bad = run_scenario(Scenario::from_ini(
        IniDoc::parse(base + std::string("[dsp]\nspacing_compensation = none\n"))));
    CHECK(bad.rows[1].tracking_failure);
    CHECK(bad.dsp_failure);
}
