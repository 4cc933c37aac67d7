#include "comblink/runner.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <thread>

#include "comblink/carrier_recovery.hpp"
#include "comblink/comb.hpp"
#include "comblink/fiber.hpp"
#include "comblink/fft.hpp"
#include "comblink/freq_offset.hpp"
#include "comblink/frontend.hpp"
#include "comblink/matched_filter.hpp"
#include "comblink/nl_proxy.hpp"
#include "comblink/orthogonalize.hpp"
#include "comblink/rrc.hpp"
#include "comblink/waveform_io.hpp"

namespace comblink {

namespace {

// Circular RRC shaping: symbol m centered at sample m*sps, frame length
// exactly n_symbols*sps so the whole chain keeps rational FFT lengths. The
// pulse wraps around the frame edges, matching the cyclic treatment of the
// frequency-domain channel operators.
std::vector<cplx> shape_cyclic(std::span<const cplx> symbols, double rolloff, int sps,
                               int span) {
    const std::vector<double> h = rrc_taps(rolloff, sps, span);
    const int nh = static_cast<int>(h.size());
    const int c = (nh - 1) / 2;
    const std::size_t n = symbols.size() * static_cast<std::size_t>(sps);
    std::vector<cplx> out(n, cplx(0.0, 0.0));
    for (std::size_t m = 0; m < symbols.size(); ++m) {
        const cplx s = symbols[m];
        const long long base = static_cast<long long>(m) * sps - c;
        for (int i = 0; i < nh; ++i) {
            long long idx = base + i;
            idx %= static_cast<long long>(n);
            if (idx < 0) idx += static_cast<long long>(n);
            out[static_cast<std::size_t>(idx)] += s * h[i];
        }
    }
    return out;
}

struct PreparedChannel {
    int line_index = 0;
    Frame two_sps;                       // equalizer input
    std::vector<std::uint8_t> bits_x, bits_y;
    std::vector<cplx> sym_x, sym_y;      // transmitted symbols
    std::vector<double> true_phase_sym;  // channel phase at symbol instants
};

struct Prepared {
    std::vector<PreparedChannel> channels;
    double lag0_phase_corr = 0.0;
};

// Fractional residual timing from cross-correlating against the known
// transmitted symbols at 2 sps (raised-cosine reference).
double estimate_timing_offset(const std::vector<cplx>& rx,
                              const std::vector<cplx>& ref, int max_lag) {
    const std::size_t n = std::min<std::size_t>({rx.size(), ref.size(), 16384});
    double best = -1.0;
    int best_lag = 0;
    std::vector<double> mag(2 * max_lag + 1);
    for (int lag = -max_lag; lag <= max_lag; ++lag) {
        cplx acc(0.0, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            const long long j = static_cast<long long>(i) + lag;
            if (j < 0 || j >= static_cast<long long>(rx.size())) continue;
            acc += rx[static_cast<std::size_t>(j)] * std::conj(ref[i]);
        }
        const double m = std::abs(acc);
        mag[lag + max_lag] = m;
        if (m > best) {
            best = m;
            best_lag = lag;
        }
    }
    double frac = 0.0;
    if (best_lag > -max_lag && best_lag < max_lag) {
        const double a = mag[best_lag + max_lag - 1];
        const double b = mag[best_lag + max_lag];
        const double c = mag[best_lag + max_lag + 1];
        const double den = a - 2.0 * b + c;
        if (den < 0.0) frac = 0.5 * (a - c) / den;
        if (!(frac > -0.5 && frac < 0.5)) frac = 0.0;
    }
    return static_cast<double>(best_lag) + frac;
}

Prepared build_link(const Scenario& sc, RngStream phys) {
    const double baud = sc.baud_hz();
    const double fs_tx = sc.tx_rate_hz();
    const std::size_t n_sym = sc.n_symbols();
    const std::size_t n_samp = n_sym * static_cast<std::size_t>(sc.tx_sps);
    const double dt = 1.0 / fs_tx;
    const Constellation c = make_qam(sc.modulation_order);
    const int m = c.bits_per_symbol();

    // Comb specs and shared realizations.
    CombSpec sig;
    sig.nu0_offset_hz = sc.beat_mhz * 1e6;
    sig.f_spacing_hz = sc.spacing_ghz * 1e9;
    sig.linewidth0_hz = sc.linewidth_signal_khz * 1e3;
    sig.jitter_linewidth_hz = sc.jitter_linewidth_signal_hz;
    sig.n_lines = sc.n_lines;
    CombSpec lo = sig;
    lo.nu0_offset_hz = 0.0;
    lo.f_spacing_hz = sig.f_spacing_hz - sc.spacing_difference_khz * 1e3;
    lo.linewidth0_hz = sc.linewidth_lo_khz * 1e3;
    lo.jitter_linewidth_hz = sc.jitter_linewidth_lo_hz;

    CombRealization sig_real = realize_comb(sig, n_samp, dt, phys.substream("comb.sig"));
    CombRealization lo_real = realize_comb(lo, n_samp, dt, phys.substream("comb.lo"));
    if (sc.lo_delay_ps != 0.0)
        lo_real = delay_realization(lo_real, sc.lo_delay_ps * 1e-12);

    FiberSpec fiber;
    fiber.length_km = sc.fiber_length_km;
    fiber.dispersion_d_ps_nm_km = sc.dispersion_ps_nm_km;
    fiber.ref_wavelength_nm = sc.ref_wavelength_nm;

    // Per-channel transmit + comb mixing.
    std::vector<Frame> frames;
    std::vector<PreparedChannel> chans(sc.line_indices.size());
    for (std::size_t ci = 0; ci < sc.line_indices.size(); ++ci) {
        PreparedChannel& ch = chans[ci];
        ch.line_index = sc.line_indices[ci];
        RngStream bits_rng = phys.substream("tx.bits", ci);
        ch.bits_x.resize(n_sym * m);
        ch.bits_y.resize(n_sym * m);
        for (auto& b : ch.bits_x) b = static_cast<std::uint8_t>(bits_rng.next_u32() & 1u);
        for (auto& b : ch.bits_y) b = static_cast<std::uint8_t>(bits_rng.next_u32() & 1u);
        ch.sym_x = map_qam(ch.bits_x, c);
        ch.sym_y = map_qam(ch.bits_y, c);

        Frame tx;
        tx.sample_rate = fs_tx;
        tx.t0 = 0.0;
        tx.x = shape_cyclic(ch.sym_x, sc.rolloff, sc.tx_sps, sc.rrc_span_symbols);
        tx.y = shape_cyclic(ch.sym_y, sc.rolloff, sc.tx_sps, sc.rrc_span_symbols);

        DetectedChannel det =
            synthesize_channel(sig, lo, ch.line_index, sig_real, lo_real, tx);
        ch.true_phase_sym.resize(n_sym);
        for (std::size_t k = 0; k < n_sym; ++k)
            ch.true_phase_sym[k] =
                det.true_phase.values[k * static_cast<std::size_t>(sc.tx_sps)];
        frames.push_back(std::move(det.frame));
    }

    // Fiber dispersion.
    if (sc.fiber_length_km > 0.0)
        for (Frame& f : frames) f = apply_cd(f, fiber, +1);

    // Nonlinear phase-noise proxy.
    std::vector<PhaseTrace> nl_traces;
    if (sc.nl_enabled) {
        NlProxySpec nl;
        nl.base_variance_rate = sc.nl_base_variance_rate_rad2_s;
        nl.power_exponent = sc.nl_power_exponent;
        nl.correlation_time_s = sc.nl_correlation_time_ns * 1e-9;
        nl.inter_channel_corr = sc.nl_inter_channel_corr;
        nl.decorrelation_delay_s = sc.nl_decorrelation_delay_ps * 1e-12;
        nl.ref_power_dbm = sc.nl_ref_power_dbm;
        NlProxyResult res =
            nl_phase_proxy(frames, sc.launch_power_dbm, nl, phys.substream("nl"));
        frames = std::move(res.frames);
        nl_traces = std::move(res.traces);
        for (std::size_t ci = 0; ci < chans.size(); ++ci)
            for (std::size_t k = 0; k < n_sym; ++k)
                chans[ci].true_phase_sym[k] +=
                    nl_traces[ci].values[k * static_cast<std::size_t>(sc.tx_sps)];
    }

    // Ground-truth phase correlation between the first two channels.
    Prepared prep;
    if (chans.size() >= 2) {
        PhaseTrace a, b;
        a.sample_rate = b.sample_rate = baud;
        a.values = chans[0].true_phase_sym;
        b.values = chans[1].true_phase_sym;
        try {
            prep.lag0_phase_corr = phase_crosscorr(a, b, 0).lag0_coefficient;
        } catch (const dsp_error&) {
            prep.lag0_phase_corr = 0.0;
        }
    }

    // Receiver front end, per-channel SNR loading and matched filtering.
    const double snr_eff =
        sc.snr_scales_with_power
            ? sc.snr_db + (sc.launch_power_dbm - sc.snr_ref_power_dbm)
            : sc.snr_db;
    for (std::size_t ci = 0; ci < chans.size(); ++ci) {
        Frame f = std::move(frames[ci]);
        if (sc.frontend_enabled) {
            const double skew =
                sc.skew_ps.empty() ? 0.0 : sc.skew_ps[ci] * 1e-12;
            f = rx_frontend(f, sc.adc_rate_gsa * 1e9, sc.bandwidth_ghz * 1e9, skew);
            f = gram_schmidt(f);
        }
        f = matched_filter_downsample(f, baud, sc.rolloff, 2);
        if (sc.fiber_length_km > 0.0) f = apply_cd(f, fiber, -1);
        f = add_awgn(f, snr_eff, phys.substream("awgn", ci));

        // Residual timing (injected skew) from the known symbols.
        if (sc.frontend_enabled && !sc.skew_ps.empty()) {
            std::vector<cplx> ref = shape_cyclic(
                std::span<const cplx>(chans[ci].sym_x.data(), 4096), sc.rolloff, 2,
                sc.rrc_span_symbols);
            const double off = estimate_timing_offset(f.x, ref, 8);
            if (off != 0.0) f = fractional_delay(f, -off / f.sample_rate);
        }
        chans[ci].two_sps = std::move(f);
    }
    prep.channels = std::move(chans);
    return prep;
}

struct AlignedStream {
    std::vector<cplx> symbols;
    const std::vector<std::uint8_t>* bits;
    const std::vector<cplx>* tx;
    PhaseTrace phase;
    std::size_t first_symbol;
    double applied_ramp_hz;
};

// Resolve the pi/2 ambiguity and the output-to-tributary pairing for one
// channel's two streams.
std::pair<AlignedStream, AlignedStream> align_channel(const RecoveredStream& sx,
                                                      const RecoveredStream& sy,
                                                      const PreparedChannel& ch) {
    auto try_align = [&](const RecoveredStream& s, const std::vector<cplx>& ref,
                         bool& ok) -> RecoveredStream {
        ok = true;
        try {
            const std::size_t n = std::min<std::size_t>(4096, s.symbols.size());
            return resolve_ambiguity(
                s, std::span<const cplx>(ref.data() + s.first_symbol, n));
        } catch (const dsp_error&) {
            ok = false;
            return s;
        }
    };

    bool xx = false, yy = false, xy = false, yx = false;
    RecoveredStream a_xx = try_align(sx, ch.sym_x, xx);
    RecoveredStream a_yy = try_align(sy, ch.sym_y, yy);
    RecoveredStream a_xy = try_align(sx, ch.sym_y, xy);
    RecoveredStream a_yx = try_align(sy, ch.sym_x, yx);

    const bool straight = xx && yy;
    const bool swapped = xy && yx;
    bool use_straight = straight;
    if (straight && swapped) {
        use_straight = true;  // both valid is pathological; prefer straight
    } else if (!straight && swapped) {
        use_straight = false;
    } else if (!straight && !swapped) {
        throw dsp_error("align_channel: ambiguity resolution failed on both pairings");
    }

    auto pack = [&](RecoveredStream&& s, const std::vector<std::uint8_t>& bits,
                    const std::vector<cplx>& tx) {
        AlignedStream o;
        o.symbols = std::move(s.symbols);
        o.bits = &bits;
        o.tx = &tx;
        o.phase = std::move(s.phase_estimate);
        o.first_symbol = s.first_symbol;
        o.applied_ramp_hz = s.applied_ramp_hz;
        return o;
    };
    if (use_straight)
        return {pack(std::move(a_xx), ch.bits_x, ch.sym_x),
                pack(std::move(a_yy), ch.bits_y, ch.sym_y)};
    return {pack(std::move(a_xy), ch.bits_y, ch.sym_y),
            pack(std::move(a_yx), ch.bits_x, ch.sym_x)};
}

}  // namespace

RunRecord run_scenario(const Scenario& sc) {
    sc.validate();
    const auto t_start = std::chrono::steady_clock::now();
    RunRecord rec;
    rec.scenario_hash = sc.hash();
    rec.seed = sc.seed;
    rec.mode = sc.mode;

    RngStream phys(sc.seed, sc.physical_label());
    Prepared prep = build_link(sc, phys);
    rec.lag0_phase_corr = prep.lag0_phase_corr;

    const double baud = sc.baud_hz();
    const Constellation c = make_qam(sc.modulation_order);

    std::vector<ChannelInput> inputs;
    for (const PreparedChannel& ch : prep.channels) {
        ChannelInput in;
        in.two_sps = &ch.two_sps;
        in.line_index = ch.line_index;
        in.ref_x = ch.sym_x;
        in.ref_y = ch.sym_y;
        inputs.push_back(in);
    }

    // Spacing difference: exact, estimated from two independently recovered
    // channels, or ignored.
    const double dfs_true = sc.spacing_difference_khz * 1e3;
    std::optional<double> dfs;
    if (sc.mode != "independent") {
        if (sc.spacing_compensation == "known") {
            dfs = dfs_true;
        } else if (sc.spacing_compensation == "estimated" && inputs.size() >= 2) {
            // pick the two most separated channels
            std::size_t ia = 0, ib = 0;
            for (std::size_t i = 0; i < inputs.size(); ++i) {
                if (inputs[i].line_index < inputs[ia].line_index) ia = i;
                if (inputs[i].line_index > inputs[ib].line_index) ib = i;
            }
            if (inputs[ia].line_index != inputs[ib].line_index) {
                RecoveryOutput est = recover_independent({inputs[ia], inputs[ib]}, baud,
                                                         c, sc.dsp);
                const double foe_a =
                    0.5 * (est.streams[0].freq_offset_hz + est.streams[1].freq_offset_hz);
                const double foe_b =
                    0.5 * (est.streams[2].freq_offset_hz + est.streams[3].freq_offset_hz);
                dfs = estimate_spacing_difference(foe_a, foe_b, inputs[ia].line_index,
                                                  inputs[ib].line_index);
                rec.spacing_difference_est_hz = *dfs;
            }
        }
    }

    RecoveryOutput out;
    std::size_t master_pos = 0;
    const int master_line =
        sc.master_auto ? inputs.back().line_index : sc.master_line;
    if (sc.mode == "independent") {
        out = recover_independent(inputs, baud, c, sc.dsp);
    } else if (sc.mode == "master_slave") {
        for (std::size_t i = 0; i < inputs.size(); ++i)
            if (inputs[i].line_index == master_line) master_pos = i;
        out = recover_master_slave(inputs, master_pos, baud, c, sc.dsp, dfs);
    } else {
        out = recover_joint(inputs, baud, c, sc.dsp, dfs);
    }

    // Metrics per channel.
    for (std::size_t ci = 0; ci < prep.channels.size(); ++ci) {
        const PreparedChannel& ch = prep.channels[ci];
        ChannelRow row;
        row.mode = sc.mode;
        row.launch_power_dbm = sc.launch_power_dbm;
        row.channel_line = ch.line_index;
        row.master_separation =
            sc.mode == "joint"
                ? static_cast<int>(prep.channels.size())
                : (sc.mode == "master_slave" ? ch.line_index - master_line : 0);
        row.bps_window = sc.dsp.bps_window;
        row.foe_hz = out.foe_per_channel[ci];
        row.spacing_difference_used_hz = out.spacing_difference_used_hz;

        const RecoveredStream& sx = out.streams[2 * ci];
        const RecoveredStream& sy = out.streams[2 * ci + 1];
        row.foe_hz = 0.5 * (sx.freq_offset_hz + sy.freq_offset_hz);
        row.bps_distance_evals = sx.bps_distance_evals + sy.bps_distance_evals;
        row.eq_tap_updates = sx.tap_updates;
        row.converged = sx.converged && sy.converged;
        row.tracking_failure = sx.tracking_failure || sy.tracking_failure;

        try {
            auto [ax, ay] = align_channel(sx, sy, ch);
            const std::size_t skip = static_cast<std::size_t>(sc.metrics_skip_symbols);
            if (ax.symbols.size() <= skip + 1024)
                throw dsp_error("metrics: too few symbols after skip");
            const std::size_t n_use = ax.symbols.size() - skip;
            const int m = c.bits_per_symbol();

            auto slice_bits = [&](const AlignedStream& a) {
                const std::size_t first_bit = (a.first_symbol + skip) * m;
                return std::span<const std::uint8_t>(a.bits->data() + first_bit,
                                                     n_use * m);
            };
            auto slice_tx = [&](const AlignedStream& a) {
                return std::span<const cplx>(a.tx->data() + a.first_symbol + skip, n_use);
            };
            const std::span<const cplx> rx_x(ax.symbols.data() + skip, n_use);
            const std::span<const cplx> rx_y(ay.symbols.data() + skip, n_use);

            row.metrics.gmi_bits_per_4d =
                compute_gmi(rx_x, rx_y, slice_bits(ax), slice_bits(ay), c);
            row.metrics.ngmi = row.metrics.gmi_bits_per_4d / (2.0 * m);
            MetricsReport mx = compute_evm_snr_ber(rx_x, slice_tx(ax), slice_bits(ax), c);
            MetricsReport my = compute_evm_snr_ber(rx_y, slice_tx(ay), slice_bits(ay), c);
            row.metrics.ber = 0.5 * (mx.ber + my.ber);
            row.metrics.evm_db = 0.5 * (mx.evm_db + my.evm_db);
            row.metrics.snr_db = 0.5 * (mx.snr_db + my.snr_db);

            // Phase-estimate quality against the injected ground truth.
            double mse = 0.0;
            for (const AlignedStream* a : {&ax, &ay}) {
                const std::size_t n_ph = std::min(a->phase.size() - skip, n_use);
                std::vector<double> est(n_ph), truth(n_ph);
                for (std::size_t k = 0; k < n_ph; ++k) {
                    const std::size_t sym = a->first_symbol + skip + k;
                    est[k] = a->phase.values[skip + k] +
                             2.0 * M_PI * a->applied_ramp_hz * static_cast<double>(sym) /
                                 baud;
                    truth[k] = ch.true_phase_sym[sym];
                }
                mse += phase_mse(est, truth);
            }
            row.metrics.phase_mse_rad2 = 0.5 * mse;
        } catch (const dsp_error&) {
            row.converged = false;
            row.tracking_failure = true;
            row.metrics.gmi_bits_per_4d = 0.0;
            row.metrics.ber = 0.5;
            rec.dsp_failure = true;
        }
        if (!row.converged || row.tracking_failure) rec.dsp_failure = true;
        rec.rows.push_back(std::move(row));
    }

    if (sc.dump_waveforms) {
        std::filesystem::create_directories(sc.out_dir);
        for (std::size_t ci = 0; ci < prep.channels.size(); ++ci)
            export_waveform(prep.channels[ci].two_sps,
                            sc.out_dir + "/channel" +
                                std::to_string(prep.channels[ci].line_index) + "_2sps.cwf");
    }

    rec.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return rec;
}

namespace {

std::string g(double v) {
    char buf[40];
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::snprintf(buf, sizeof(buf), "%.9g", v);
    return buf;
}

}  // namespace

std::string csv_header() {
    return "mode,master_separation,launch_power_dbm,channel,gmi_bits_per_4d,snr_db,ber,"
           "phase_mse_rad2,bps_distance_evals,eq_tap_updates,bps_window,ngmi,evm_db,"
           "foe_hz,spacing_difference_used_hz,converged,tracking_failure\n";
}

void append_csv_rows(std::string& csv, const RunRecord& rec) {
    for (const ChannelRow& r : rec.rows) {
        csv += r.mode;
        csv += ',' + std::to_string(r.master_separation);
        csv += ',' + g(r.launch_power_dbm);
        csv += ',' + std::to_string(r.channel_line);
        csv += ',' + g(r.metrics.gmi_bits_per_4d);
        csv += ',' + g(r.metrics.snr_db);
        csv += ',' + g(r.metrics.ber);
        csv += ',' + g(r.metrics.phase_mse_rad2);
        csv += ',' + std::to_string(r.bps_distance_evals);
        csv += ',' + std::to_string(r.eq_tap_updates);
        csv += ',' + std::to_string(r.bps_window);
        csv += ',' + g(r.metrics.ngmi);
        csv += ',' + g(r.metrics.evm_db);
        csv += ',' + g(r.foe_hz);
        csv += ',' + g(r.spacing_difference_used_hz);
        csv += ',' + std::to_string(r.converged ? 1 : 0);
        csv += ',' + std::to_string(r.tracking_failure ? 1 : 0);
        csv += '\n';
    }
}

void write_text_record(const std::string& path, const Scenario& sc,
                       const RunRecord& rec) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw parse_error("cannot open '" + path + "' for writing");
    char hash[20];
    std::snprintf(hash, sizeof(hash), "%016llx",
                  static_cast<unsigned long long>(rec.scenario_hash));
    f << "scenario_hash = " << hash << "\n";
    f << "seed = " << rec.seed << "\n";
    f << "mode = " << rec.mode << "\n";
    f << "lag0_phase_corr = " << g(rec.lag0_phase_corr) << "\n";
    f << "spacing_difference_est_hz = " << g(rec.spacing_difference_est_hz) << "\n";
    f << "dsp_failure = " << (rec.dsp_failure ? 1 : 0) << "\n";
    f << "wall_seconds = " << g(rec.wall_seconds) << "\n";
    for (const ChannelRow& r : rec.rows) {
        f << "[channel " << r.channel_line << "]\n";
        f << "  gmi_bits_per_4d = " << g(r.metrics.gmi_bits_per_4d) << "\n";
        f << "  ngmi = " << g(r.metrics.ngmi) << "\n";
        f << "  snr_db = " << g(r.metrics.snr_db) << "\n";
        f << "  evm_db = " << g(r.metrics.evm_db) << "\n";
        f << "  ber = " << g(r.metrics.ber) << "\n";
        f << "  phase_mse_rad2 = " << g(r.metrics.phase_mse_rad2) << "\n";
        f << "  bps_distance_evals = " << r.bps_distance_evals << "\n";
        f << "  eq_tap_updates = " << r.eq_tap_updates << "\n";
        f << "  foe_hz = " << g(r.foe_hz) << "\n";
        f << "  converged = " << (r.converged ? 1 : 0) << "\n";
        f << "  tracking_failure = " << (r.tracking_failure ? 1 : 0) << "\n";
    }
    f << "config_canonical_begin\n" << sc.canonical() << "config_canonical_end\n";
}

SweepResult run_sweep(const IniDoc& base, const std::vector<SweepAxis>& axes,
                      int threads) {
    // Materialize the cartesian product of axis values.
    std::vector<std::map<std::string, std::string>> points(1);
    for (const SweepAxis& ax : axes) {
        if (ax.values.empty()) throw config_error("sweep axis with no values");
        std::vector<std::map<std::string, std::string>> next;
        for (const auto& p : points)
            for (const auto& v : ax.values) {
                auto q = p;
                q[ax.param] = v;
                next.push_back(std::move(q));
            }
        points = std::move(next);
    }

    SweepResult res;
    res.records.resize(points.size());
    res.errors.assign(points.size(), "");
    std::atomic<std::size_t> cursor{0};
    std::atomic<bool> any_dsp{false}, any_invalid{false};

    auto worker = [&] {
        for (;;) {
            const std::size_t i = cursor.fetch_add(1);
            if (i >= points.size()) return;
            try {
                std::string text;
                for (const auto& [k, v] : base.entries()) {
                    const auto dot = k.find('.');
                    text += "[" + k.substr(0, dot) + "]\n" + k.substr(dot + 1) + " = " +
                            v + "\n";
                }
                for (const auto& [k, v] : points[i]) {
                    const auto dot = k.find('.');
                    if (dot == std::string::npos)
                        throw config_error("sweep param must be section.key: " + k);
                    text += "[" + k.substr(0, dot) + "]\n" + k.substr(dot + 1) + " = " +
                            v + "\n";
                }
                Scenario sc = Scenario::from_ini(IniDoc::parse(text));
                res.records[i] = run_scenario(sc);
                if (res.records[i].dsp_failure) any_dsp = true;
            } catch (const config_error& e) {
                any_invalid = true;
                res.errors[i] = e.what();
            } catch (const std::exception& e) {
                any_dsp = true;
                res.errors[i] = e.what();
            }
        }
    };

    const int n_threads = std::max(1, threads);
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();

    res.any_dsp_failure = any_dsp;
    res.any_validation_failure = any_invalid;
    res.csv = csv_header();
    for (const RunRecord& r : res.records) append_csv_rows(res.csv, r);
    return res;
}

}  // namespace comblink
