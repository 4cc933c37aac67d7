#include "comblink/carrier_recovery.hpp"

#include <cmath>
#include <memory>

#include "comblink/bps.hpp"
#include "comblink/freq_offset.hpp"

namespace comblink {

namespace {

double safe_foe(std::span<const cplx> symbols, double baud) {
    try {
        return estimate_foe_4thpower(symbols, baud);
    } catch (const dsp_error&) {
        return 0.0;
    }
}

void finalize_stream(RecoveredStream& r, double baud, std::size_t first,
                     std::uint64_t evals, const DdEqualizer& eq) {
    r.phase_estimate.sample_rate = baud;
    r.phase_estimate.t0 = static_cast<double>(first) / baud;
    r.first_symbol = first;
    r.bps_distance_evals = evals;
    r.tap_updates = eq.tap_updates();
    r.converged = eq.converged();
    r.bad_blocks = eq.bad_blocks();
    r.freq_offset_hz =
        r.applied_ramp_hz +
        linear_slope(r.phase_estimate.values) * baud / (2.0 * M_PI);
}

void flag_tracking(RecoveredStream& r, std::size_t block_size, double drift_rad) {


    const std::size_t blocks =
        std::max<std::size_t>(1, r.symbols.size() / block_size);
    r.tracking_failure = !r.converged ||
                         r.bad_blocks > static_cast<int>(blocks / 10) ||
                         std::abs(drift_rad) > 0.5;
}

}  // namespace

double linear_slope(std::span<const double> v) {
    const std::size_t n = v.size();
    if (n < 2) return 0.0;
    // slope = cov(i, v) / var(i)
    const double nm1 = static_cast<double>(n - 1);
    const double mean_i = nm1 / 2.0;
    double mean_v = 0.0;
    for (double x : v) mean_v += x;
    mean_v /= static_cast<double>(n);
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double di = static_cast<double>(i) - mean_i;
        num += di * (v[i] - mean_v);
        den += di * di;
    }
    return num / den;
}

RecoveryOutput recover_independent(const std::vector<ChannelInput>& channels,
                                   double baud, const Constellation& c,
                                   const DspConfig& cfg) {
    RecoveryOutput out;
    for (const ChannelInput& ch : channels) {
        DdEqualizer eq(*ch.two_sps, baud, c, cfg);
        eq.run_cma();
        const double foe = safe_foe(eq.preconv_output(), baud);
        out.foe_per_channel.push_back(foe);
        eq.set_stream_ramp(0, foe);
        eq.set_stream_ramp(1, foe);

        BpsEngine ex(c, cfg.bps_window, cfg.bps_test_angles, 1);
        BpsEngine ey(c, cfg.bps_window, cfg.bps_test_angles, 1);
        const std::size_t begin = eq.dd_start();
        const std::size_t end = eq.dd_end();
        std::vector<cplx> ux(cfg.block_size), uy(cfg.block_size);
        std::vector<double> thx(cfg.block_size), thy(cfg.block_size);
        for (std::size_t k = begin; k < end;) {
            const std::size_t len = std::min<std::size_t>(cfg.block_size, end - k);
            eq.forward_block(k, len, ux.data(), uy.data());
            for (std::size_t j = 0; j < len; ++j) {
                thx[j] = ex.push(std::span<const cplx>(&ux[j], 1));
                thy[j] = ey.push(std::span<const cplx>(&uy[j], 1));
            }
            eq.commit_block(k, len, thx.data(), thy.data());
            k += len;
        }
        for (int s = 0; s < 2; ++s) {
            RecoveredStream r;
            r.symbols = eq.out_symbols(s);
            r.phase_estimate.values = eq.out_phase(s);
            r.applied_ramp_hz = foe;
            finalize_stream(r, baud, begin, (s == 0 ? ex : ey).distance_evals(), eq);
            flag_tracking(r, cfg.block_size, eq.constellation_drift_rad(s));
            out.streams.push_back(std::move(r));
        }
    }
    return out;
}

RecoveryOutput recover_master_slave(const std::vector<ChannelInput>& channels,
                                    std::size_t master_pos, double baud,
                                    const Constellation& c, const DspConfig& cfg,
                                    std::optional<double> spacing_difference_hz) {
    if (master_pos >= channels.size())
        throw config_error("recover_master_slave: master index out of range");

    // Master first: independent processing of the single master channel.
    RecoveryOutput master_out =
        recover_independent({channels[master_pos]}, baud, c, cfg);
    const RecoveredStream& mx = master_out.streams[0];
    const RecoveredStream& my = master_out.streams[1];
    const double master_foe = master_out.foe_per_channel[0];
    const int n_master = channels[master_pos].line_index;
    const double dfs = spacing_difference_hz.value_or(0.0);

    RecoveryOutput out;
    out.spacing_difference_used_hz = dfs;
    for (std::size_t ci = 0; ci < channels.size(); ++ci) {
        if (ci == master_pos) {
            out.foe_per_channel.push_back(master_foe);
            out.streams.push_back(mx);
            out.streams.push_back(my);
            continue;
        }
        const ChannelInput& ch = channels[ci];
        if (ch.ref_x.empty() || ch.ref_y.empty())
            throw config_error(
                "recover_master_slave: slave startup needs reference symbols");

        DdEqualizer eq(*ch.two_sps, baud, c, cfg);
        eq.run_cma();
        const double ramp =
            master_foe + (ch.line_index - n_master) * dfs;
        out.foe_per_channel.push_back(ramp);
        eq.set_stream_ramp(0, ramp);
        eq.set_stream_ramp(1, ramp);

        const std::size_t begin = eq.dd_start();
        const std::size_t end = std::min(eq.dd_end(), mx.first_symbol + mx.symbols.size());
        if (mx.first_symbol != begin)
            throw shape_error("recover_master_slave: master/slave block grids differ");

        // The master's per-symbol BPS phase, reused without any slave-side
        // phase search; an optional time offset counteracts walk-off.
        const std::vector<double>& thm_x = mx.phase_estimate.values;
        const std::vector<double>& thm_y = my.phase_estimate.values;
        auto shifted = [&](const std::vector<double>& v, std::size_t k0,
                           std::size_t len, double* out) {
            const double d = cfg.slave_phase_delay_symbols;
            for (std::size_t j = 0; j < len; ++j) {
                double pos = static_cast<double>(k0 - begin + j) - d;
                if (pos < 0.0) pos = 0.0;
                if (pos > static_cast<double>(v.size() - 1))
                    pos = static_cast<double>(v.size() - 1);
                const std::size_t i0 = static_cast<std::size_t>(pos);
                const double frac = pos - static_cast<double>(i0);
                out[j] = i0 + 1 < v.size()
                             ? v[i0] * (1.0 - frac) + v[i0 + 1] * frac
                             : v[i0];
            }
        };

        std::vector<cplx> ux(cfg.block_size), uy(cfg.block_size);
        std::vector<double> thx(cfg.block_size), thy(cfg.block_size);
        bool first_block = true;
        for (std::size_t k = begin; k < end;) {
            const std::size_t len = std::min<std::size_t>(cfg.block_size, end - k);
            shifted(thm_x, k, len, thx.data());
            shifted(thm_y, k, len, thy.data());
            const double* tx = thx.data();
            const double* ty = thy.data();
            if (first_block) {
                const std::size_t n_acq = std::min<std::size_t>(len, cfg.startup_symbols);
                eq.acquire_block(k, n_acq, tx, ty, ch.ref_x.subspan(k, n_acq),
                                 ch.ref_y.subspan(k, n_acq), ux.data(), uy.data());
                eq.commit_block(k, n_acq, tx, ty, ch.ref_x.data() + k,
                                ch.ref_y.data() + k);
                first_block = false;
                k += n_acq;
                continue;
            }
            eq.forward_block(k, len, ux.data(), uy.data());
            eq.commit_block(k, len, tx, ty);
            k += len;
        }

        for (int s = 0; s < 2; ++s) {
            RecoveredStream r;
            r.symbols = eq.out_symbols(s);
            r.phase_estimate.values = eq.out_phase(s);
            r.applied_ramp_hz = ramp;
            finalize_stream(r, baud, begin, 0, eq);
            flag_tracking(r, cfg.block_size, eq.constellation_drift_rad(s));
            out.streams.push_back(std::move(r));
        }
    }
    return out;
}

RecoveryOutput recover_joint(const std::vector<ChannelInput>& channels, double baud,
                             const Constellation& c, const DspConfig& cfg,
                             std::optional<double> spacing_difference_hz) {
    if (channels.empty()) throw config_error("recover_joint: no channels");
    const double dfs = spacing_difference_hz.value_or(0.0);

    std::vector<std::unique_ptr<DdEqualizer>> eqs;
    for (const ChannelInput& ch : channels) {
        auto eq = std::make_unique<DdEqualizer>(*ch.two_sps, baud, c, cfg);
        eq->run_cma();
        eqs.push_back(std::move(eq));
    }
    // Frequency offsets master-slave fashion: estimate once on the first
    // channel, scale by line separation for the rest.
    const double foe0 = safe_foe(eqs[0]->preconv_output(), baud);
    const int n0 = channels[0].line_index;

    RecoveryOutput out;
    out.spacing_difference_used_hz = dfs;
    std::size_t begin = eqs[0]->dd_start();
    std::size_t end = eqs[0]->dd_end();
    for (std::size_t i = 0; i < channels.size(); ++i) {
        const double ramp = foe0 + (channels[i].line_index - n0) * dfs;
        out.foe_per_channel.push_back(ramp);
        eqs[i]->set_stream_ramp(0, ramp);
        eqs[i]->set_stream_ramp(1, ramp);
        eqs[i]->enable_one_tap(cfg.one_tap_step);
        if (eqs[i]->dd_start() != begin)
            throw shape_error("recover_joint: channel block grids differ");
        end = std::min(end, eqs[i]->dd_end());
        if (channels[i].ref_x.empty() || channels[i].ref_y.empty())
            throw config_error("recover_joint: startup needs reference symbols");
    }

    const std::size_t n_streams = 2 * channels.size();
    BpsEngine joint(c, cfg.bps_window, cfg.bps_test_angles, n_streams);

    std::vector<std::vector<cplx>> ux(channels.size()), uy(channels.size());
    for (auto& v : ux) v.resize(cfg.block_size);
    for (auto& v : uy) v.resize(cfg.block_size);
    std::vector<double> th(cfg.block_size);
    std::vector<double> zeros(cfg.block_size, 0.0);
    std::vector<cplx> row(n_streams);

    bool first_block = true;
    for (std::size_t k = begin; k < end;) {
        std::size_t len = std::min<std::size_t>(cfg.block_size, end - k);
        if (first_block) {
            const std::size_t n_acq = std::min<std::size_t>(len, cfg.startup_symbols);
            for (std::size_t i = 0; i < channels.size(); ++i) {
                eqs[i]->acquire_block(k, n_acq, zeros.data(), zeros.data(),
                                      channels[i].ref_x.subspan(k, n_acq),
                                      channels[i].ref_y.subspan(k, n_acq), ux[i].data(),
                                      uy[i].data());
            }
            // Warm the joint window on the corrected startup symbols.
            for (std::size_t j = 0; j < n_acq; ++j) {
                for (std::size_t i = 0; i < channels.size(); ++i) {
                    row[2 * i] = ux[i][j];
                    row[2 * i + 1] = uy[i][j];
                }
                joint.push(row);
            }
            for (std::size_t i = 0; i < channels.size(); ++i)
                eqs[i]->commit_block(k, n_acq, zeros.data(), zeros.data(),
                                     channels[i].ref_x.data() + k,
                                     channels[i].ref_y.data() + k);
            first_block = false;
            k += n_acq;
            continue;
        }
        for (std::size_t i = 0; i < channels.size(); ++i)
            eqs[i]->forward_block(k, len, ux[i].data(), uy[i].data());
        for (std::size_t j = 0; j < len; ++j) {
            for (std::size_t i = 0; i < channels.size(); ++i) {
                row[2 * i] = ux[i][j];
                row[2 * i + 1] = uy[i][j];
            }
            th[j] = joint.push(row);
        }
        for (std::size_t i = 0; i < channels.size(); ++i)
            eqs[i]->commit_block(k, len, th.data(), th.data());
        k += len;
    }

    const std::uint64_t per_stream_evals = joint.distance_evals() / n_streams;
    for (std::size_t i = 0; i < channels.size(); ++i) {
        for (int s = 0; s < 2; ++s) {
            RecoveredStream r;
            r.symbols = eqs[i]->out_symbols(s);
            r.phase_estimate.values = eqs[i]->out_phase(s);
            r.applied_ramp_hz = out.foe_per_channel[i];
            finalize_stream(r, baud, begin, per_stream_evals, *eqs[i]);
            flag_tracking(r, cfg.block_size, eqs[i]->constellation_drift_rad(s));
            out.streams.push_back(std::move(r));
        }
    }
    return out;
}

RecoveredStream resolve_ambiguity(RecoveredStream stream,
                                  std::span<const cplx> reference) {
    if (reference.size() < 64)
        throw config_error("resolve_ambiguity: need >= 64 reference symbols");
    const std::size_t n = std::min<std::size_t>(
        {reference.size(), stream.symbols.size(), 4096});

    double best_q = -1.0;
    bool best_conj = false;
    cplx best_rho(0.0, 0.0);
    for (int conj_flag = 0; conj_flag < 2; ++conj_flag) {
        cplx rho(0.0, 0.0);
        double ps = 0.0, pr = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const cplx s = conj_flag ? std::conj(stream.symbols[i]) : stream.symbols[i];
            rho += std::conj(reference[i]) * s;
            ps += std::norm(s);
            pr += std::norm(reference[i]);
        }
        const double q = std::abs(rho) / std::sqrt(ps * pr);
        if (q > best_q) {
            best_q = q;
            best_conj = conj_flag != 0;
            best_rho = rho;
        }
    }
    if (best_q < 0.5)
        throw dsp_error("resolve_ambiguity: alignment failure (correlation < 0.5)");

    const int k = static_cast<int>(std::lround(-std::arg(best_rho) / (M_PI / 2.0)));
    const cplx rot = std::polar(1.0, k * M_PI / 2.0);
    if (best_conj) {
        for (cplx& s : stream.symbols) s = std::conj(s) * rot;
        for (double& v : stream.phase_estimate.values) v = -v;
    } else if (k != 0) {
        for (cplx& s : stream.symbols) s *= rot;
    }
    for (double& v : stream.phase_estimate.values) v -= k * M_PI / 2.0;
    stream.ambiguity_quarter_turns = k;
    stream.conjugated = best_conj;
    return stream;
}

}  // namespace comblink
