#include "comblink/comb.hpp"

#include <cmath>

namespace comblink {

double CombSpec::line_power(int n) const {
    if (line_powers.empty()) return 1.0;
    const int idx = n + max_line();
    if (idx < 0 || idx >= static_cast<int>(line_powers.size()))
        throw config_error("CombSpec: line index out of range");
    return line_powers[idx];
}

void CombSpec::check() const {
    if (f_spacing_hz <= 0.0) throw config_error("CombSpec: f_spacing must be > 0");
    if (linewidth0_hz < 0.0 || jitter_linewidth_hz < 0.0)
        throw config_error("CombSpec: linewidths must be >= 0");
    if (n_lines < 1 || n_lines % 2 == 0)
        throw config_error("CombSpec: n_lines must be odd and >= 1");
    if (!line_powers.empty() && static_cast<int>(line_powers.size()) != n_lines)
        throw config_error("CombSpec: line_powers size must equal n_lines");
}

CombRealization realize_comb(const CombSpec& spec, std::size_t n_samples, double dt,
                             RngStream rng) {
    spec.check();
    CombRealization r;
    r.phi0 = wiener_phase(spec.linewidth0_hz, n_samples, dt, rng.substream("phi0"));
    r.psi = wiener_phase(spec.jitter_linewidth_hz, n_samples, dt, rng.substream("psi"));
    return r;
}

namespace {

PhaseTrace delay_trace(const PhaseTrace& tr, double delay_s) {
    PhaseTrace out = tr;
    const double shift = delay_s * tr.sample_rate;  // in samples
    const std::size_t n = tr.size();
    for (std::size_t i = 0; i < n; ++i) {
        const double src = static_cast<double>(i) - shift;
        if (src <= 0.0) {
            out.values[i] = tr.values.front();
        } else if (src >= static_cast<double>(n - 1)) {
            out.values[i] = tr.values.back();
        } else {
            const std::size_t j = static_cast<std::size_t>(src);
            const double frac = src - static_cast<double>(j);
            out.values[i] = tr.values[j] * (1.0 - frac) + tr.values[j + 1] * frac;
        }
    }
    return out;
}

}  // namespace

CombRealization delay_realization(const CombRealization& r, double delay_s) {
    if (delay_s == 0.0) return r;
    return {delay_trace(r.phi0, delay_s), delay_trace(r.psi, delay_s)};
}

PhaseTrace comb_line_phase(const CombSpec& comb, int n, const PhaseTrace& phi0,
                           const PhaseTrace& psi) {
    require_same_grid(phi0, psi, "comb_line_phase");
    PhaseTrace out;
    out.sample_rate = phi0.sample_rate;
    out.t0 = phi0.t0;
    out.values.resize(phi0.size());
    const double dt = 1.0 / phi0.sample_rate;
    const double dn = static_cast<double>(n);
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double t = phi0.t0 + static_cast<double>(i) * dt;
        out.values[i] = 2.0 * M_PI * comb.nu0_offset_hz * t + phi0.values[i] +
                        dn * (2.0 * M_PI * comb.f_spacing_hz * t + psi.values[i]);
    }
    return out;
}

PhaseTrace detected_phase(const CombSpec& sig, const CombSpec& lo, int n,
                          const CombRealization& sig_real,
                          const CombRealization& lo_real) {
    require_same_grid(sig_real.phi0, lo_real.phi0, "detected_phase");
    require_same_grid(sig_real.psi, lo_real.psi, "detected_phase");
    require_same_grid(sig_real.phi0, sig_real.psi, "detected_phase");

    PhaseTrace out;
    out.sample_rate = sig_real.phi0.sample_rate;
    out.t0 = sig_real.phi0.t0;
    out.values.resize(sig_real.phi0.size());
    const double dt = 1.0 / out.sample_rate;
    const double d_nu0 = sig.nu0_offset_hz - lo.nu0_offset_hz;
    const double d_f = sig.f_spacing_hz - lo.f_spacing_hz;
    const double dn = static_cast<double>(n);
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double t = out.t0 + static_cast<double>(i) * dt;
        const double common =
            2.0 * M_PI * d_nu0 * t + (sig_real.phi0.values[i] - lo_real.phi0.values[i]);
        const double beat =
            2.0 * M_PI * d_f * t + (sig_real.psi.values[i] - lo_real.psi.values[i]);
        out.values[i] = common + dn * beat;
    }
    return out;
}

PhaseTrace interpolate_phase(const PhaseTrace& phi_n, const PhaseTrace& phi_m, int n,
                             int m, int k) {
    if (n == m) throw config_error("interpolate_phase: line indices must differ");
    require_same_grid(phi_n, phi_m, "interpolate_phase");
    const double w = static_cast<double>(k - n) / static_cast<double>(m - n);
    PhaseTrace out = phi_n;
    for (std::size_t i = 0; i < out.size(); ++i)
        out.values[i] = phi_n.values[i] + w * (phi_m.values[i] - phi_n.values[i]);
    return out;
}

DetectedChannel synthesize_channel(const CombSpec& sig, const CombSpec& lo, int n,
                                   const CombRealization& sig_real,
                                   const CombRealization& lo_real, const Frame& baseband,
                                   const PhaseTrace* extra_phase) {
    baseband.check();
    PhaseTrace phase = detected_phase(sig, lo, n, sig_real, lo_real);
    if (phase.size() != baseband.size())
        throw shape_error("synthesize_channel: frame/phase length mismatch");
    if (phase.sample_rate != baseband.sample_rate)
        throw shape_error("synthesize_channel: frame/phase sample rate mismatch");
    if (extra_phase != nullptr) {
        require_same_grid(phase, *extra_phase, "synthesize_channel");
        for (std::size_t i = 0; i < phase.size(); ++i)
            phase.values[i] += extra_phase->values[i];
    }

    // Pure phase rotation; per-line power belongs to the transmitter model,
    // keeping this operation exactly unitary.
    DetectedChannel ch;
    ch.line_index = n;
    ch.frame = baseband;
    for (std::size_t i = 0; i < phase.size(); ++i) {
        const cplx rot = std::polar(1.0, phase.values[i]);
        ch.frame.x[i] *= rot;
        if (ch.frame.dual_pol()) ch.frame.y[i] *= rot;
    }
    ch.true_phase = std::move(phase);
    return ch;
}

}  // namespace comblink
