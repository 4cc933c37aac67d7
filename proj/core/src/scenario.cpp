#include "comblink/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "comblink/rng.hpp"

namespace comblink {

namespace {

std::vector<int> parse_int_list(const std::string& s) {
    std::vector<int> out;
    std::istringstream in(s);
    std::string tok;
    while (std::getline(in, tok, ',')) {
        if (tok.find_first_not_of(" \t") == std::string::npos) continue;
        out.push_back(std::stoi(tok));
    }
    return out;
}

std::vector<double> parse_double_list(const std::string& s) {
    std::vector<double> out;
    std::istringstream in(s);
    std::string tok;
    while (std::getline(in, tok, ',')) {
        if (tok.find_first_not_of(" \t") == std::string::npos) continue;
        out.push_back(std::stod(tok));
    }
    return out;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

}  // namespace

Scenario Scenario::from_ini(const IniDoc& doc) {
    Scenario sc;
    std::vector<std::string> errors;
    auto guard = [&](const char* key, auto&& fn) {
        try {
            fn();
        } catch (const std::exception& e) {
            errors.push_back(std::string(key) + ": " + e.what());
        }
    };

    guard("combs.spacing_ghz", [&] { sc.spacing_ghz = doc.get_double("combs.spacing_ghz", sc.spacing_ghz); });
    guard("combs.spacing_difference_khz", [&] { sc.spacing_difference_khz = doc.get_double("combs.spacing_difference_khz", sc.spacing_difference_khz); });
    guard("combs.beat_mhz", [&] { sc.beat_mhz = doc.get_double("combs.beat_mhz", sc.beat_mhz); });
    guard("combs.linewidth_signal_khz", [&] { sc.linewidth_signal_khz = doc.get_double("combs.linewidth_signal_khz", sc.linewidth_signal_khz); });
    guard("combs.linewidth_lo_khz", [&] { sc.linewidth_lo_khz = doc.get_double("combs.linewidth_lo_khz", sc.linewidth_lo_khz); });
    guard("combs.jitter_linewidth_signal_hz", [&] { sc.jitter_linewidth_signal_hz = doc.get_double("combs.jitter_linewidth_signal_hz", sc.jitter_linewidth_signal_hz); });
    guard("combs.jitter_linewidth_lo_hz", [&] { sc.jitter_linewidth_lo_hz = doc.get_double("combs.jitter_linewidth_lo_hz", sc.jitter_linewidth_lo_hz); });
    guard("combs.n_lines", [&] { sc.n_lines = static_cast<int>(doc.get_int("combs.n_lines", sc.n_lines)); });
    guard("combs.lo_delay_ps", [&] { sc.lo_delay_ps = doc.get_double("combs.lo_delay_ps", sc.lo_delay_ps); });

    guard("channels.line_indices", [&] {
        if (doc.has("channels.line_indices"))
            sc.line_indices = parse_int_list(doc.get("channels.line_indices", ""));
    });
    guard("channels.baud_gbaud", [&] { sc.baud_gbaud = doc.get_double("channels.baud_gbaud", sc.baud_gbaud); });
    guard("channels.rolloff", [&] { sc.rolloff = doc.get_double("channels.rolloff", sc.rolloff); });
    guard("channels.tx_sps", [&] { sc.tx_sps = static_cast<int>(doc.get_int("channels.tx_sps", sc.tx_sps)); });
    guard("channels.rrc_span_symbols", [&] { sc.rrc_span_symbols = static_cast<int>(doc.get_int("channels.rrc_span_symbols", sc.rrc_span_symbols)); });
    guard("channels.symbols_pow2", [&] { sc.symbols_pow2 = static_cast<int>(doc.get_int("channels.symbols_pow2", sc.symbols_pow2)); });
    guard("channels.modulation_order", [&] { sc.modulation_order = static_cast<int>(doc.get_int("channels.modulation_order", sc.modulation_order)); });

    guard("fiber.length_km", [&] { sc.fiber_length_km = doc.get_double("fiber.length_km", sc.fiber_length_km); });
    guard("fiber.dispersion_ps_nm_km", [&] { sc.dispersion_ps_nm_km = doc.get_double("fiber.dispersion_ps_nm_km", sc.dispersion_ps_nm_km); });
    guard("fiber.ref_wavelength_nm", [&] { sc.ref_wavelength_nm = doc.get_double("fiber.ref_wavelength_nm", sc.ref_wavelength_nm); });

    guard("noise.snr_db", [&] { sc.snr_db = doc.get_double("noise.snr_db", sc.snr_db); });
    guard("noise.snr_scales_with_power", [&] { sc.snr_scales_with_power = doc.get_bool("noise.snr_scales_with_power", sc.snr_scales_with_power); });
    guard("noise.snr_ref_power_dbm", [&] { sc.snr_ref_power_dbm = doc.get_double("noise.snr_ref_power_dbm", sc.snr_ref_power_dbm); });

    guard("nl_proxy.enabled", [&] { sc.nl_enabled = doc.get_bool("nl_proxy.enabled", sc.nl_enabled); });
    guard("nl_proxy.base_variance_rate_rad2_s", [&] { sc.nl_base_variance_rate_rad2_s = doc.get_double("nl_proxy.base_variance_rate_rad2_s", sc.nl_base_variance_rate_rad2_s); });
    guard("nl_proxy.power_exponent", [&] { sc.nl_power_exponent = doc.get_double("nl_proxy.power_exponent", sc.nl_power_exponent); });
    guard("nl_proxy.correlation_time_ns", [&] { sc.nl_correlation_time_ns = doc.get_double("nl_proxy.correlation_time_ns", sc.nl_correlation_time_ns); });
    guard("nl_proxy.inter_channel_corr", [&] { sc.nl_inter_channel_corr = doc.get_double("nl_proxy.inter_channel_corr", sc.nl_inter_channel_corr); });
    guard("nl_proxy.decorrelation_delay_ps", [&] { sc.nl_decorrelation_delay_ps = doc.get_double("nl_proxy.decorrelation_delay_ps", sc.nl_decorrelation_delay_ps); });
    guard("nl_proxy.ref_power_dbm", [&] { sc.nl_ref_power_dbm = doc.get_double("nl_proxy.ref_power_dbm", sc.nl_ref_power_dbm); });

    guard("launch.power_dbm", [&] { sc.launch_power_dbm = doc.get_double("launch.power_dbm", sc.launch_power_dbm); });

    guard("frontend.enabled", [&] { sc.frontend_enabled = doc.get_bool("frontend.enabled", sc.frontend_enabled); });
    guard("frontend.adc_rate_gsa", [&] { sc.adc_rate_gsa = doc.get_double("frontend.adc_rate_gsa", sc.adc_rate_gsa); });
    guard("frontend.bandwidth_ghz", [&] { sc.bandwidth_ghz = doc.get_double("frontend.bandwidth_ghz", sc.bandwidth_ghz); });
    guard("frontend.skew_ps", [&] {
        if (doc.has("frontend.skew_ps"))
            sc.skew_ps = parse_double_list(doc.get("frontend.skew_ps", ""));
    });

    guard("dsp.mode", [&] { sc.mode = doc.get("dsp.mode", sc.mode); });
    guard("dsp.master_line", [&] {
        if (doc.get("dsp.master_line", "") == "auto")
            sc.master_auto = true;
        else
            sc.master_line = static_cast<int>(doc.get_int("dsp.master_line", sc.master_line));
    });
    guard("dsp.spacing_compensation", [&] { sc.spacing_compensation = doc.get("dsp.spacing_compensation", sc.spacing_compensation); });
    guard("dsp.eq_taps", [&] { sc.dsp.eq_taps = static_cast<int>(doc.get_int("dsp.eq_taps", sc.dsp.eq_taps)); });
    guard("dsp.eq_step", [&] { sc.dsp.eq_step = doc.get_double("dsp.eq_step", sc.dsp.eq_step); });
    guard("dsp.cma_step", [&] { sc.dsp.cma_step = doc.get_double("dsp.cma_step", sc.dsp.cma_step); });
    guard("dsp.block_size", [&] { sc.dsp.block_size = static_cast<int>(doc.get_int("dsp.block_size", sc.dsp.block_size)); });
    guard("dsp.cma_preconv_pow2", [&] { sc.cma_preconv_pow2 = static_cast<int>(doc.get_int("dsp.cma_preconv_pow2", sc.cma_preconv_pow2)); });
    guard("dsp.bps_test_angles", [&] { sc.dsp.bps_test_angles = static_cast<int>(doc.get_int("dsp.bps_test_angles", sc.dsp.bps_test_angles)); });
    guard("dsp.bps_window", [&] { sc.dsp.bps_window = static_cast<int>(doc.get_int("dsp.bps_window", sc.dsp.bps_window)); });
    guard("dsp.one_tap_step", [&] { sc.dsp.one_tap_step = doc.get_double("dsp.one_tap_step", sc.dsp.one_tap_step); });
    guard("dsp.slave_phase_delay_symbols", [&] { sc.dsp.slave_phase_delay_symbols = doc.get_double("dsp.slave_phase_delay_symbols", sc.dsp.slave_phase_delay_symbols); });
    guard("dsp.startup_symbols", [&] { sc.dsp.startup_symbols = static_cast<std::size_t>(doc.get_int("dsp.startup_symbols", static_cast<long long>(sc.dsp.startup_symbols))); });
    guard("dsp.metrics_skip_symbols", [&] { sc.metrics_skip_symbols = static_cast<int>(doc.get_int("dsp.metrics_skip_symbols", sc.metrics_skip_symbols)); });

    guard("run.seed", [&] { sc.seed = static_cast<std::uint64_t>(doc.get_int("run.seed", static_cast<long long>(sc.seed))); });
    guard("run.out_dir", [&] { sc.out_dir = doc.get("run.out_dir", sc.out_dir); });
    guard("run.dump_waveforms", [&] { sc.dump_waveforms = doc.get_bool("run.dump_waveforms", sc.dump_waveforms); });

    if (!errors.empty()) {
        std::string msg = "scenario parse errors:";
        for (const auto& e : errors) msg += "\n  - " + e;
        throw config_error(msg);
    }
    sc.dsp.cma_preconv_symbols = std::size_t(1) << sc.cma_preconv_pow2;
    sc.validate();
    return sc;
}

void Scenario::validate() const {
    std::vector<std::string> errors;
    auto req = [&](bool ok, const std::string& msg) {
        if (!ok) errors.push_back(msg);
    };

    req(spacing_ghz > 0, "combs.spacing_ghz must be > 0");
    req(linewidth_signal_khz >= 0 && linewidth_lo_khz >= 0,
        "combs.linewidth_* must be >= 0");
    req(jitter_linewidth_signal_hz >= 0 && jitter_linewidth_lo_hz >= 0,
        "combs.jitter_linewidth_* must be >= 0");
    req(n_lines >= 1 && n_lines % 2 == 1, "combs.n_lines must be odd and >= 1");

    req(!line_indices.empty(), "channels.line_indices must not be empty");
    const int max_line = (n_lines - 1) / 2;
    for (int n : line_indices)
        req(std::abs(n) <= max_line,
            "channels.line_indices: line " + std::to_string(n) +
                " outside the comb (|n| <= " + std::to_string(max_line) + ")");
    req(baud_gbaud > 0, "channels.baud_gbaud must be > 0");
    req(rolloff > 0 && rolloff <= 1, "channels.rolloff must be in (0,1]");
    req(tx_sps >= 2, "channels.tx_sps must be >= 2");
    req(symbols_pow2 >= 10 && symbols_pow2 <= 24,
        "channels.symbols_pow2 must be in [10, 24]");
    req(modulation_order == 4 || modulation_order == 16 || modulation_order == 64,
        "channels.modulation_order must be 4, 16 or 64");

    req(fiber_length_km >= 0, "fiber.length_km must be >= 0");

    req(nl_correlation_time_ns > 0, "nl_proxy.correlation_time_ns must be > 0");
    req(nl_inter_channel_corr >= 0 && nl_inter_channel_corr <= 1,
        "nl_proxy.inter_channel_corr must be in [0,1]");

    if (frontend_enabled) {
        req(adc_rate_gsa * 1e9 <= tx_rate_hz(), "frontend.adc_rate_gsa above tx rate");
        req(adc_rate_gsa > 2.0 * baud_gbaud,
            "frontend.adc_rate_gsa must exceed 2 samples/symbol");
        // rational resampling must land on integer frame lengths
        const double n1 = static_cast<double>(n_symbols()) * tx_sps * adc_rate_gsa * 1e9 /
                          tx_rate_hz();
        req(std::abs(n1 - std::round(n1)) < 1e-6,
            "frontend.adc_rate_gsa: frame length not divisible by tx/adc ratio");
        const double n2 = n1 * 2.0 * baud_gbaud / adc_rate_gsa;
        req(std::abs(n2 - std::round(n2)) < 1e-6,
            "frontend.adc_rate_gsa: adc/2sps ratio not rational for this frame");
        req(skew_ps.empty() || skew_ps.size() == line_indices.size(),
            "frontend.skew_ps must list one value per channel");
    }

    req(mode == "independent" || mode == "master_slave" || mode == "joint",
        "dsp.mode must be independent, master_slave or joint");
    if (mode == "master_slave" && !master_auto) {
        bool found = false;
        for (int n : line_indices) found = found || n == master_line;
        req(found, "dsp.master_line must be one of channels.line_indices");
    }
    req(spacing_compensation == "known" || spacing_compensation == "estimated" ||
            spacing_compensation == "none",
        "dsp.spacing_compensation must be known, estimated or none");
    req(cma_preconv_pow2 >= 8 && cma_preconv_pow2 < symbols_pow2,
        "dsp.cma_preconv_pow2 must be in [8, symbols_pow2)");
    req(static_cast<std::size_t>(metrics_skip_symbols) + dsp.cma_preconv_symbols <
            n_symbols() / 2,
        "dsp.metrics_skip_symbols leaves too few symbols for metrics");
    try {
        dsp.check();
    } catch (const config_error& e) {
        errors.push_back(e.what());
    }

    if (!errors.empty()) {
        std::string msg = "scenario validation failed:";
        for (const auto& e : errors) msg += "\n  - " + e;
        throw config_error(msg);
    }
}

std::string Scenario::canonical() const {
    std::ostringstream o;
    o << "combs.spacing_ghz=" << fmt(spacing_ghz) << '\n'
      << "combs.spacing_difference_khz=" << fmt(spacing_difference_khz) << '\n'
      << "combs.beat_mhz=" << fmt(beat_mhz) << '\n'
      << "combs.linewidth_signal_khz=" << fmt(linewidth_signal_khz) << '\n'
      << "combs.linewidth_lo_khz=" << fmt(linewidth_lo_khz) << '\n'
      << "combs.jitter_linewidth_signal_hz=" << fmt(jitter_linewidth_signal_hz) << '\n'
      << "combs.jitter_linewidth_lo_hz=" << fmt(jitter_linewidth_lo_hz) << '\n'
      << "combs.n_lines=" << n_lines << '\n'
      << "combs.lo_delay_ps=" << fmt(lo_delay_ps) << '\n';
    o << "channels.line_indices=";
    for (std::size_t i = 0; i < line_indices.size(); ++i)
        o << (i ? "," : "") << line_indices[i];
    o << '\n';
    o << "channels.baud_gbaud=" << fmt(baud_gbaud) << '\n'
      << "channels.rolloff=" << fmt(rolloff) << '\n'
      << "channels.tx_sps=" << tx_sps << '\n'
      << "channels.rrc_span_symbols=" << rrc_span_symbols << '\n'
      << "channels.symbols_pow2=" << symbols_pow2 << '\n'
      << "channels.modulation_order=" << modulation_order << '\n'
      << "fiber.length_km=" << fmt(fiber_length_km) << '\n'
      << "fiber.dispersion_ps_nm_km=" << fmt(dispersion_ps_nm_km) << '\n'
      << "fiber.ref_wavelength_nm=" << fmt(ref_wavelength_nm) << '\n'
      << "noise.snr_db=" << fmt(snr_db) << '\n'
      << "noise.snr_scales_with_power=" << snr_scales_with_power << '\n'
      << "noise.snr_ref_power_dbm=" << fmt(snr_ref_power_dbm) << '\n'
      << "nl_proxy.enabled=" << nl_enabled << '\n'
      << "nl_proxy.base_variance_rate_rad2_s=" << fmt(nl_base_variance_rate_rad2_s) << '\n'
      << "nl_proxy.power_exponent=" << fmt(nl_power_exponent) << '\n'
      << "nl_proxy.correlation_time_ns=" << fmt(nl_correlation_time_ns) << '\n'
      << "nl_proxy.inter_channel_corr=" << fmt(nl_inter_channel_corr) << '\n'
      << "nl_proxy.decorrelation_delay_ps=" << fmt(nl_decorrelation_delay_ps) << '\n'
      << "nl_proxy.ref_power_dbm=" << fmt(nl_ref_power_dbm) << '\n'
      << "launch.power_dbm=" << fmt(launch_power_dbm) << '\n'
      << "frontend.enabled=" << frontend_enabled << '\n'
      << "frontend.adc_rate_gsa=" << fmt(adc_rate_gsa) << '\n'
      << "frontend.bandwidth_ghz=" << fmt(bandwidth_ghz) << '\n';
    o << "frontend.skew_ps=";
    for (std::size_t i = 0; i < skew_ps.size(); ++i) o << (i ? "," : "") << fmt(skew_ps[i]);
    o << '\n';
    o << "dsp.mode=" << mode << '\n'
      << "dsp.master_line=" << (master_auto ? std::string("auto") : std::to_string(master_line)) << '\n'
      << "dsp.spacing_compensation=" << spacing_compensation << '\n'
      << "dsp.eq_taps=" << dsp.eq_taps << '\n'
      << "dsp.eq_step=" << fmt(dsp.eq_step) << '\n'
      << "dsp.cma_step=" << fmt(dsp.cma_step) << '\n'
      << "dsp.block_size=" << dsp.block_size << '\n'
      << "dsp.cma_preconv_pow2=" << cma_preconv_pow2 << '\n'
      << "dsp.bps_test_angles=" << dsp.bps_test_angles << '\n'
      << "dsp.bps_window=" << dsp.bps_window << '\n'
      << "dsp.one_tap_step=" << fmt(dsp.one_tap_step) << '\n'
      << "dsp.slave_phase_delay_symbols=" << fmt(dsp.slave_phase_delay_symbols) << '\n'
      << "dsp.startup_symbols=" << dsp.startup_symbols << '\n'
      << "dsp.metrics_skip_symbols=" << metrics_skip_symbols << '\n'
      << "run.seed=" << seed << '\n';
    return o.str();
}

std::uint64_t Scenario::hash() const { return fnv1a64(canonical()); }

std::string Scenario::physical_label() const {
    std::ostringstream o;
    o << "phys:" << fmt(spacing_ghz) << '|' << fmt(spacing_difference_khz) << '|'
      << fmt(beat_mhz) << '|' << fmt(linewidth_signal_khz) << '|'
      << fmt(linewidth_lo_khz) << '|' << fmt(jitter_linewidth_signal_hz) << '|'
      << fmt(jitter_linewidth_lo_hz) << '|' << n_lines << '|' << fmt(lo_delay_ps) << '|';
    for (int n : line_indices) o << n << ',';
    o << '|' << fmt(baud_gbaud) << '|' << fmt(rolloff) << '|' << tx_sps << '|'
      << rrc_span_symbols << '|' << symbols_pow2 << '|' << modulation_order << '|'
      << fmt(fiber_length_km) << '|' << fmt(dispersion_ps_nm_km) << '|'
      << fmt(ref_wavelength_nm) << '|' << nl_enabled << '|' << fmt(nl_power_exponent)
      << '|' << fmt(nl_correlation_time_ns) << '|' << fmt(nl_inter_channel_corr) << '|'
      << fmt(nl_decorrelation_delay_ps) << '|' << frontend_enabled << '|'
      << fmt(adc_rate_gsa) << '|' << fmt(bandwidth_ghz) << '|';
    for (double s : skew_ps) o << fmt(s) << ',';
    return o.str();
}

}  // namespace comblink
