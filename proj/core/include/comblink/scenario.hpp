#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "comblink/equalizer.hpp"
#include "comblink/ini.hpp"

namespace comblink {

// A full experiment description. Keys are grouped into INI sections; all
// physical quantities carry their unit in the key name. See
// Scenario::from_ini for the schema.
struct Scenario {
    // [combs]
    double spacing_ghz = 25.0;
    double spacing_difference_khz = 0.0;  // signal spacing minus LO spacing
    double beat_mhz = 30.0;               // center-line frequency offset
    double linewidth_signal_khz = 50.0;
    double linewidth_lo_khz = 50.0;
    double jitter_linewidth_signal_hz = 0.0;
    double jitter_linewidth_lo_hz = 0.0;
    int n_lines = 25;
    double lo_delay_ps = 0.0;  // decorrelation delay on the LO realization

    // [channels]
    std::vector<int> line_indices = {0, 1};
    double baud_gbaud = 20.0;
    double rolloff = 0.05;
    int tx_sps = 3;
    int rrc_span_symbols = 64;
    int symbols_pow2 = 17;
    int modulation_order = 64;

    // [fiber]
    double fiber_length_km = 0.0;
    double dispersion_ps_nm_km = 16.5;
    double ref_wavelength_nm = 1545.32;

    // [noise] — SNR of the 2 sps stream entering the equalizer; "inf" turns
    // the AWGN off. With snr_scales_with_power the effective SNR follows the
    // launch power: snr_db + (launch - snr_ref_power_dbm).
    double snr_db = 18.0;
    bool snr_scales_with_power = false;
    double snr_ref_power_dbm = 10.0;

    // [nl_proxy]
    bool nl_enabled = false;
    double nl_base_variance_rate_rad2_s = 0.0;
    double nl_power_exponent = 2.0;
    double nl_correlation_time_ns = 5.0;
    double nl_inter_channel_corr = 0.95;
    double nl_decorrelation_delay_ps = 0.0;
    double nl_ref_power_dbm = 10.0;

    // [launch]
    double launch_power_dbm = 10.0;

    // [frontend]
    bool frontend_enabled = true;
    double adc_rate_gsa = 50.0;
    double bandwidth_ghz = 23.0;
    std::vector<double> skew_ps;  // per channel; empty = all zero

    // [dsp]
    std::string mode = "independent";  // independent | master_slave | joint
    int master_line = 0;
    bool master_auto = false;  // master_line = auto: last listed channel
    std::string spacing_compensation = "known";  // known | estimated | none
    DspConfig dsp;
    int cma_preconv_pow2 = 15;
    int metrics_skip_symbols = 2048;

    // [run]
    std::uint64_t seed = 1;
    std::string out_dir = "out";
    bool dump_waveforms = false;

    // Parses and validates; throws config_error listing every offending field.
    static Scenario from_ini(const IniDoc& doc);

    void validate() const;  // same error-collecting contract

    // Canonical key=value serialization of the resolved scenario (stable
    // order); basis of the scenario hash.
    std::string canonical() const;
    std::uint64_t hash() const;

    // Canonical form of the waveform-determining subset only: everything
    // except DSP choices and pure scale factors (launch power, SNR level).
    // Runs that share this label draw identical noise realizations, so
    // different DSP modes process the same waveform.
    std::string physical_label() const;

    double baud_hz() const { return baud_gbaud * 1e9; }
    double tx_rate_hz() const { return baud_hz() * tx_sps; }
    std::size_t n_symbols() const { return std::size_t(1) << symbols_pow2; }
};

}  // namespace comblink
