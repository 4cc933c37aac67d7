#pragma once

#include <string>
#include <vector>

#include "comblink/metrics.hpp"
#include "comblink/scenario.hpp"

namespace comblink {

struct ChannelRow {
    std::string mode;
    int master_separation = 0;  // line separation to master; group size for joint
    double launch_power_dbm = 0.0;
    int channel_line = 0;
    MetricsReport metrics;
    std::uint64_t bps_distance_evals = 0;
    std::uint64_t eq_tap_updates = 0;
    int bps_window = 0;
    double foe_hz = 0.0;
    double spacing_difference_used_hz = 0.0;
    bool converged = true;
    bool tracking_failure = false;
};

struct RunRecord {
    std::uint64_t scenario_hash = 0;
    std::uint64_t seed = 0;
    std::string mode;
    std::vector<ChannelRow> rows;
    double lag0_phase_corr = 0.0;  // first channel pair, detrended true phase
    double spacing_difference_est_hz = 0.0;
    bool dsp_failure = false;
    double wall_seconds = 0.0;
};

RunRecord run_scenario(const Scenario& sc);

std::string csv_header();
void append_csv_rows(std::string& csv, const RunRecord& rec);
void write_text_record(const std::string& path, const Scenario& sc, const RunRecord& rec);

// Cartesian sweep over one or more scenario keys. Points run on `threads`
// workers; rows are emitted in point order regardless of scheduling.
struct SweepAxis {
    std::string param;                // e.g. "launch.power_dbm"
    std::vector<std::string> values;  // textual, substituted into the config
};

struct SweepResult {
    std::vector<RunRecord> records;
    std::string csv;
    bool any_dsp_failure = false;
    bool any_validation_failure = false;
    std::vector<std::string> errors;
};

SweepResult run_sweep(const IniDoc& base, const std::vector<SweepAxis>& axes,
                      int threads);

}  // namespace comblink
