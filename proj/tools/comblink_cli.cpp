// comblink: scenario-driven simulator for comb-based WDM transmission with
// independent, master-slave and joint carrier recovery.

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "comblink/runner.hpp"

namespace fs = std::filesystem;
using namespace comblink;

namespace {

int cmd_validate(const std::string& path) {
    try {
        Scenario sc = Scenario::from_ini(IniDoc::parse_file(path));
        char hash[20];
        std::snprintf(hash, sizeof(hash), "%016llx",
                      static_cast<unsigned long long>(sc.hash()));
        std::cout << "ok: scenario valid, hash " << hash << "\n";
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "invalid: " << e.what() << "\n";
        return 1;
    }
}

void write_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::trunc);
    if (!f) throw parse_error("cannot open '" + path + "' for writing");
    f << content;
}

int cmd_run(const std::string& path, const std::string& out_dir,
            std::optional<std::uint64_t> seed, int threads) {
    (void)threads;  // a single run is sequential; threads apply to sweeps
    Scenario sc;
    try {
        sc = Scenario::from_ini(IniDoc::parse_file(path));
        if (seed) sc.seed = *seed;
        if (!out_dir.empty()) sc.out_dir = out_dir;
    } catch (const std::exception& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 1;
    }
    fs::create_directories(sc.out_dir);

    RunRecord rec = run_scenario(sc);
    std::string csv = csv_header();
    append_csv_rows(csv, rec);
    write_file(sc.out_dir + "/run.csv", csv);
    write_text_record(sc.out_dir + "/run_record.txt", sc, rec);
    std::cout << csv;
    if (rec.dsp_failure) {
        std::cerr << "dsp failure in at least one channel (results written)\n";
        return 2;
    }
    return 0;
}

int cmd_sweep(const std::string& path, const std::string& out_dir,
              std::optional<std::uint64_t> seed, int threads,
              const std::vector<std::string>& params,
              const std::vector<std::string>& values) {
    if (params.size() != values.size()) {
        std::cerr << "validation error: need one --values list per --param\n";
        return 1;
    }
    IniDoc doc;
    std::string dir = out_dir;
    try {
        doc = IniDoc::parse_file(path);
        Scenario base = Scenario::from_ini(doc);  // validate the base config
        if (dir.empty()) dir = base.out_dir;
    } catch (const std::exception& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 1;
    }

    std::vector<SweepAxis> axes;
    for (std::size_t i = 0; i < params.size(); ++i) {
        SweepAxis ax;
        ax.param = params[i];
        // ';' separates points when the values themselves contain commas
        // (e.g. channels.line_indices = 0,1;0,5;0,12)
        const char sep = values[i].find(';') != std::string::npos ? ';' : ',';
        std::istringstream in(values[i]);
        std::string tok;
        while (std::getline(in, tok, sep)) ax.values.push_back(tok);
        axes.push_back(std::move(ax));
    }
    if (seed) {
        SweepAxis ax;
        ax.param = "run.seed";
        ax.values = {std::to_string(*seed)};
        axes.push_back(std::move(ax));
    }

    SweepResult res = run_sweep(doc, axes, threads);
    fs::create_directories(dir);
    write_file(dir + "/sweep.csv", res.csv);
    std::cout << res.csv;
    for (std::size_t i = 0; i < res.errors.size(); ++i)
        if (!res.errors[i].empty())
            std::cerr << "point " << i << ": " << res.errors[i] << "\n";
    if (res.any_validation_failure) return 1;
    if (res.any_dsp_failure) return 2;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"frequency-comb WDM transmission simulator with joint carrier recovery"};
    app.require_subcommand(1);

    std::string scenario_path, out_dir;
    std::optional<std::uint64_t> seed;
    int threads = 1;
    std::vector<std::string> params, values;

    CLI::App* run = app.add_subcommand("run", "run one scenario");
    run->add_option("scenario", scenario_path, "scenario file")->required();
    run->add_option("--out", out_dir, "output directory");
    run->add_option("--seed", seed, "override run.seed");
    run->add_option("--threads", threads, "worker threads");

    CLI::App* validate = app.add_subcommand("validate", "validate a scenario file");
    validate->add_option("scenario", scenario_path, "scenario file")->required();

    CLI::App* sweep = app.add_subcommand("sweep", "sweep scenario parameters");
    sweep->add_option("scenario", scenario_path, "scenario file")->required();
    sweep->add_option("--param", params, "parameter key (section.key), repeatable")
        ->required();
    sweep->add_option("--values", values, "comma-separated values, one list per --param")
        ->required();
    sweep->add_option("--out", out_dir, "output directory");
    sweep->add_option("--seed", seed, "override run.seed");
    sweep->add_option("--threads", threads, "worker threads");

    CLI11_PARSE(app, argc, argv);

    try {
        if (app.got_subcommand(run))
            return cmd_run(scenario_path, out_dir, seed, threads);
        if (app.got_subcommand(validate)) return cmd_validate(scenario_path);
        if (app.got_subcommand(sweep))
            return cmd_sweep(scenario_path, out_dir, seed, threads, params, values);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
