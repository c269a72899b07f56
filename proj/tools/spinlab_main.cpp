// spinlab command-line front end.
//
// Exit codes: 0 success, 2 configuration or usage error, 3 numeric or
// domain failure, 4 I/O failure.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "spinlab/cli.hpp"
#include "spinlab/spinlab.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitIo = 4;

spinlab::cli::InterceptScanSpec parse_scan_spec(const std::string& text) {
    spinlab::cli::InterceptScanSpec scan;
    if (text.empty()) return scan;
    double lo = 0.0, hi = 0.0, step = 0.0;
    char c1 = 0, c2 = 0;
    std::istringstream in(text);
    if (!(in >> lo >> c1 >> hi >> c2 >> step) || c1 != ':' || c2 != ':' ||
        !(step > 0.0) || hi < lo)
        throw spinlab::cli::ConfigError("--scan expects lo:hi:step with step > 0");
    scan.enabled = true;
    scan.lo = lo;
    scan.hi = hi;
    scan.step = step;
    return scan;
}

int run_command(const std::string& config_path, int threads_override,
                const std::string& sector_override) {
    std::ifstream in(config_path);
    if (!in) throw spinlab::cli::IoError("cannot open config file: " + config_path);
    nlohmann::json raw;
    try {
        in >> raw;
    } catch (const nlohmann::json::exception& e) {
        throw spinlab::cli::ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    spinlab::cli::ExperimentConfig cfg = spinlab::cli::parse_config(raw);
    if (threads_override >= 0) cfg.threads = threads_override;
    if (!sector_override.empty()) cfg.sector = spinlab::cli::parse_sector(sector_override);
    const spinlab::cli::RunManifest manifest = spinlab::cli::run(cfg, raw);
    for (const auto& f : manifest.files)
        std::cout << "wrote " << cfg.output_dir << "/" << f.name << "\n";
    return kExitOk;
}

int zones_command(double gx, double gy, double h) {
    const spinlab::LmgParams params{gx, gy, h};
    const spinlab::ZoneReport report = spinlab::classify_zone(params);
    std::cout << spinlab::cli::zone_report_json(params, report).dump(2) << "\n";
    return kExitOk;
}

int fit_command(const std::string& input, double intercept, const std::string& scan_text,
                const std::string& output) {
    const auto scan = parse_scan_spec(scan_text);
    const nlohmann::json result = spinlab::cli::fit_from_csv(input, intercept, scan);
    std::ofstream out(output, std::ios::binary | std::ios::trunc);
    if (!out) throw spinlab::cli::IoError("cannot open for writing: " + output);
    out << result.dump(2) << "\n";
    if (!out) throw spinlab::cli::IoError("write failed: " + output);
    std::cout << result.dump(2) << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Collective-spin spectra, entanglement and classical zones"};
    app.require_subcommand(1);

    auto* run = app.add_subcommand("run", "execute a JSON experiment config");
    std::string config_path;
    int threads_override = -1;
    std::string sector_override;
    run->add_option("--config", config_path, "path to the experiment config")->required();
    run->add_option("--threads", threads_override, "worker threads, 0 = hardware");
    run->add_option("--sector", sector_override, "positive, negative or both");

    auto* zones = app.add_subcommand("zones", "classify a parameter point");
    zones->set_help_flag("--help", "print this help message");  // frees -h/--h
    double gx = 0.0, gy = 0.0, h = 0.0;
    zones->add_option("--gx", gx, "gamma_x")->required();
    zones->add_option("--gy", gy, "gamma_y")->required();
    zones->add_option("--h", h, "field")->required();

    auto* fit = app.add_subcommand("fit", "fixed-intercept fit of a scaling.csv");
    std::string fit_input, fit_scan, fit_output = "fit.json";
    double fit_intercept = 0.5;
    fit->add_option("--input", fit_input, "scaling.csv to fit")->required();
    fit->add_option("--intercept", fit_intercept, "fixed intercept (default 0.5)");
    fit->add_option("--scan", fit_scan, "intercept grid lo:hi:step");
    fit->add_option("--output", fit_output, "output path (default fit.json)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (run->parsed()) return run_command(config_path, threads_override, sector_override);
        if (zones->parsed()) return zones_command(gx, gy, h);
        return fit_command(fit_input, fit_intercept, fit_scan, fit_output);
    } catch (const spinlab::cli::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const spinlab::cli::IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitNumeric;
    }
}
