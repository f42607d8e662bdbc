#include "qet/scenario.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

namespace {

namespace fs = std::filesystem;

// exit codes: 0 ok, 1 verification failures, 2 validation, 3 event never
// happens, 4 unreadable file, 5 numerical, 6 resource
int exit_code_for(const qet::error& e) {
    if (dynamic_cast<const qet::event_never_happens*>(&e)) return 3;
    if (dynamic_cast<const qet::io_error*>(&e)) return 4;
    if (dynamic_cast<const qet::numerical_error*>(&e)) return 5;
    if (dynamic_cast<const qet::resource_error*>(&e)) return 6;
    return 2; // validation_error, contract_error
}

const char* kind_of(const qet::error& e) {
    if (dynamic_cast<const qet::event_never_happens*>(&e)) return "event_never_happens";
    if (dynamic_cast<const qet::io_error*>(&e)) return "io";
    if (dynamic_cast<const qet::numerical_error*>(&e)) return "numerical";
    if (dynamic_cast<const qet::resource_error*>(&e)) return "resource";
    if (dynamic_cast<const qet::validation_error*>(&e)) return "validation";
    return "contract";
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw qet::io_error("cannot write '" + path.string() + "'");
    }
    out << content;
    if (!out) {
        throw qet::io_error("write failure on '" + path.string() + "'");
    }
}

int cmd_run(const std::string& config_path, const std::string& out_dir) {
    const qet::ScenarioConfig cfg = qet::load_scenario(config_path);
    const qet::ScenarioResult res = qet::run_scenario(cfg);

    const fs::path out(out_dir);
    fs::create_directories(out);
    const fs::path report_path = out / (cfg.name + ".report.json");
    const fs::path csv_path = out / (cfg.name + ".distribution.csv");
    write_file(report_path, qet::render_report(res.report));
    write_file(csv_path, qet::distribution_csv(res.times, res.p));
    std::cout << "report: " << report_path.string() << "\n"
              << "distribution: " << csv_path.string() << "\n";
    return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& out_dir) {
    const qet::ScenarioConfig cfg = qet::load_scenario(config_path);
    const qet::SweepResult res = qet::run_sweep(cfg);

    const fs::path out(out_dir);
    fs::create_directories(out);
    const fs::path csv_path = out / (cfg.name + ".sweep.csv");
    write_file(csv_path, qet::sweep_csv(res));
    std::cout << "sweep: " << csv_path.string() << "\n"
              << "margin monotone: " << (res.margin_monotone ? "yes" : "no")
              << "\n";
    return 0;
}

int cmd_verify(std::uint64_t seed, int trials) {
    const qet::VerifySummary summary = qet::run_verification(seed, trials);
    for (const std::string& msg : summary.messages) {
        std::cerr << "verify: " << msg << "\n";
    }
    std::cout << "verify: " << summary.trials << " trials, " << summary.failures
              << " failures (seed " << seed << ")\n";
    return summary.failures == 0 ? 0 : 1;
}

int cmd_oracle_check(const std::string& config_path, const std::string& out_dir,
                     bool emit_report) {
    const qet::ScenarioConfig cfg = qet::load_scenario(config_path);
    const qet::ScenarioResult production = qet::run_scenario(cfg);
    const qet::ScenarioResult reference = qet::run_scenario_oracle(cfg);

    const double tolerance = 1e-10;
    const qet::ReportComparison cmp =
        qet::compare_reports(production.report, reference.report, tolerance);
    for (const std::string& line : cmp.mismatches) {
        std::cerr << "oracle-check: " << line << "\n";
    }
    std::cout << "oracle-check: max deviation " << cmp.max_deviation
              << (cmp.mismatches.empty() ? " (ok)" : " (MISMATCH)") << "\n";

    if (emit_report) {
        const fs::path out(out_dir);
        fs::create_directories(out);
        const fs::path report_path = out / (cfg.name + ".oracle.report.json");
        write_file(report_path, qet::render_report(reference.report));
        std::cout << "oracle report: " << report_path.string() << "\n";
    }
    return cmp.mismatches.empty() ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"event-time statistics for clock–system history states"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = ".";
    std::uint64_t seed = 20260815ULL;
    int trials = 100;
    bool emit_report = false;

    CLI::App* run = app.add_subcommand("run", "run a scenario and write its report");
    run->add_option("config", config_path, "scenario JSON file")->required();
    run->add_option("--out", out_dir, "output directory (default .)");

    CLI::App* sweep = app.add_subcommand("sweep", "run the sweep block of a scenario");
    sweep->add_option("config", config_path, "scenario JSON file")->required();
    sweep->add_option("--out", out_dir, "output directory (default .)");

    CLI::App* verify =
        app.add_subcommand("verify", "run the randomized property corpus");
    verify->add_option("--seed", seed, "RNG seed (default 20260815)");
    verify->add_option("--trials", trials, "number of trials (default 100)");

    CLI::App* oracle = app.add_subcommand(
        "oracle-check", "compare the production path against the dense oracle");
    oracle->add_option("config", config_path, "scenario JSON file")->required();
    oracle->add_option("--out", out_dir, "output directory (default .)");
    oracle->add_flag("--emit-report", emit_report,
                     "also write <name>.oracle.report.json");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (run->parsed()) return cmd_run(config_path, out_dir);
        if (sweep->parsed()) return cmd_sweep(config_path, out_dir);
        if (verify->parsed()) return cmd_verify(seed, trials);
        if (oracle->parsed())
            return cmd_oracle_check(config_path, out_dir, emit_report);
    } catch (const qet::error& e) {
        std::cerr << "error: code=" << exit_code_for(e) << " kind=" << kind_of(e)
                  << " detail=" << e.what() << "\n";
        return exit_code_for(e);
    } catch (const std::exception& e) {
        std::cerr << "error: code=5 kind=internal detail=" << e.what() << "\n";
        return 5;
    }
    return 0;
}
