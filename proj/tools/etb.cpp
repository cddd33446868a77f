#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "etb/cli.hpp"

namespace {

struct Overrides {
    std::string config;
    std::string out;
    std::string controllers;
    std::optional<double> duration;
    std::optional<std::uint64_t> seed;
    std::optional<double> dtb;
    std::optional<double> taud;
    std::optional<int> chords;
};

void add_common(CLI::App *cmd, Overrides &o) {
    cmd->add_option("--config", o.config, "Scenario config file (defaults apply when omitted)");
    cmd->add_option("--out", o.out, "Output directory");
    cmd->add_option("--controllers", o.controllers,
                    "Comma separated list: etb-constant, etb-variable, periodic, self-triggered");
    cmd->add_option("--duration", o.duration, "Simulated time in seconds")->check(CLI::NonNegativeNumber);
    cmd->add_option("--seed", o.seed, "Seed for randomized tie-breaks");
    cmd->add_option("--dtb", o.dtb, "Target moving duration for the variable-speed controller [s]")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--taud", o.taud, "Wait after stopping for the variable-speed controller [s]")
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--chords", o.chords, "Chords per hyperbolic boundary")->check(CLI::Range(2, 4096));
}

etb::RunConfig load(const Overrides &o) {
    etb::RunConfig cfg = o.config.empty() ? etb::parse_config_text("") : etb::parse_config(o.config);
    if (!o.out.empty()) cfg.out_dir = o.out;
    if (!o.controllers.empty()) cfg.controllers = etb::parse_controller_list(o.controllers);
    if (o.duration) cfg.scenario.duration = *o.duration;
    if (o.seed) cfg.scenario.seed = *o.seed;
    if (o.dtb) cfg.scenario.params.dtb = *o.dtb;
    if (o.taud) cfg.scenario.params.tau_d = *o.taud;
    if (o.chords) cfg.scenario.params.chords = *o.chords;
    cfg.scenario.validate();
    return cfg;
}

void setup_logging() {
    const char *env = std::getenv("ETB_LOG");
    const std::string level = env ? env : "info";
    if (level == "quiet") {
        spdlog::set_level(spdlog::level::off);
    } else if (level == "debug") {
        spdlog::set_level(spdlog::level::debug);
    } else {
        if (level != "info") spdlog::warn("ETB_LOG={} not recognised, using info", level);
        spdlog::set_level(spdlog::level::info);
    }
    spdlog::set_pattern("[%l] %v");
}

}  // namespace

int main(int argc, char **argv) {
    setup_logging();
    CLI::App app{"Event-triggered broadcast coverage control simulator"};
    app.require_subcommand(1);

    Overrides run_o, cmp_o, chk_o;
    auto *run = app.add_subcommand("run", "Simulate and write traces, metrics and plots");
    add_common(run, run_o);
    auto *cmp = app.add_subcommand("compare", "Simulate several controllers and tabulate message reductions");
    add_common(cmp, cmp_o);
    auto *chk = app.add_subcommand("check", "Run the invariant suite on a written trace");
    std::string trace_path, metrics_path;
    chk->add_option("trace", trace_path, "trace.csv written by run")->required()->check(CLI::ExistingFile);
    chk->add_option("--metrics", metrics_path, "metrics.csv (default: next to the trace)");
    chk->add_option("--config", chk_o.config, "Config the trace was produced with");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) return etb::cmd_run(load(run_o), std::cout);
        if (*cmp) {
            etb::RunConfig cfg = load(cmp_o);
            if (cmp_o.controllers.empty() && cfg.controllers.size() < 2) cfg.controllers = etb::all_controllers();
            return etb::cmd_compare(cfg, std::cout);
        }
        const etb::RunConfig cfg = load(chk_o);
        return etb::cmd_check(trace_path, cfg.scenario, std::cout,
                              metrics_path.empty() ? std::nullopt : std::optional<std::filesystem::path>(metrics_path));
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
