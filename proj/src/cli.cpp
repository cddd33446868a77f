#include "etb/cli.hpp"

#include <fstream>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ostream.h>
#include <spdlog/spdlog.h>

namespace etb {

namespace {

namespace fs = std::filesystem;

std::vector<SimTrace> run_all(const RunConfig &cfg, std::ostream &out) {
    fs::create_directories(cfg.out_dir);
    std::vector<SimTrace> traces;
    for (ControllerKind kind : cfg.controllers) {
        Scenario sc = cfg.scenario;
        sc.controller = kind;
        const std::string name(controller_name(kind));
        spdlog::info("running {} for {} s ({} steps)", name, sc.duration, sc.steps());
        SimTrace trace = run(sc, [&](const StepView &v) {
            if (v.step > 0 && v.step % 3600 == 0) spdlog::debug("{}: t = {} s", name, v.t);
        });

        const fs::path dir = cfg.out_dir / name;
        fs::create_directories(dir);
        std::ostringstream tcsv, mcsv;
        write_trace_csv(tcsv, trace);
        write_metrics_csv(mcsv, trace);
        write_file(dir / "trace.csv", tcsv.str());
        write_file(dir / "metrics.csv", mcsv.str());
        if (cfg.plots) {
            const auto rows = compute_metrics(trace);
            Series h{name, {}, {}}, step{name, {}, {}};
            for (const MetricsRow &r : rows) {
                if (r.H) h.x.push_back(r.t), h.y.push_back(*r.H);
                step.x.push_back(r.t);
                step.y.push_back(static_cast<double>(r.msgs_step));
            }
            write_file(dir / "H.svg", render_line_plot({"Objective H", "t [s]", "H", {h}, false}));
            write_file(dir / "messages_step.svg",
                       render_line_plot({"Messages per time step", "t [s]", "messages", {step}, true}));
            write_file(dir / "trajectories.svg", render_trajectories(trace, sc.region));
        }
        const auto &last = trace.steps.back();
        fmt::print(out, "{}: final H = {:.6g}, total messages = {}\n", name, last.H.value_or(0.0), trace.total_messages);
        spdlog::info("{} done: {} messages", name, trace.total_messages);
        traces.push_back(std::move(trace));
    }
    if (cfg.plots) {
        PlotSpec h{"Objective H", "t [s]", "H", {}, false};
        PlotSpec cum{"Cumulative messages", "t [s]", "messages", {}, false};
        for (const SimTrace &t : traces) {
            const std::string name(controller_name(t.controller));
            Series hs{name, {}, {}}, cs{name, {}, {}};
            for (const MetricsRow &r : compute_metrics(t)) {
                if (r.H) hs.x.push_back(r.t), hs.y.push_back(*r.H);
                cs.x.push_back(r.t);
                cs.y.push_back(static_cast<double>(r.msgs_cum));
            }
            h.series.push_back(std::move(hs));
            cum.series.push_back(std::move(cs));
        }
        write_file(cfg.out_dir / "H.svg", render_line_plot(h));
        write_file(cfg.out_dir / "messages_cum.svg", render_line_plot(cum));
    }
    return traces;
}

}  // namespace

int cmd_run(const RunConfig &cfg, std::ostream &out) {
    run_all(cfg, out);
    return 0;
}

int cmd_compare(const RunConfig &cfg, std::ostream &out) {
    if (cfg.controllers.size() < 2) throw ConfigError("compare needs at least two controllers");
    const auto traces = run_all(cfg, out);
    const auto pairs = pairwise_reductions(traces);
    fmt::print(out, "\nreduction of A's messages relative to B, percent\n{:<16}", "A \\ B");
    for (const SimTrace &t : traces) fmt::print(out, "{:>16}", controller_name(t.controller));
    fmt::print(out, "\n");
    for (std::size_t a = 0; a < traces.size(); ++a) {
        fmt::print(out, "{:<16}", controller_name(traces[a].controller));
        for (std::size_t b = 0; b < traces.size(); ++b) fmt::print(out, "{:>16.1f}", pairs[a * traces.size() + b].percent);
        fmt::print(out, "\n");
    }
    std::ostringstream csv;
    write_summary_csv(csv, pairs);
    write_file(cfg.out_dir / "summary.csv", csv.str());
    return 0;
}

std::vector<CheckResult> run_trace_checks(const std::vector<TraceStep> &steps, const std::vector<MetricsRow> *metrics,
                                          const Scenario &sc, bool allow_requests) {
    std::vector<CheckResult> out;
    out.push_back(check_in_region(steps, sc.region));
    out.push_back(check_delivery(steps));
    out.push_back(check_broadcast_sufficiency(steps, sc.region));
    out.push_back(check_promise_honesty(steps));
    if (metrics) {
        out.push_back(check_message_conservation(steps, *metrics, allow_requests));
        const std::size_t n = steps.empty() ? 0 : steps.front().rows.size();
        out.push_back(check_h_monotone(*metrics, n, mass_centroid(sc.region, sc.density).mass(), sc.params.s_max,
                                       sc.params.dt));
    } else {
        out.push_back({"message counts add up", 0, 0, "", true});
        out.push_back({"H is non-increasing", 0, 0, "", true});
    }
    return out;
}

int cmd_check(const fs::path &trace_csv, const Scenario &sc, std::ostream &out, std::optional<fs::path> metrics_csv) {
    std::ifstream tin(trace_csv);
    if (!tin) throw ReportError(fmt::format("cannot open '{}'", trace_csv.string()));
    std::string first, second;
    std::getline(tin, first);
    std::getline(tin, second);
    const bool requests = second == "# controller=self-triggered";
    tin.seekg(0);
    const auto steps = group_steps(read_trace_csv(tin));

    const fs::path mpath = metrics_csv.value_or(trace_csv.parent_path() / "metrics.csv");
    std::vector<MetricsRow> metrics;
    bool have_metrics = false;
    if (std::ifstream min(mpath); min) {
        metrics = read_metrics_csv(min);
        have_metrics = true;
    } else if (metrics_csv) {
        throw ReportError(fmt::format("cannot open '{}'", mpath.string()));
    }

    bool ok = true;
    for (const CheckResult &r : run_trace_checks(steps, have_metrics ? &metrics : nullptr, sc, requests)) {
        ok = ok && r.ok();
        if (r.skipped) {
            fmt::print(out, "SKIP {} (no metrics file)\n", r.name);
        } else {
            fmt::print(out, "{} {}: {} checked, {} violations{}\n", r.ok() ? "PASS" : "FAIL", r.name, r.checked,
                       r.violations, r.violations ? "; first: " + r.first_violation : "");
        }
    }
    return ok ? 0 : 2;
}

}  // namespace etb
