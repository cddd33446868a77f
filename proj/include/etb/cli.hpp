#ifndef ETB_CLI_HPP
#define ETB_CLI_HPP

#include <filesystem>
#include <iosfwd>
#include <optional>

#include "etb/checks.hpp"
#include "etb/config.hpp"

namespace etb {

/// Runs every configured controller and writes per-controller CSVs and plots under cfg.out_dir/<controller>/,
/// plus overlaid H and cumulative message plots in cfg.out_dir. Returns the process exit code.
int cmd_run(const RunConfig &cfg, std::ostream &out);

/// Like cmd_run, then prints the pairwise reduction table and writes cfg.out_dir/summary.csv.
int cmd_compare(const RunConfig &cfg, std::ostream &out);

/// Invariant suite over a written trace. The metrics file defaults to metrics.csv next to the trace.
int cmd_check(const std::filesystem::path &trace_csv, const Scenario &scenario, std::ostream &out,
              std::optional<std::filesystem::path> metrics_csv = std::nullopt);

std::vector<CheckResult> run_trace_checks(const std::vector<TraceStep> &steps, const std::vector<MetricsRow> *metrics,
                                          const Scenario &scenario, bool allow_requests);

}  // namespace etb

#endif  // ETB_CLI_HPP
