#ifndef ETB_CHECKS_HPP
#define ETB_CHECKS_HPP

#include <optional>
#include <string>
#include <vector>

#include "etb/report.hpp"

namespace etb {

struct CheckResult {
    std::string name;
    long checked = 0;
    long violations = 0;
    std::string first_violation;
    bool skipped = false;

    bool ok() const { return skipped || violations == 0; }
};

/// Trace rows regrouped per step; rows for one step share t and are ordered by agent.
struct TraceStep {
    double t = 0.0;
    std::vector<TraceRow> rows;
};

std::vector<TraceStep> group_steps(const std::vector<TraceRow> &rows);
std::vector<TraceStep> to_steps(const SimTrace &trace);

CheckResult check_in_region(const std::vector<TraceStep> &steps, const SimplePolygon &region, double tol = 1e-9);
/// Receivers are exactly the other agents within the radius (closed ball).
CheckResult check_delivery(const std::vector<TraceStep> &steps);
/// Every exact Voronoi neighbor of a sender lies within its broadcast radius.
CheckResult check_broadcast_sufficiency(const std::vector<TraceStep> &steps, const SimplePolygon &region);
/// Between broadcasts an agent stays within promise * elapsed of where it last broadcast.
CheckResult check_promise_honesty(const std::vector<TraceStep> &steps, double tol = 1e-9);
/// Broadcast rows plus request traffic must add up to the metrics counts. Request traffic is not in
/// the trace, so rows without a broadcast flag are accepted when `allow_requests` is set.
CheckResult check_message_conservation(const std::vector<TraceStep> &steps, const std::vector<MetricsRow> &metrics,
                                       bool allow_requests);
/// Sampled H never rises by more than 2 N M_max s_max dt between samples, and ends below where it started.
CheckResult check_h_monotone(const std::vector<MetricsRow> &metrics, std::size_t agents, double m_max, double s_max,
                             double dt);

double h_step_bound(std::size_t agents, double m_max, double s_max, double dt);

}  // namespace etb

#endif  // ETB_CHECKS_HPP
