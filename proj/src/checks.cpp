#include "etb/checks.hpp"

#include <algorithm>
#include <map>

#include <fmt/format.h>

namespace etb {

namespace {

void note(CheckResult &r, const std::string &what) {
    if (r.violations++ == 0) r.first_violation = what;
}

std::vector<Point2> positions_of(const TraceStep &s) {
    std::vector<Point2> p;
    p.reserve(s.rows.size());
    for (const TraceRow &r : s.rows) p.push_back(r.position);
    return p;
}

}  // namespace

std::vector<TraceStep> group_steps(const std::vector<TraceRow> &rows) {
    std::vector<TraceStep> out;
    for (const TraceRow &r : rows) {
        if (out.empty() || out.back().t != r.t) out.push_back({r.t, {}});
        out.back().rows.push_back(r);
    }
    for (TraceStep &s : out) {
        std::sort(s.rows.begin(), s.rows.end(), [](const TraceRow &a, const TraceRow &b) { return a.agent < b.agent; });
    }
    return out;
}

std::vector<TraceStep> to_steps(const SimTrace &trace) {
    std::vector<TraceStep> out;
    out.reserve(trace.steps.size());
    for (const StepRecord &s : trace.steps) {
        TraceStep ts{s.t, {}};
        for (std::size_t i = 0; i < s.positions.size(); ++i) {
            TraceRow r;
            r.t = s.t;
            r.agent = static_cast<int>(i);
            r.position = s.positions[i];
            r.speed = i < s.speeds.size() ? s.speeds[i] : 0.0;
            for (const MessageEvent &e : s.events) {
                if (e.sender != r.agent || e.request) continue;
                r.broadcast = true;
                r.radius = e.radius;
                r.receivers = e.receivers;
            }
            ts.rows.push_back(std::move(r));
        }
        out.push_back(std::move(ts));
    }
    return out;
}

CheckResult check_in_region(const std::vector<TraceStep> &steps, const SimplePolygon &region, double tol) {
    CheckResult r;
    r.name = "positions inside the region";
    for (const TraceStep &s : steps) {
        for (const TraceRow &row : s.rows) {
            ++r.checked;
            if (point_in_polygon(row.position, region)) continue;
            double d = INFINITY;
            for (std::size_t k = 0; k < region.size(); ++k) {
                const Point2 a = region[k], b = region.wrap(k + 1);
                const double u = std::clamp(dot(row.position - a, b - a) / dot(b - a, b - a), 0.0, 1.0);
                d = std::min(d, dist(row.position, a + (b - a) * u));
            }
            if (d > tol) note(r, fmt::format("t={} agent {} at ({}, {})", s.t, row.agent, row.position.x, row.position.y));
        }
    }
    return r;
}

CheckResult check_delivery(const std::vector<TraceStep> &steps) {
    CheckResult r;
    r.name = "receivers match the broadcast radius";
    for (const TraceStep &s : steps) {
        for (const TraceRow &row : s.rows) {
            if (!row.broadcast) continue;
            std::vector<int> expect;
            for (const TraceRow &o : s.rows) {
                if (o.agent != row.agent && dist(o.position, row.position) <= row.radius) expect.push_back(o.agent);
            }
            std::vector<int> got = row.receivers;
            std::sort(got.begin(), got.end());
            ++r.checked;
            if (got != expect) {
                note(r, fmt::format("t={} sender {}: receivers [{}] expected [{}]", s.t, row.agent, fmt::join(got, ","),
                                    fmt::join(expect, ",")));
            }
        }
    }
    return r;
}

CheckResult check_broadcast_sufficiency(const std::vector<TraceStep> &steps, const SimplePolygon &region) {
    CheckResult r;
    r.name = "broadcasts reach every Voronoi neighbor";
    for (const TraceStep &s : steps) {
        if (std::none_of(s.rows.begin(), s.rows.end(), [](const TraceRow &x) { return x.broadcast; })) continue;
        const auto pos = positions_of(s);
        const auto nb = voronoi_neighbors(pos, region);
        for (const TraceRow &row : s.rows) {
            if (!row.broadcast) continue;
            for (int j : nb[static_cast<std::size_t>(row.agent)]) {
                ++r.checked;
                const double d = dist(pos[static_cast<std::size_t>(j)], row.position);
                if (d > row.radius + 1e-9) {
                    note(r, fmt::format("t={} sender {} radius {} misses neighbor {} at {}", s.t, row.agent, row.radius, j, d));
                }
            }
        }
    }
    return r;
}

CheckResult check_promise_honesty(const std::vector<TraceStep> &steps, double tol) {
    CheckResult r;
    r.name = "speed promises are kept";
    struct Promise {
        double t;
        Point2 p;
        double s;
    };
    std::map<int, Promise> last;
    for (const TraceStep &s : steps) {
        for (const TraceRow &row : s.rows) {
            if (const auto it = last.find(row.agent); it != last.end()) {
                ++r.checked;
                const double allowed = it->second.s * (s.t - it->second.t) + tol;
                if (dist(row.position, it->second.p) > allowed) {
                    note(r, fmt::format("t={} agent {} moved {} but promised {}", s.t, row.agent,
                                        dist(row.position, it->second.p), allowed));
                }
            }
            if (row.broadcast) last[row.agent] = {s.t, row.position, row.speed};
        }
    }
    return r;
}

CheckResult check_message_conservation(const std::vector<TraceStep> &steps, const std::vector<MetricsRow> &metrics,
                                       bool allow_requests) {
    CheckResult r;
    r.name = "message counts add up";
    if (steps.size() != metrics.size()) {
        note(r, fmt::format("trace has {} steps, metrics has {}", steps.size(), metrics.size()));
        return r;
    }
    long cum = 0;
    for (std::size_t k = 0; k < steps.size(); ++k) {
        ++r.checked;
        long broadcasts = 0;
        for (const TraceRow &row : steps[k].rows) broadcasts += row.broadcast ? 1 : 0;
        cum += metrics[k].msgs_step;
        const bool count_ok = allow_requests ? metrics[k].msgs_step >= broadcasts : metrics[k].msgs_step == broadcasts;
        if (!count_ok || metrics[k].msgs_cum != cum || metrics[k].t != steps[k].t) {
            note(r, fmt::format("t={}: {} broadcasts, msgs_step={}, msgs_cum={} (running sum {})", steps[k].t, broadcasts,
                                metrics[k].msgs_step, metrics[k].msgs_cum, cum));
        }
    }
    return r;
}

double h_step_bound(std::size_t agents, double m_max, double s_max, double dt) {
    return 2.0 * static_cast<double>(agents) * m_max * s_max * dt;
}

CheckResult check_h_monotone(const std::vector<MetricsRow> &metrics, std::size_t agents, double m_max, double s_max,
                             double dt) {
    CheckResult r;
    r.name = "H is non-increasing";
    const double bound = h_step_bound(agents, m_max, s_max, dt);
    std::optional<MetricsRow> prev, first;
    for (const MetricsRow &m : metrics) {
        if (!m.H) continue;
        if (!first) first = m;
        if (prev) {
            ++r.checked;
            if (*m.H - *prev->H > bound) note(r, fmt::format("H rose by {} between t={} and t={}", *m.H - *prev->H, prev->t, m.t));
        }
        prev = m;
    }
    if (first && prev && prev->t > first->t) {
        ++r.checked;
        if (!(*prev->H < *first->H)) note(r, fmt::format("final H {} not below initial H {}", *prev->H, *first->H));
    }
    return r;
}

}  // namespace etb
